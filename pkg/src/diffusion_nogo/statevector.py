"""Dense state vectors over block-encoded composite registers.

A party register holds ``m`` two-level subsystems (the block contents) followed
by one ``d``-level subsystem (the block index).  A register may hold several
identical copies of that party layout; the joint working register of the
protocol has two.

Flat amplitude order is mixed radix, most significant digit first::

    (bits_1, index_1, bits_2, index_2, ...)

with every ``bits`` group read big-endian.  For one copy the flat index of
``|b>|j>`` is ``int(b, 2) * d + j``.

States are immutable.  Every operation returns a fresh :class:`StateVector`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, PreconditionError, ShapeError

NORM_TOL = 1e-12
# Construction-time guard; loose enough for long Q-iteration chains on 2^22 amplitudes.
NORM_GUARD = 1e-9
EQUIV_TOL = 1e-10
MAX_AMPLITUDES = 2**28


@dataclass(frozen=True)
class RegisterLayout:
    two_level_count: int
    d_levels: int
    copies: int = 1

    def __post_init__(self):
        if self.two_level_count < 1:
            raise ShapeError(f"two_level_count must be >= 1, got {self.two_level_count}")
        if self.d_levels < 1:
            raise ShapeError(f"d_levels must be >= 1, got {self.d_levels}")
        if self.copies < 1:
            raise ShapeError(f"copies must be >= 1, got {self.copies}")

    @property
    def copy_dim(self) -> int:
        return (2**self.two_level_count) * self.d_levels

    @property
    def dim(self) -> int:
        return self.copy_dim**self.copies

    def check_capacity(self, max_amplitudes: int = MAX_AMPLITUDES) -> None:
        if self.dim > max_amplitudes:
            raise CapacityError(
                f"layout {self} needs {self.dim} amplitudes, limit is {max_amplitudes}"
            )

    def with_copies(self, copies: int) -> "RegisterLayout":
        return RegisterLayout(self.two_level_count, self.d_levels, copies)

    def label_of(self, index: int) -> "BasisLabel":
        if not 0 <= index < self.dim:
            raise ShapeError(f"index {index} out of range for dimension {self.dim}")
        bits, idxs = [], []
        rest = int(index)
        # Peel copies from the least-significant end.
        for _ in range(self.copies):
            rest, local = divmod(rest, self.copy_dim)
            b, j = divmod(local, self.d_levels)
            bits.append(format(b, f"0{self.two_level_count}b"))
            idxs.append(j)
        return BasisLabel(tuple(reversed(bits)), tuple(reversed(idxs)))

    def index_of(self, label: "BasisLabel") -> int:
        if len(label.block_bits) != self.copies or len(label.block_index) != self.copies:
            raise ShapeError(f"label {label} does not have {self.copies} copies")
        index = 0
        for bits, j in zip(label.block_bits, label.block_index):
            if len(bits) != self.two_level_count or set(bits) - {"0", "1"}:
                raise ShapeError(f"block bits {bits!r} do not fit {self.two_level_count} qubits")
            if not 0 <= j < self.d_levels:
                raise ShapeError(f"block index {j} out of range [0, {self.d_levels})")
            index = index * self.copy_dim + int(bits, 2) * self.d_levels + j
        return index

    def digits(self) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised label decomposition: (bits, index) arrays of shape (copies, dim)."""
        flat = np.arange(self.dim, dtype=np.int64)
        bits = np.empty((self.copies, self.dim), dtype=np.int64)
        idxs = np.empty((self.copies, self.dim), dtype=np.int64)
        for c in range(self.copies - 1, -1, -1):
            flat, local = np.divmod(flat, self.copy_dim)
            bits[c], idxs[c] = np.divmod(local, self.d_levels)
        return bits, idxs


@dataclass(frozen=True)
class BasisLabel:
    block_bits: tuple[str, ...]
    block_index: tuple[int, ...]

    def as_tuple(self) -> tuple:
        out: list = []
        for b, j in zip(self.block_bits, self.block_index):
            out.extend((b, j))
        return tuple(out)

    def __str__(self) -> str:
        return "|".join(f"{b},{j}" for b, j in zip(self.block_bits, self.block_index))


def qubit_layout() -> RegisterLayout:
    """A bare qubit: one two-level subsystem and a trivial index register."""
    return RegisterLayout(1, 1, 1)


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: RegisterLayout
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=np.complex128)
        if amps.shape != (self.layout.dim,):
            raise ShapeError(f"expected {self.layout.dim} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise PreconditionError("state has non-finite amplitudes")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_GUARD:
            raise PreconditionError(f"state is not normalized (norm^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, layout: RegisterLayout, index: int) -> "StateVector":
        layout.check_capacity()
        amps = np.zeros(layout.dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(layout, amps)

    @classmethod
    def zero(cls, layout: RegisterLayout) -> "StateVector":
        return cls.basis(layout, 0)

    @classmethod
    def from_amplitudes(cls, layout: RegisterLayout, amps: Sequence[complex], normalize: bool = False):
        amps = np.asarray(amps, dtype=np.complex128)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise PreconditionError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(layout, amps)

    @classmethod
    def random(cls, layout: RegisterLayout, rng: np.random.Generator) -> "StateVector":
        """Gaussian real and imaginary parts, then normalized."""
        amps = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
        return cls.from_amplitudes(layout, amps, normalize=True)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def amplitude(self, label: BasisLabel) -> complex:
        return complex(self.amps[self.layout.index_of(label)])

    def nonzero(self, atol: float = 0.0) -> list[tuple[BasisLabel, complex]]:
        idx = np.flatnonzero(np.abs(self.amps) > atol)
        return [(self.layout.label_of(int(i)), complex(self.amps[i])) for i in idx]

    def scaled(self, phase: complex) -> "StateVector":
        return StateVector(self.layout, self.amps * phase)

    def allclose(self, other: "StateVector", atol: float = NORM_TOL) -> bool:
        _check_same(self, other)
        return bool(np.allclose(self.amps, other.amps, rtol=0.0, atol=atol))


def _check_same(a: StateVector, b: StateVector) -> None:
    if a.layout != b.layout:
        raise ShapeError(f"layout mismatch: {a.layout} vs {b.layout}")


def tensor(a: StateVector, b: StateVector, max_amplitudes: int = MAX_AMPLITUDES) -> StateVector:
    if (a.layout.two_level_count, a.layout.d_levels) != (b.layout.two_level_count, b.layout.d_levels):
        raise ShapeError(f"cannot tensor differing party layouts {a.layout} and {b.layout}")
    layout = a.layout.with_copies(a.layout.copies + b.layout.copies)
    layout.check_capacity(max_amplitudes)
    return StateVector(layout, np.kron(a.amps, b.amps))


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    _check_same(a, b)
    return complex(np.vdot(a.amps, b.amps))


def reflect_about(axis: StateVector, v: StateVector) -> StateVector:
    """(I - 2|axis><axis|) v."""
    _check_same(axis, v)
    return StateVector(v.layout, _reflect(axis.amps, v.amps))


def _reflect(axis: np.ndarray, v: np.ndarray) -> np.ndarray:
    return v - (2.0 * np.vdot(axis, v)) * axis


class Preparation:
    """Unitary ``A`` with ``A|0...0> = target``, built from two reflections.

    ``A = H P`` where ``P`` multiplies the ``|0...0>`` amplitude by the phase
    of ``target[0]`` and ``H`` is the Householder reflection swapping
    ``|0...0>`` with the phase-stripped target.  Both factors are the identity
    when the target already is ``|0...0>``.
    """

    def __init__(self, target: np.ndarray):
        target = np.asarray(target, dtype=np.complex128)
        t0 = target[0]
        self.phase = t0 / abs(t0) if abs(t0) > 0 else 1.0 + 0j
        w = -np.conj(self.phase) * target
        w[0] += 1.0
        wnorm2 = float(np.vdot(w, w).real)
        # w vanishes (up to rounding) only when target == phase * |0...0>
        if wnorm2 <= 1e-30:
            self.w = None
        else:
            self.w = w
            self._scale = 2.0 / wnorm2

    def _householder(self, v: np.ndarray) -> np.ndarray:
        if self.w is None:
            return v.copy()
        return v - (self._scale * np.vdot(self.w, v)) * self.w

    def forward(self, v: np.ndarray) -> np.ndarray:
        out = np.array(v, dtype=np.complex128)
        out[0] *= self.phase
        return self._householder(out)

    def inverse(self, v: np.ndarray) -> np.ndarray:
        out = self._householder(np.asarray(v, dtype=np.complex128))
        out[0] *= np.conj(self.phase)
        return out


def prepare_from_zero(target: StateVector, v: StateVector) -> StateVector:
    _check_same(target, v)
    return StateVector(v.layout, Preparation(target.amps).forward(v.amps))


def prepare_from_zero_inverse(target: StateVector, v: StateVector) -> StateVector:
    _check_same(target, v)
    return StateVector(v.layout, Preparation(target.amps).inverse(v.amps))


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; outcomes with probability exactly zero are never returned."""
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    idx = int(np.searchsorted(cdf, u, side="right"))
    if idx >= len(probs):
        idx = int(np.flatnonzero(probs)[-1])
    return idx


def measure_sample(v: StateVector, rng: np.random.Generator) -> BasisLabel:
    return v.layout.label_of(sample_index(v.probabilities(), rng))
