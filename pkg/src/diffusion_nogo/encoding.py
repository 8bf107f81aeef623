"""Classical inputs, block encoding and the phase oracle.

An input ``x`` of length ``n = s*s`` is cut into ``s`` blocks of ``s`` bits;
block ``j`` is ``x[j*s:(j+1)*s]``.  Character 0 of the string is set element 0.
The party state is the uniform superposition ``n**-0.25 * sum_j |x^(j)>|j>``.

The predicate and oracle act on *labels* of the joint register, not on the
inputs: label ``(b1, j, b2, k)`` is good iff ``j == k`` and ``b1 & b2 != 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import InputError, ShapeError
from .statevector import BasisLabel, MAX_AMPLITUDES, RegisterLayout, StateVector


def isqrt_exact(n: int) -> int:
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    s = math.isqrt(n)
    if s * s != n:
        raise InputError(f"n = {n} is not a perfect square")
    return s


@dataclass(frozen=True)
class InputBitstring:
    bits: str

    def __post_init__(self):
        if not self.bits or set(self.bits) - {"0", "1"}:
            raise InputError(f"not a non-empty 0/1 string: {self.bits!r}")
        isqrt_exact(len(self.bits))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def block_size(self) -> int:
        return math.isqrt(self.n)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.bits) if c == "1")

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "InputBitstring":
        """Accept a 0/1 string, or hex with a ``0x`` prefix (``n`` required).

        Hex values are zero-padded on the left to ``n`` bits, so the most
        significant bit becomes element 0.
        """
        text = text.strip()
        if text.lower().startswith("0x"):
            if n is None:
                raise InputError("hex input needs an explicit n")
            try:
                value = int(text[2:], 16)
            except ValueError:
                raise InputError(f"bad hex literal {text!r}") from None
            if value >= 2**n:
                raise InputError(f"{text} does not fit in {n} bits")
            bits = format(value, f"0{n}b")
        else:
            bits = text
        out = cls(bits)
        if n is not None and out.n != n:
            raise InputError(f"input has length {out.n}, expected n = {n}")
        return out


def _as_input(x) -> InputBitstring:
    return x if isinstance(x, InputBitstring) else InputBitstring(str(x))


@dataclass(frozen=True)
class BlockView:
    blocks: tuple[str, ...]

    def joined(self) -> str:
        return "".join(self.blocks)


def block_split(x) -> BlockView:
    x = _as_input(x)
    s = x.block_size
    return BlockView(tuple(x.bits[j * s:(j + 1) * s] for j in range(s)))


def party_layout(n: int) -> RegisterLayout:
    s = isqrt_exact(n)
    return RegisterLayout(two_level_count=s, d_levels=s, copies=1)


def encode_block_state(x, max_amplitudes: int = MAX_AMPLITUDES) -> StateVector:
    x = _as_input(x)
    layout = party_layout(x.n)
    layout.check_capacity(max_amplitudes)
    amps = np.zeros(layout.dim, dtype=np.complex128)
    coef = x.n ** -0.25
    for j, block in enumerate(block_split(x).blocks):
        amps[int(block, 2) * layout.d_levels + j] = coef
    return StateVector(layout, amps)


def _and_nonzero(b1: str, b2: str) -> bool:
    return any(p == "1" and q == "1" for p, q in zip(b1, b2))


def predicate_eval(label: BasisLabel) -> bool:
    if len(label.block_bits) != 2:
        raise ShapeError("the predicate is defined on joint (two-copy) labels only")
    (b1, b2), (j, k) = label.block_bits, label.block_index
    return j == k and _and_nonzero(b1, b2)


@dataclass(frozen=True)
class Predicate:
    """The decision ``(j == k) and OR_i (b1[i] and b2[i])`` on joint labels.

    ``x_blocks``/``y_blocks`` record which instance the predicate was built
    for; evaluation itself only reads the label.
    """

    block_size: int
    x_blocks: BlockView | None = None
    y_blocks: BlockView | None = None

    @classmethod
    def for_inputs(cls, x, y) -> "Predicate":
        x, y = _as_input(x), _as_input(y)
        if x.n != y.n:
            raise InputError(f"length mismatch: {x.n} vs {y.n}")
        return cls(x.block_size, block_split(x), block_split(y))

    @property
    def layout(self) -> RegisterLayout:
        return RegisterLayout(self.block_size, self.block_size, copies=2)

    def __call__(self, label: BasisLabel) -> bool:
        return predicate_eval(label)

    def mask(self, layout: RegisterLayout | None = None) -> np.ndarray:
        """Boolean array over every flat index of the joint layout."""
        layout = layout or self.layout
        if layout.copies != 2:
            raise ShapeError("the predicate is defined on joint (two-copy) layouts only")
        bits, idxs = layout.digits()
        return (idxs[0] == idxs[1]) & ((bits[0] & bits[1]) != 0)


def phase_oracle_apply(v: StateVector, predicate: Predicate | None = None) -> StateVector:
    if v.layout.copies != 2 or v.layout.two_level_count != v.layout.d_levels:
        raise ShapeError(f"oracle needs a joint block layout, got {v.layout}")
    predicate = predicate or Predicate(v.layout.d_levels)
    if predicate.layout != v.layout:
        raise ShapeError(f"predicate layout {predicate.layout} does not match {v.layout}")
    mask = predicate.mask(v.layout)
    return StateVector(v.layout, np.where(mask, -v.amps, v.amps))


def support_pairs(x, y) -> list[tuple[tuple[str, int], tuple[str, int]]]:
    """The n labels carrying weight in psi_x (x) psi_y, as ((x^(j), j), (y^(k), k))."""
    xb, yb = block_split(x).blocks, block_split(y).blocks
    return [((xb[j], j), (yb[k], k)) for j, k in product(range(len(xb)), range(len(yb)))]


def good_pairs(x, y) -> list[tuple[int, int]]:
    xb, yb = block_split(x).blocks, block_split(y).blocks
    return [(j, k) for j in range(len(xb)) for k in range(len(yb))
            if j == k and _and_nonzero(xb[j], yb[k])]


def exact_a(x, y) -> float:
    x, y = _as_input(x), _as_input(y)
    if x.n != y.n:
        raise InputError(f"length mismatch: {x.n} vs {y.n}")
    return len(good_pairs(x, y)) / x.n
