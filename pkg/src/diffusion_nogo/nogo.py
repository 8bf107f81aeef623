"""Numerical certificates that no linear operator realizes general diffusion.

Two independent witnesses:

* **Overlap distortion.** A unitary ``D`` preserves ``<psi1,phi|psi2,phi>``.
  The required outputs give ``<psi1|psi2> <R1 phi|R2 phi>`` instead, with
  ``Ri = I - 2|psi_i><psi_i|``.  Any nonzero gap rules out a unitary.
* **Linear extension.** ``D`` is pinned on product basis inputs
  ``|e_i>|e_j>``; the unique linear map agreeing there is evaluated on a
  superposed first register and compared with what ``D`` must output.

These certificates check the no-go statement directly; they do not go
through the communication argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, ShapeError
from .statevector import StateVector, inner, reflect_about, _check_same


@dataclass(frozen=True)
class DistortionWitness:
    psi1: np.ndarray
    psi2: np.ndarray
    phi: np.ndarray
    input_overlap: complex
    output_overlap: complex
    distortion: float

    @property
    def dim(self) -> int:
        return len(self.phi)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "psi1": complex_list(self.psi1),
            "psi2": complex_list(self.psi2),
            "phi": complex_list(self.phi),
            "input_overlap": [self.input_overlap.real, self.input_overlap.imag],
            "output_overlap": [self.output_overlap.real, self.output_overlap.imag],
            "distortion": self.distortion,
        }


@dataclass(frozen=True)
class LinearExtensionReport:
    dim: int
    training_pairs: list[tuple[np.ndarray, np.ndarray]]
    test_input: np.ndarray
    linear_output: np.ndarray
    required_output: np.ndarray
    deviation: float

    def to_json(self) -> dict:
        # Training pairs are emitted as (i, j, sign): input e_i(x)e_j, output sign * e_i(x)e_j.
        d = self.dim
        pairs = [[i, j, -1 if i == j else 1] for i in range(d) for j in range(d)]
        return {
            "dim": d,
            "training_pairs": pairs,
            "test_input": complex_list(self.test_input),
            "linear_output": complex_list(self.linear_output),
            "required_output": complex_list(self.required_output),
            "deviation": self.deviation,
        }


def complex_list(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=np.complex128)]


def _raw(v) -> np.ndarray:
    return v.amps if isinstance(v, StateVector) else np.asarray(v, dtype=np.complex128)


def _reflect(axis: np.ndarray, v: np.ndarray) -> np.ndarray:
    return v - 2.0 * np.vdot(axis, v) * axis


def inner_product_distortion(psi1, psi2, phi) -> DistortionWitness:
    """Accepts :class:`StateVector` triples on one layout, or plain unit vectors."""
    if all(isinstance(s, StateVector) for s in (psi1, psi2, phi)):
        _check_same(psi1, psi2)
        _check_same(psi1, phi)
        ip = inner(psi1, psi2)
        in_ov = ip * inner(phi, phi)
        out_ov = ip * inner(reflect_about(psi1, phi), reflect_about(psi2, phi))
    else:
        p1, p2, f = (_raw(s) for s in (psi1, psi2, phi))
        if not p1.shape == p2.shape == f.shape:
            raise ShapeError(f"shape mismatch: {p1.shape}, {p2.shape}, {f.shape}")
        for s in (p1, p2, f):
            if abs(np.linalg.norm(s) - 1.0) > 1e-9:
                raise PreconditionError("inputs must be normalized")
        ip = complex(np.vdot(p1, p2))
        in_ov = ip * complex(np.vdot(f, f))
        out_ov = ip * complex(np.vdot(_reflect(p1, f), _reflect(p2, f)))
    return DistortionWitness(
        psi1=np.array(_raw(psi1)), psi2=np.array(_raw(psi2)), phi=np.array(_raw(phi)),
        input_overlap=complex(in_ov), output_overlap=complex(out_ov),
        distortion=float(abs(in_ov - out_ov)),
    )


def random_unit(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def search_max_distortion(dim: int, trials: int, rng: np.random.Generator) -> DistortionWitness:
    """Best witness over ``trials`` random triples, drawn in a fixed order.

    Because draws are sequential, more trials under the same seed can only
    raise the returned distortion.
    """
    if dim < 2:
        raise PreconditionError(f"dim must be >= 2, got {dim}")
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    best = None
    for _ in range(trials):
        w = inner_product_distortion(random_unit(dim, rng), random_unit(dim, rng), random_unit(dim, rng))
        if best is None or w.distortion > best.distortion:
            best = w
    return best


def linear_extension_contradiction(dim: int) -> LinearExtensionReport:
    """Extend ``D`` linearly from ``|e_i>|e_j>`` and test it on ``(e_0 + e_last)/sqrt2 (x) e_0``."""
    if dim < 2:
        raise PreconditionError(f"dim must be >= 2, got {dim}")
    eye = np.eye(dim, dtype=np.complex128)
    big = dim * dim
    linear = np.zeros((big, big), dtype=np.complex128)
    pairs = []
    for i in range(dim):
        for j in range(dim):
            out = np.kron(eye[i], _reflect(eye[i], eye[j]))
            inp = np.kron(eye[i], eye[j])
            linear[:, i * dim + j] = out
            pairs.append((inp, out))
    psi = (eye[0] + eye[dim - 1]) / np.sqrt(2.0)
    phi = eye[0]
    test = np.kron(psi, phi)
    lin_out = linear @ test
    required = np.kron(psi, _reflect(psi, phi))
    return LinearExtensionReport(
        dim=dim, training_pairs=pairs, test_input=test,
        linear_output=lin_out, required_output=required,
        deviation=float(np.linalg.norm(lin_out - required)),
    )
