"""Amplitude amplification with the general-diffusion pseudo-gate.

.. warning::

   :func:`general_diffusion_apply` reflects the working register about a
   state that is handed over as an explicit classical description.  This is
   precisely the resource a physical device holding one unknown copy does not
   have: no linear map realizes the gate (see :mod:`diffusion_nogo.nogo`).
   The simulator grants it anyway so the protocol built on top of it can be
   run.  QSearch restarts re-prepare ``Psi`` from the same description, which
   is the same privilege.

On the two-dimensional space ``span{Psi0, Psi1}`` the operator
``Q = -A S0 A^-1 S_chi`` acts, in the basis ``(Psi0, Psi1)``, as the rotation::

    Q Psi0 = (1 - 2a) Psi0 + 2 sqrt(a(1-a)) Psi1
    Q Psi1 = -2 sqrt(a(1-a)) Psi0 + (1 - 2a) Psi1

so ``|<Psi1|Q^j Psi>|^2 = sin^2((2j+1) theta)`` with ``sin^2 theta = a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .encoding import Predicate
from .errors import PreconditionError, ShapeError
from .statevector import (
    EQUIV_TOL,
    BasisLabel,
    Preparation,
    StateVector,
    _reflect,
    reflect_about,
    sample_index,
)


@dataclass(frozen=True)
class GoodBadDecomposition:
    psi0: Optional[StateVector]
    psi1: Optional[StateVector]
    a: float

    def basis(self) -> list[StateVector]:
        return [s for s in (self.psi0, self.psi1) if s is not None]

    def project(self, v: StateVector) -> np.ndarray:
        """Coordinates of ``v`` in (psi0, psi1); absent members give 0."""
        return np.array([
            np.vdot(s.amps, v.amps) if s is not None else 0.0
            for s in (self.psi0, self.psi1)
        ], dtype=np.complex128)

    def span_residual(self, v: StateVector) -> float:
        rest = v.amps.copy()
        for s in self.basis():
            rest -= np.vdot(s.amps, rest) * s.amps
        return float(np.linalg.norm(rest))


def _mask_for(predicate, psi_ref: StateVector) -> np.ndarray:
    if isinstance(predicate, np.ndarray):
        if predicate.shape != (psi_ref.dim,):
            raise ShapeError(f"mask shape {predicate.shape} does not match dimension {psi_ref.dim}")
        return predicate.astype(bool)
    if predicate is None:
        predicate = Predicate(psi_ref.layout.d_levels)
    return predicate.mask(psi_ref.layout)


def decompose_good_bad(psi_ref: StateVector, predicate=None) -> GoodBadDecomposition:
    mask = _mask_for(predicate, psi_ref)
    good = np.where(mask, psi_ref.amps, 0)
    bad = np.where(mask, 0, psi_ref.amps)
    g2 = float(np.vdot(good, good).real)
    b2 = float(np.vdot(bad, bad).real)
    psi1 = StateVector(psi_ref.layout, good / math.sqrt(g2)) if g2 > 0 else None
    psi0 = StateVector(psi_ref.layout, bad / math.sqrt(b2)) if b2 > 0 else None
    a = min(max(g2 / (g2 + b2), 0.0), 1.0)
    return GoodBadDecomposition(psi0, psi1, a)


def general_diffusion_apply(psi_ref: StateVector, phi: StateVector) -> StateVector:
    """``|psi>|phi> -> |psi>(I - 2|psi><psi|)|phi>``, returning the second register.

    ``psi_ref`` is read as classical side data and left untouched.  See the
    module warning: this is the simulator's privileged step.
    """
    return reflect_about(psi_ref, phi)


class AmplificationInstance:
    """``Psi`` plus its good-label mask, with ``Q`` precompiled on raw arrays."""

    def __init__(self, psi_ref: StateVector, predicate=None):
        self.psi_ref = psi_ref
        self.mask = _mask_for(predicate, psi_ref)
        self._prep = Preparation(psi_ref.amps)
        self._decomposition = None

    @classmethod
    def from_inputs(cls, x, y) -> "AmplificationInstance":
        from .encoding import encode_block_state
        from .statevector import tensor

        pred = Predicate.for_inputs(x, y)
        return cls(tensor(encode_block_state(x), encode_block_state(y)), pred)

    @property
    def dim(self) -> int:
        return self.psi_ref.dim

    def decomposition(self) -> GoodBadDecomposition:
        if self._decomposition is None:
            self._decomposition = decompose_good_bad(self.psi_ref, self.mask)
        return self._decomposition

    def oracle(self, v: np.ndarray) -> np.ndarray:
        return np.where(self.mask, -v, v)

    def q_step(self, v: np.ndarray) -> np.ndarray:
        """S_chi, then A^-1, then S0, then A, then global -1."""
        out = self._prep.inverse(self.oracle(v))
        out[0] = -out[0]
        out = self._prep.forward(out)
        return -out

    def apply_q(self, v: StateVector, times: int = 1) -> StateVector:
        if v.layout != self.psi_ref.layout:
            raise ShapeError(f"layout mismatch: {v.layout} vs {self.psi_ref.layout}")
        arr = v.amps
        for _ in range(times):
            arr = self.q_step(arr)
        return StateVector(v.layout, arr)

    def diffusion_side(self, phi: StateVector) -> StateVector:
        """``-D (I (x) U)`` on the working register."""
        return StateVector(phi.layout, -_reflect(self.psi_ref.amps, self.oracle(phi.amps)))


def apply_Q(psi_ref: StateVector, predicate, v: StateVector) -> StateVector:
    return AmplificationInstance(psi_ref, predicate).apply_q(v)


def claim_equivalence_residual(psi_ref: StateVector, phi: StateVector, predicate=None,
                               span_tol: float = EQUIV_TOL) -> float:
    """``|| Q phi + D(psi_ref, U phi) ||`` for ``phi`` in ``span{Psi0, Psi1}``.

    The reference copy ``|psi_x>|psi_y>`` is common to both sides and acted on
    by the identity, so only the working register is simulated.
    """
    inst = AmplificationInstance(psi_ref, predicate)
    if phi.layout != psi_ref.layout:
        raise ShapeError(f"layout mismatch: {phi.layout} vs {psi_ref.layout}")
    off = inst.decomposition().span_residual(phi)
    if off > span_tol:
        raise PreconditionError(f"phi leaves span{{Psi0, Psi1}} by {off:.3e}")
    lhs = inst.apply_q(phi)
    rhs = inst.diffusion_side(phi)
    return float(np.linalg.norm(lhs.amps - rhs.amps))


def random_span_state(inst: AmplificationInstance, rng: np.random.Generator) -> StateVector:
    """Random unit vector in span{Psi0, Psi1}, Gaussian complex coefficients."""
    dec = inst.decomposition()
    coef = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    amps = np.zeros(inst.dim, dtype=np.complex128)
    for c, member in zip(coef, (dec.psi0, dec.psi1)):
        if member is not None:
            amps += c * member.amps
    return StateVector.from_amplitudes(inst.psi_ref.layout, amps, normalize=True)


def rotation_matrix(a: float) -> np.ndarray:
    """Matrix of ``Q`` on (Psi0, Psi1); column ``i`` is ``Q`` applied to basis vector ``i``."""
    c = 1.0 - 2.0 * a
    s = 2.0 * math.sqrt(a * (1.0 - a))
    return np.array([[c, -s], [s, c]])


def analytic_success_prob(a: float, j: int) -> float:
    if not 0.0 <= a <= 1.0:
        raise PreconditionError(f"a must lie in [0, 1], got {a}")
    if j < 0:
        raise PreconditionError(f"j must be >= 0, got {j}")
    theta = math.asin(math.sqrt(a))
    return math.sin((2 * j + 1) * theta) ** 2


@dataclass(frozen=True)
class QSearchConfig:
    cutoff: int
    lambda_: float = 6 / 5
    seed: int = 0

    def __post_init__(self):
        if not 1.0 < self.lambda_ < 2.0:
            raise PreconditionError(f"lambda must lie in (1, 2), got {self.lambda_}")
        if self.cutoff < 1:
            raise PreconditionError(f"cutoff must be >= 1, got {self.cutoff}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class QSearchOutcome:
    found: Optional[BasisLabel]
    q_applications: int
    preparations: int

    @property
    def accepted(self) -> bool:
        return self.found is not None


def _schedule(config: QSearchConfig, rng: np.random.Generator, m_cap: float,
              trial: Callable[[int], Optional[BasisLabel]]) -> QSearchOutcome:
    m = 1.0
    q_total = 0
    preps = 0
    while q_total < config.cutoff:
        j = int(rng.integers(0, math.ceil(m)))
        preps += 1
        q_total += j
        found = trial(j)
        if found is not None:
            return QSearchOutcome(found, q_total, preps)
        m = min(config.lambda_ * m, m_cap)
    return QSearchOutcome(None, q_total, preps)


def qsearch(instance: AmplificationInstance, config: QSearchConfig,
            rng: np.random.Generator | None = None) -> QSearchOutcome:
    """Exponential-schedule search for a good label, ``a`` unknown.

    Each round draws ``j`` uniformly from ``[0, m)``, prepares ``Psi`` afresh,
    applies ``Q`` ``j`` times and measures.  ``m`` grows by ``lambda`` up to
    ``sqrt(dim)``.  Once the running ``Q`` count reaches ``config.cutoff`` the
    search gives up and reports nothing found.
    """
    rng = rng if rng is not None else config.rng()
    psi = instance.psi_ref.amps
    layout = instance.psi_ref.layout

    def trial(j: int) -> Optional[BasisLabel]:
        v = psi
        for _ in range(j):
            v = instance.q_step(v)
        idx = sample_index(np.abs(v) ** 2, rng)
        return layout.label_of(idx) if instance.mask[idx] else None

    return _schedule(config, rng, math.sqrt(instance.dim), trial)


def qsearch_analytic(a: float, config: QSearchConfig, rng: np.random.Generator | None = None,
                     m_cap: float = math.inf,
                     good_labels: Sequence[BasisLabel] | None = None) -> QSearchOutcome:
    """Same schedule as :func:`qsearch`, with measurements drawn from the rotation law.

    A good outcome returns a label drawn uniformly from ``good_labels`` (the
    good part of a uniform ``Psi`` is uniform), or a placeholder label when
    none are given.
    """
    rng = rng if rng is not None else config.rng()

    def trial(j: int) -> Optional[BasisLabel]:
        if rng.random() < analytic_success_prob(a, j):
            if good_labels:
                return good_labels[int(rng.integers(0, len(good_labels)))]
            return BasisLabel(("1",), (0,))
        return None

    return _schedule(config, rng, m_cap, trial)
