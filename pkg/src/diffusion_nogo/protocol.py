"""One-round disjointness protocol with metered quantum messages.

Bob prepares his block state and sends it to Alice (the only message).
Alice tensors it with her own block state and runs QSearch with the
general-diffusion pseudo-gate.  She answers "intersecting" iff QSearch
returns a good label before the cutoff.  The a=0 case never produces a good
label, so the protocol errs only on intersecting inputs, by timing out.

Ground truth is computed classically by the harness and never shown to the
parties.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .amplification import AmplificationInstance, QSearchConfig, qsearch, qsearch_analytic
from .encoding import (
    InputBitstring,
    Predicate,
    encode_block_state,
    exact_a,
    good_pairs,
    isqrt_exact,
)
from .errors import InputError, PreconditionError
from .statevector import BasisLabel, StateVector, tensor

CUTOFF_MODES = ("scaled", "paper")
ENGINES = ("statevector", "analytic")
# Minimum scaled cutoff, in units of sqrt(n) Q applications.
SCALED_CUTOFF_FACTOR = 30
DEFAULT_EPSILON = 0.05


def communication_cost(n: int) -> int:
    """Qubits in Bob's message: sqrt(n) block qubits plus ceil(log2 sqrt(n)) for the index."""
    s = isqrt_exact(n)
    if s == 1:
        return 1
    return s + math.ceil(math.log2(s))


def ground_truth_disjoint(x, y) -> bool:
    x = x if isinstance(x, InputBitstring) else InputBitstring(str(x))
    y = y if isinstance(y, InputBitstring) else InputBitstring(str(y))
    if x.n != y.n:
        raise InputError(f"length mismatch: {x.n} vs {y.n}")
    return not (x.support & y.support)


def expected_work(n: int) -> float:
    """Upper scale of QSearch work on intersecting inputs: 1/sqrt(a) <= sqrt(n) since a >= 1/n."""
    return float(isqrt_exact(n))


def cutoff_for(n: int, mode: str = "scaled", epsilon: float = DEFAULT_EPSILON) -> int:
    """Total-Q budget.  ``scaled``: max(30 sqrt n, sqrt n / epsilon).  ``paper``: n**4."""
    _check_epsilon(epsilon)
    if mode == "paper":
        return n**4
    if mode != "scaled":
        raise PreconditionError(f"unknown cutoff mode {mode!r}")
    work = expected_work(n)
    return max(math.ceil(SCALED_CUTOFF_FACTOR * work), math.ceil(work / epsilon))


def failure_probability_bound(n: int, epsilon: float = DEFAULT_EPSILON, cutoff_mode: str = "scaled",
                              work: float | None = None) -> float:
    """Markov bound ``expected_work / cutoff`` on the chance of timing out."""
    work = expected_work(n) if work is None else work
    return min(1.0, work / cutoff_for(n, cutoff_mode, epsilon))


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise PreconditionError(f"epsilon must lie in (0, 1), got {epsilon}")


def state_digest(v: StateVector) -> str:
    """sha256 of the amplitudes rounded to 1e-12, first 16 hex digits."""
    rounded = np.round(v.amps, 12) + 0.0  # + 0.0 folds -0.0 into 0.0
    return hashlib.sha256(np.ascontiguousarray(rounded).tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class Message:
    sender: str
    name: str
    qubit_count: int
    state_digest: str


@dataclass
class Transcript:
    messages: list[Message] = field(default_factory=list)
    rounds: int = 0

    @property
    def qubits_sent(self) -> int:
        return sum(m.qubit_count for m in self.messages)


@dataclass(frozen=True)
class ProtocolConfig:
    x: InputBitstring
    y: InputBitstring
    epsilon: float = DEFAULT_EPSILON
    cutoff_mode: str = "scaled"
    seed: int = 0
    lambda_: float = 6 / 5
    engine: str = "statevector"

    def __post_init__(self):
        for name in ("x", "y"):
            v = getattr(self, name)
            if not isinstance(v, InputBitstring):
                object.__setattr__(self, name, InputBitstring(str(v)))
        if self.x.n != self.y.n:
            raise InputError(f"length mismatch: {self.x.n} vs {self.y.n}")
        _check_epsilon(self.epsilon)
        if self.cutoff_mode not in CUTOFF_MODES:
            raise PreconditionError(f"cutoff_mode must be one of {CUTOFF_MODES}")
        if self.engine not in ENGINES:
            raise PreconditionError(f"engine must be one of {ENGINES}")

    @property
    def n(self) -> int:
        return self.x.n

    @property
    def cutoff(self) -> int:
        return cutoff_for(self.n, self.cutoff_mode, self.epsilon)


@dataclass(frozen=True)
class ProtocolResult:
    answer: bool
    ground_truth: bool
    q_applications: int
    preparations: int
    transcript: Transcript
    a: float
    found: BasisLabel | None
    config: ProtocolConfig

    def record(self) -> dict:
        cfg = self.config
        return {
            "n": cfg.n,
            "x": cfg.x.bits,
            "y": cfg.y.bits,
            "answer": self.answer,
            "ground_truth": self.ground_truth,
            "a": self.a,
            "q_applications": self.q_applications,
            "qubits_sent": self.transcript.qubits_sent,
            "rounds": self.transcript.rounds,
            "seed": cfg.seed,
            "cutoff_mode": cfg.cutoff_mode,
            "cutoff": cfg.cutoff,
            "engine": cfg.engine,
            "bob_state": self.transcript.messages[0].state_digest,
        }


def _bob(config: ProtocolConfig, transcript: Transcript) -> StateVector:
    psi_y = encode_block_state(config.y)
    transcript.messages.append(
        Message("bob", "bob_state", communication_cost(config.n), state_digest(psi_y))
    )
    transcript.rounds = 1
    return psi_y


def _alice(config: ProtocolConfig, received: StateVector):
    qcfg = QSearchConfig(cutoff=config.cutoff, lambda_=config.lambda_, seed=config.seed)
    rng = np.random.default_rng(config.seed)
    psi_x = encode_block_state(config.x)
    if config.engine == "statevector":
        instance = AmplificationInstance(tensor(psi_x, received), Predicate(psi_x.layout.d_levels))
        return qsearch(instance, qcfg, rng)
    # Analytic engine: a and the good labels follow from x and the support of
    # the received uniform block state.  m is capped at sqrt(joint dim) = dim(received).
    s = psi_x.layout.d_levels
    y_blocks = _blocks_from_state(received)
    a, labels = _analytic_view(config.x.bits, y_blocks, s)
    return qsearch_analytic(a, qcfg, rng, m_cap=float(received.dim), good_labels=labels)


def _blocks_from_state(v: StateVector) -> list[str]:
    blocks = [""] * v.layout.d_levels
    for label, _ in v.nonzero(atol=0.0):
        blocks[label.block_index[0]] = label.block_bits[0]
    return blocks


def _analytic_view(x_bits: str, y_blocks: list[str], s: int):
    y_bits = "".join(y_blocks)
    pairs = good_pairs(x_bits, y_bits)
    x_blocks = [x_bits[j * s:(j + 1) * s] for j in range(s)]
    labels = [BasisLabel((x_blocks[j], y_blocks[k]), (j, k)) for j, k in pairs]
    return len(pairs) / (s * s), labels


def run_disjointness(config: ProtocolConfig) -> ProtocolResult:
    transcript = Transcript()
    received = _bob(config, transcript)
    outcome = _alice(config, received)
    return ProtocolResult(
        answer=outcome.accepted,
        ground_truth=not ground_truth_disjoint(config.x, config.y),
        q_applications=outcome.q_applications,
        preparations=outcome.preparations,
        transcript=transcript,
        a=exact_a(config.x, config.y),
        found=outcome.found,
        config=config,
    )
