"""Exit criteria.  Each test prints one PASS/FAIL line (visible even without -s)."""

import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from diffusion_nogo.amplification import (
    AmplificationInstance,
    QSearchConfig,
    analytic_success_prob,
    claim_equivalence_residual,
    qsearch_analytic,
    random_span_state,
)
from diffusion_nogo.cli import main
from diffusion_nogo.encoding import exact_a
from diffusion_nogo.nogo import linear_extension_contradiction
from diffusion_nogo.protocol import (
    ProtocolConfig,
    communication_cost,
    ground_truth_disjoint,
    run_disjointness,
)
from diffusion_nogo.report import trial_seed
from diffusion_nogo.statevector import inner

from oracles import brute_count, classical_disjoint

EPSILON = 0.01


@pytest.fixture
def verdict(capsys):
    def emit(criterion: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        assert ok, f"{criterion}: {detail}"
    return emit


def all_pairs(n):
    for xs, ys in itertools.product(itertools.product("01", repeat=n), repeat=2):
        yield "".join(xs), "".join(ys)


def random_bits(n, rng, p=0.5):
    return "".join("1" if b else "0" for b in rng.random(n) < p)


def random_disjoint(n, rng):
    x = random_bits(n, rng)
    y = "".join("0" if c == "1" else ("1" if rng.random() < 0.5 else "0") for c in x)
    return x, y


def random_intersecting(n, rng):
    while True:
        x, y = random_bits(n, rng), random_bits(n, rng)
        if not ground_truth_disjoint(x, y):
            return x, y


def test_c1_exhaustive_exactness(verdict):
    t0 = time.perf_counter()
    bad = 0
    for x, y in all_pairs(4):
        a = exact_a(x, y)
        if a != brute_count(x, y) / 4 or (a == 0) != classical_disjoint(x, y):
            bad += 1
    dt = time.perf_counter() - t0
    verdict("C1 exhaustive exactness n=4", bad == 0 and dt < 5.0,
            f"256 pairs, {bad} mismatches, {dt:.2f}s (< 5s)")


def test_c2_one_sided_error(verdict):
    false_pos = 0
    runs = 0
    for x, y in all_pairs(4):
        if not ground_truth_disjoint(x, y):
            continue
        for seed in range(10):
            runs += 1
            false_pos += run_disjointness(ProtocolConfig(x, y, seed=seed)).answer
    rng = np.random.default_rng(trial_seed(2, "disjoint16"))
    for i in range(200):
        x, y = random_disjoint(16, rng)
        assert ground_truth_disjoint(x, y)
        runs += 1
        false_pos += run_disjointness(ProtocolConfig(x, y, seed=trial_seed(2, i))).answer
    verdict("C2 one-sided error", false_pos == 0, f"{runs} disjoint runs, {false_pos} false positives")


def test_c3_soundness(verdict):
    t0 = time.perf_counter()
    rates = {}
    for n, hard in ((4, ("1010", "1000")), (16, ("1" + "0" * 15, "1" + "0" * 15))):
        hits = sum(run_disjointness(ProtocolConfig(*hard, epsilon=EPSILON, seed=s)).answer for s in range(500))
        rates[f"n={n} fixed a={exact_a(*hard):g}"] = hits / 500
        rng = np.random.default_rng(trial_seed(3, n))
        hits = 0
        for s in range(500):
            x, y = random_intersecting(n, rng)
            hits += run_disjointness(ProtocolConfig(x, y, epsilon=EPSILON, seed=trial_seed(3, n, s))).answer
        rates[f"n={n} random"] = hits / 500
    dt = time.perf_counter() - t0
    ok = all(r >= 1 - EPSILON for r in rates.values()) and dt < 120
    detail = ", ".join(f"{k}: {v:.3f}" for k, v in rates.items())
    verdict("C3 protocol soundness", ok, f"{detail} (>= {1 - EPSILON}), {dt:.1f}s")


def test_c4_communication_metering(verdict):
    rows = []
    ok = True
    for n in (4, 16, 36, 64):
        s = math.isqrt(n)
        x = "1" * n
        y = "1" + "0" * (n - 1)
        res = run_disjointness(ProtocolConfig(x, y, seed=1))
        expected = s + math.ceil(math.log2(s))
        q = res.transcript.qubits_sent
        ok &= q == expected == communication_cost(n) and res.transcript.rounds == 1
        if n >= 16:
            ok &= q < n / 2
        rows.append(f"n={n}: {q} qubits (expect {expected})")
    verdict("C4 communication metering", ok, "; ".join(rows) + "; rounds=1; < n/2 for n >= 16")


def test_c5_claim_verification(verdict):
    rng = np.random.default_rng(trial_seed(5, "claim"))
    worst = 0.0
    cases = 0
    # degenerate one-dimensional cases
    zero_case = AmplificationInstance.from_inputs("1010", "0101")
    one_case = AmplificationInstance.from_inputs("1", "1")
    degenerate = [
        claim_equivalence_residual(zero_case.psi_ref, zero_case.psi_ref),
        claim_equivalence_residual(one_case.psi_ref, one_case.psi_ref),
    ]
    assert one_case.decomposition().a == 1 and zero_case.decomposition().a == 0
    cases += 2
    while cases < 100:
        n = 4 if rng.random() < 0.5 else 16
        inst = AmplificationInstance.from_inputs(*random_intersecting(n, rng))
        phi = random_span_state(inst, rng)
        worst = max(worst, claim_equivalence_residual(inst.psi_ref, phi, inst.mask))
        cases += 1
    ok = max(degenerate) <= 1e-12 and worst <= 1e-10
    verdict("C5 claim verification", ok,
            f"{cases} cases, degenerate max {max(degenerate):.1e} (<= 1e-12), "
            f"random max {worst:.1e} (<= 1e-10); confirmed cross term -2*sqrt(a(1-a))")


def test_c6_rotation_law(verdict):
    rng = np.random.default_rng(trial_seed(6, "rotation"))
    worst = 0.0
    instances = 0
    while instances < 20:
        n = 4 if instances < 5 else 16
        inst = AmplificationInstance.from_inputs(*random_intersecting(n, rng))
        dec = inst.decomposition()
        if not 0 < dec.a < 1:
            continue
        instances += 1
        v = inst.psi_ref
        for j in range(21):
            p = abs(inner(dec.psi1, v)) ** 2
            worst = max(worst, abs(p - analytic_success_prob(dec.a, j)))
            v = inst.apply_q(v)
    verdict("C6 rotation law", worst <= 1e-9, f"20 instances, j <= 20, max error {worst:.1e} (<= 1e-9)")


def test_c7_qsearch_scaling(verdict):
    t0 = time.perf_counter()
    means = {}
    for a in (0.5, 0.125):
        q = [qsearch_analytic(a, QSearchConfig(cutoff=10**6, seed=trial_seed(7, a, s))).q_applications
             for s in range(500)]
        means[a] = float(np.mean(q))
    ratio = means[0.125] / means[0.5]
    dt = time.perf_counter() - t0
    verdict("C7 QSearch scaling", 1.0 <= ratio <= 4.0 and dt < 30,
            f"mean Q a=0.5: {means[0.5]:.3f}, a=0.125: {means[0.125]:.3f}, ratio {ratio:.3f} "
            f"in [1, 4] (predicted 2), {dt:.1f}s")


def _reverify_witness(rec):
    vec = lambda key: np.array([complex(re, im) for re, im in rec[key]])
    p1, p2, f = vec("psi1"), vec("psi2"), vec("phi")
    r1 = f - 2 * np.vdot(p1, f) * p1
    r2 = f - 2 * np.vdot(p2, f) * p2
    ip = np.vdot(p1, p2)
    return abs(ip * np.vdot(f, f) - ip * np.vdot(r1, r2))


def _reverify_extension(rec):
    d = rec["dim"]
    diag = np.zeros(d * d)
    for i, j, sign in rec["training_pairs"]:
        diag[i * d + j] = sign
    test = np.array([complex(*z) for z in rec["test_input"]])
    required = np.array([complex(*z) for z in rec["required_output"]])
    return float(np.linalg.norm(diag * test - required))


def test_c8_nogo_certificates(verdict, capsys):
    main(["certify-nogo", "--dim", "2,3,4,8", "--trials", "1000", "--seed", "0"])
    rep = json.loads(capsys.readouterr().out)
    lines, ok = [], True
    for rec in rep["results"]:
        w, ext = rec["witness"], rec["linear_extension"]
        w_re, ext_re = _reverify_witness(w), _reverify_extension(ext)
        ok &= w["distortion"] >= 0.5 and abs(w_re - w["distortion"]) < 1e-12
        ok &= ext["deviation"] > 1e-6 and abs(ext_re - ext["deviation"]) < 1e-12
        lines.append(f"dim {rec['dim']}: distortion {w['distortion']:.3f}, deviation {ext['deviation']:.3f}")
    dev2 = linear_extension_contradiction(2).deviation
    ok &= dev2 > 0.9 and abs(dev2 - math.sqrt(2)) < 1e-12
    verdict("C8 no-go certificates", ok, "; ".join(lines) + " (re-verified from JSON)")


DETERMINISM_COMMANDS = [
    ["encode", "--n", "9", "--x", "111000111"],
    ["run", "--x", "1010", "--y", "1000", "--seed", "4"],
    ["sweep", "--n-list", "4,16", "--trials", "20", "--seed", "8"],
    ["sweep", "--n-list", "4", "--mode", "exhaustive", "--trials", "1", "--format", "csv"],
    ["certify-nogo", "--dim", "2,3", "--trials", "100", "--seed", "1"],
    ["verify-claim", "--x", "1111", "--y", "1100", "--phis", "10", "--seed", "3"],
]


def test_c9_determinism(verdict):
    differing = []
    for argv in DETERMINISM_COMMANDS:
        outs = [subprocess.run([sys.executable, "-m", "diffusion_nogo", *argv],
                               capture_output=True, check=True).stdout for _ in range(2)]
        if outs[0] != outs[1] or not outs[0]:
            differing.append(argv[0])
    verdict("C9 determinism", not differing,
            f"{len(DETERMINISM_COMMANDS)} invocations repeated, differing: {differing or 'none'}")
