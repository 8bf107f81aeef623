"""Command-line interface.

Exit codes: 0 success, 1 an invariant was violated, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import product

import numpy as np

from .amplification import AmplificationInstance, claim_equivalence_residual, random_span_state
from .encoding import InputBitstring, encode_block_state
from .errors import NogoError
from .nogo import complex_list, linear_extension_contradiction, search_max_distortion
from .protocol import (
    CUTOFF_MODES,
    DEFAULT_EPSILON,
    ENGINES,
    ProtocolConfig,
    failure_probability_bound,
    run_disjointness,
)
from .report import RunReport, trial_seed
from .statevector import EQUIV_TOL, StateVector

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
CERT_THRESHOLD = 1e-6


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")


def _add_protocol(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--cutoff", choices=CUTOFF_MODES, default="scaled")
    p.add_argument("--lambda", dest="lambda_", type=float, default=6 / 5)
    p.add_argument("--engine", choices=ENGINES, default="statevector")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diffusion-nogo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="print the block-encoded state of x")
    p.add_argument("--n", type=int)
    p.add_argument("--x", required=True)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--out")

    p = sub.add_parser("run", help="one protocol run")
    p.add_argument("--n", type=int)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--verbose", action="store_true", help="include Bob's full state")
    _add_protocol(p)
    _add_output(p)

    p = sub.add_parser("sweep", help="many protocol runs")
    p.add_argument("--n-list", type=_int_list, default=[4])
    p.add_argument("--trials", type=int, default=10,
                   help="seeds per pair (exhaustive) or random pairs per n (random)")
    p.add_argument("--mode", choices=("exhaustive", "random"), default="random")
    p.add_argument("--workers", type=int, default=1)
    _add_protocol(p)
    _add_output(p)

    p = sub.add_parser("certify-nogo", help="emit distortion and linear-extension witnesses")
    p.add_argument("--dim", type=_int_list, default=[2])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("verify-claim", help="compare Q with -D(I (x) U) on random phi")
    p.add_argument("--n", type=int)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--phis", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phi-basis", type=int, default=None,
                   help="also test the basis state with this flat index")
    _add_output(p)
    return parser


def _parse_input(text: str, n: int | None) -> InputBitstring:
    return InputBitstring.parse(text, n)


def cmd_encode(args) -> tuple[RunReport, int]:
    x = _parse_input(args.x, args.n)
    state = encode_block_state(x)
    rows = [
        {"bits": label.block_bits[0], "index": label.block_index[0],
         "amplitude": [amp.real, amp.imag]}
        for label, amp in sorted(state.nonzero(), key=lambda item: item[0].block_index)
    ]
    return RunReport("encode", {"n": x.n, "x": x.bits}, rows, {"nonzero": len(rows)}), EXIT_OK


def _format_table(report: RunReport) -> str:
    width = max(4, len(report.results[0]["bits"]))
    lines = [f"{'bits':>{width}}  index  amplitude"]
    for r in report.results:
        re_, im = r["amplitude"]
        amp = f"{re_:.4f}" if im == 0 else f"{complex(re_, im):.4f}"
        lines.append(f"{r['bits']:>{width}}  {r['index']:>5}  {amp}")
    return "\n".join(lines) + "\n"


def _protocol_config(args, x, y, seed) -> ProtocolConfig:
    return ProtocolConfig(x=x, y=y, epsilon=args.epsilon, cutoff_mode=args.cutoff,
                          seed=seed, lambda_=args.lambda_, engine=args.engine)


def _protocol_echo(args) -> dict:
    return {"seed": args.seed, "epsilon": args.epsilon, "cutoff_mode": args.cutoff,
            "lambda": args.lambda_, "engine": args.engine}


def cmd_run(args) -> tuple[RunReport, int]:
    x = _parse_input(args.x, args.n)
    y = _parse_input(args.y, x.n)
    cfg = _protocol_config(args, x, y, args.seed)
    result = run_disjointness(cfg)
    record = result.record()
    if args.verbose:
        record["bob_state_amplitudes"] = complex_list(encode_block_state(y).amps)
    summary = {
        "answer": result.answer,
        "ground_truth": result.ground_truth,
        "qubits_sent": result.transcript.qubits_sent,
        "failure_bound": failure_probability_bound(x.n, args.epsilon, args.cutoff),
    }
    echo = {"n": x.n, "x": x.bits, "y": y.bits, **_protocol_echo(args)}
    ok = result.ground_truth or not result.answer
    return RunReport("run", echo, [record], summary), EXIT_OK if ok else EXIT_VIOLATION


def _random_bits(n: int, rng: np.random.Generator) -> str:
    return "".join("1" if b else "0" for b in rng.integers(0, 2, size=n))


def _sweep_jobs(args):
    k = 0
    for n in args.n_list:
        if args.mode == "exhaustive":
            if n > 4:
                raise UsageError("exhaustive mode is limited to n <= 4")
            for xs, ys in product(product("01", repeat=n), repeat=2):
                for _ in range(args.trials):
                    yield "".join(xs), "".join(ys), trial_seed(args.seed, k)
                    k += 1
        else:
            for _ in range(args.trials):
                rng = np.random.default_rng(trial_seed(args.seed, k, "pair"))
                yield _random_bits(n, rng), _random_bits(n, rng), trial_seed(args.seed, k)
                k += 1


def _summarize(records: list[dict]) -> dict:
    hit = [r for r in records if r["ground_truth"]]
    miss = [r for r in records if not r["ground_truth"]]
    return {
        "runs": len(records),
        "intersecting": len(hit),
        "disjoint": len(miss),
        "true_rate": (sum(r["answer"] for r in hit) / len(hit)) if hit else None,
        "false_positives": sum(r["answer"] for r in miss),
        "mean_q_applications": (sum(r["q_applications"] for r in records) / len(records)) if records else None,
    }


def cmd_sweep(args) -> tuple[RunReport, int]:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    jobs = list(_sweep_jobs(args))

    def run(job):
        x, y, seed = job
        return run_disjointness(_protocol_config(args, x, y, seed)).record()

    if args.workers == 1:
        records = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(run, jobs))  # map keeps trial order
    summary = _summarize(records)
    summary["by_n"] = [{"n": n, **_summarize([r for r in records if r["n"] == n])} for n in args.n_list]
    echo = {"n_list": args.n_list, "trials": args.trials, "mode": args.mode, **_protocol_echo(args)}
    code = EXIT_OK if summary["false_positives"] == 0 else EXIT_VIOLATION
    return RunReport("sweep", echo, records, summary), code


def cmd_certify_nogo(args) -> tuple[RunReport, int]:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if not args.dim or min(args.dim) < 2:
        raise UsageError("--dim values must be >= 2")
    results = []
    for dim in args.dim:
        rng = np.random.default_rng(trial_seed(args.seed, "dim", dim))
        witness = search_max_distortion(dim, args.trials, rng)
        ext = linear_extension_contradiction(dim)
        results.append({"dim": dim, "witness": witness.to_json(), "linear_extension": ext.to_json()})
    best = [r["witness"]["distortion"] for r in results]
    devs = [r["linear_extension"]["deviation"] for r in results]
    certified = min(best) > CERT_THRESHOLD and min(devs) > CERT_THRESHOLD
    summary = {
        "max_distortion": max(best),
        "min_distortion_over_dims": min(best),
        "min_deviation": min(devs),
        "certified": certified,
    }
    echo = {"dim": args.dim, "trials": args.trials, "seed": args.seed}
    return RunReport("certify-nogo", echo, results, summary), EXIT_OK if certified else EXIT_VIOLATION


def cmd_verify_claim(args) -> tuple[RunReport, int]:
    x = _parse_input(args.x, args.n)
    y = _parse_input(args.y, x.n)
    if args.phis < 0:
        raise UsageError("--phis must be >= 0")
    inst = AmplificationInstance.from_inputs(x, y)
    a = inst.decomposition().a
    cases = [("psi", inst.psi_ref)]
    for i in range(args.phis):
        cases.append((f"random:{i}", random_span_state(inst, np.random.default_rng(trial_seed(args.seed, i)))))
    if args.phi_basis is not None:
        if not 0 <= args.phi_basis < inst.dim:
            raise UsageError(f"--phi-basis must lie in [0, {inst.dim})")
        cases.append((f"basis:{args.phi_basis}", StateVector.basis(inst.psi_ref.layout, args.phi_basis)))
    results = [
        {"phi": name, "residual": claim_equivalence_residual(inst.psi_ref, phi, inst.mask)}
        for name, phi in cases
    ]
    max_res = max(r["residual"] for r in results)
    summary = {"a": a, "cases": len(results), "max_residual": max_res, "tolerance": EQUIV_TOL}
    echo = {"n": x.n, "x": x.bits, "y": y.bits, "phis": args.phis, "seed": args.seed,
            "phi_basis": args.phi_basis}
    return RunReport("verify-claim", echo, results, summary), EXIT_OK if max_res <= EQUIV_TOL else EXIT_VIOLATION


COMMANDS = {
    "encode": cmd_encode,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "certify-nogo": cmd_certify_nogo,
    "verify-claim": cmd_verify_claim,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = COMMANDS[args.command](args)
    except (UsageError, NogoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    fmt = args.format
    text = _format_table(report) if fmt == "table" else report.render(fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code
