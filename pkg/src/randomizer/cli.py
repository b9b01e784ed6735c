"""Command-line workbench: sample channels, build and audit nets, certify, sweep, compute bounds.

Exit codes: 0 success, 1 usage error, 2 runtime/operation error. All
randomness flows from --seed; an omitted seed is generated and echoed in the
summary line so every run stays reconstructible.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

import numpy as np

from . import bounds as bounds_mod
from .certify import default_net_delta, verdict
from .channel import build_random_channel, random_pure_state
from .errors import RandomizerError
from .experiments import (
    SweepConfig,
    load_channel,
    load_net,
    parallel_map,
    resolve_threads,
    run_concentration_trial,
    run_randomizing_sweep,
    save_certificate,
    save_channel,
    save_net,
    write_concentration_csv,
    write_sweep_csv,
)
from .haar import RngStream
from .netcover import audit_covering, build_delta_net


def _resolve_stream(args) -> RngStream:
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
    return RngStream(int(seed))


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _cmd_sample_channel(args) -> int:
    stream = _resolve_stream(args)
    ch = build_random_channel(args.dim, args.count, stream)
    save_channel(args.out, ch)
    print(f"sample-channel: d={ch.dim} N={ch.count} seed={stream.seed} -> {args.out}")
    return 0


def _cmd_verify(args) -> int:
    stream = _resolve_stream(args)
    ch = load_channel(args.channel)
    if args.net is not None:
        net = load_net(args.net)
    else:
        delta = args.delta if args.delta is not None else default_net_delta(args.epsilon)
        net = build_delta_net(ch.dim, delta, stream.child(0), stop_k=args.stop_k,
                              max_states=args.max_net_states)
    cert = verdict(ch, args.epsilon, net, restarts=args.restarts, tol=args.tol,
                   max_iters=args.max_iters, rng=stream.child(1))
    if args.report is not None:
        save_certificate(args.report, cert)
    destination = f" -> {args.report}" if args.report is not None else ""
    print(
        f"verify: verdict={cert.verdict.value} epsilon={cert.epsilon} d={ch.dim} N={ch.count} "
        f"delta={cert.delta} B={cert.B:.6g} A_upper={cert.A_upper:.6g} "
        f"A_lower={cert.A_lower:.6g} net_size={cert.net_size} seed={stream.seed}{destination}"
    )
    return 0


def _cmd_net(args) -> int:
    stream = _resolve_stream(args)
    net = build_delta_net(args.dim, args.delta, stream, stop_k=args.stop_k,
                          max_states=args.max_states)
    save_net(args.out, net)
    print(
        f"net: d={net.dim} delta={net.delta} size={net.size} "
        f"stopped_by={net.provenance.get('stopped_by')} seed={stream.seed} -> {args.out}"
    )
    return 0


def _cmd_audit_net(args) -> int:
    stream = _resolve_stream(args)
    net = load_net(args.net)
    report = audit_covering(net, args.trials, stream)
    if args.report is not None:
        payload = {"dim": report.dim, "delta": report.delta, "trials": report.trials,
                   "max_gap": report.max_gap, "failures": report.failures,
                   "seed": stream.seed}
        with open(args.report, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, separators=(",", ":"), sort_keys=True)
            handle.write("\n")
    print(
        f"audit-net: size={net.size} delta={net.delta} trials={report.trials} "
        f"max_gap={report.max_gap:.6f} failures={report.failures} seed={stream.seed}"
    )
    return 0


def _cmd_concentration(args) -> int:
    stream = _resolve_stream(args)
    d = args.dim
    if args.random_pair:
        phi = random_pure_state(d, stream.child(10))
        psi = random_pure_state(d, stream.child(11))
    else:
        phi = np.zeros(d, dtype=complex)
        phi[0] = 1.0
        psi = phi.copy()
    cells = [(n, delta) for n in args.counts for delta in args.deltas]
    threads = resolve_threads(args.threads)

    reports = parallel_map(
        lambda ic: run_concentration_trial(d, ic[1][0], ic[1][1], args.trials,
                                           phi, psi, stream.child(ic[0])),
        list(enumerate(cells)),
        threads=threads,
    )
    if args.out is not None:
        write_concentration_csv(args.out, reports)
    worst = max((r.empirical_tail - r.bound for r in reports), default=0.0)
    vacuous = sum(1 for r in reports if r.vacuous)
    destination = f" -> {args.out}" if args.out is not None else ""
    print(
        f"concentration: d={d} cells={len(reports)} trials={args.trials} "
        f"max(tail-bound)={worst:.3e} vacuous={vacuous} seed={stream.seed}{destination}"
    )
    return 0


def _cmd_sweep(args) -> int:
    stream = _resolve_stream(args)
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                raw = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read sweep config: {exc}", file=sys.stderr)
            return 2
        grid = SweepConfig(
            dims=tuple(int(v) for v in raw["dims"]),
            epsilons=tuple(float(v) for v in raw["epsilons"]),
            counts=tuple(int(v) for v in raw["counts"]),
            channels_per_cell=int(raw.get("channels_per_cell", 20)),
            delta=raw.get("delta"),
            stop_k=raw.get("stop_k"),
            max_net_states=raw.get("max_net_states"),
            restarts=int(raw.get("restarts", 32)),
            tol=float(raw.get("tol", 1e-10)),
            max_iters=int(raw.get("max_iters", 500)),
        )
    else:
        grid = SweepConfig(
            dims=tuple(args.dims), epsilons=tuple(args.epsilons), counts=tuple(args.counts),
            channels_per_cell=args.channels, delta=args.delta, stop_k=args.stop_k,
            max_net_states=args.max_net_states, restarts=args.restarts, tol=args.tol,
            max_iters=args.max_iters,
        )
    report = run_randomizing_sweep(grid, stream, threads=resolve_threads(args.threads))
    if args.out is not None:
        write_sweep_csv(args.out, report)
    skipped = sum(1 for c in report.cells if c.skipped)
    destination = f" -> {args.out}" if args.out is not None else ""
    print(
        f"sweep: cells={len(report.cells)} skipped={skipped} "
        f"channels_per_cell={grid.channels_per_cell} seed={stream.seed}{destination}"
    )
    return 0


def _cmd_bounds(args) -> int:
    consts = bounds_mod.BoundConstants(c=args.constant_c, C=args.constant_big_c)
    required = bounds_mod.required_N(args.dim, args.epsilon, consts)
    minimal = bounds_mod.min_N_for_success(args.dim, args.epsilon, consts)
    payload = {
        "d": args.dim,
        "epsilon": args.epsilon,
        "c": consts.c,
        "C": consts.C,
        "required_N": required,
        "min_N_for_success": minimal,
        "failure_log_bound_at_required_N": bounds_mod.failure_log_bound(
            args.dim, args.epsilon, required, consts),
    }
    print(json.dumps(payload, separators=(",", ":"), sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randomizer",
        description="Random unitary mixing channels and epsilon-randomizing certification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None,
                       help="base seed; omitted: generated and echoed in the summary")

    def add_threads(p):
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: RANDOMIZER_THREADS or all cores)")

    p = sub.add_parser("sample-channel", help="sample a Haar random unitary channel")
    p.add_argument("--dim", type=int, required=True, help="Hilbert space dimension d")
    p.add_argument("--count", type=int, required=True, help="number of unitaries N")
    p.add_argument("--out", required=True, help="output channel JSON path")
    add_seed(p)
    p.set_defaults(func=_cmd_sample_channel)

    p = sub.add_parser("verify", help="certify or refute the epsilon-randomizing property")
    p.add_argument("--channel", required=True, help="channel JSON path")
    p.add_argument("--epsilon", type=float, required=True, help="target epsilon in (0, 1)")
    p.add_argument("--delta", type=float, default=None,
                   help="net radius (default: epsilon/(3+2 epsilon))")
    p.add_argument("--net", default=None, help="use a prebuilt net JSON instead of building one")
    p.add_argument("--stop-k", dest="stop_k", type=int, default=None,
                   help="stop after this many consecutive rejections when building the net")
    p.add_argument("--max-net-states", dest="max_net_states", type=int, default=None,
                   help="size budget for the net; waives the feasibility guard")
    p.add_argument("--restarts", type=int, default=32, help="optimizer restarts")
    p.add_argument("--tol", type=float, default=1e-10, help="optimizer convergence tolerance")
    p.add_argument("--max-iters", dest="max_iters", type=int, default=500,
                   help="optimizer iteration cap")
    p.add_argument("--report", default=None, help="certificate JSON output path")
    add_seed(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("net", help="build a delta-net of pure states")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--delta", type=float, required=True, help="covering radius in (0, 2)")
    p.add_argument("--stop-k", dest="stop_k", type=int, default=None)
    p.add_argument("--max-states", dest="max_states", type=int, default=None,
                   help="size budget; waives the feasibility guard")
    p.add_argument("--out", required=True, help="output net JSON path")
    add_seed(p)
    p.set_defaults(func=_cmd_net)

    p = sub.add_parser("audit-net", help="Monte Carlo audit of a net's covering radius")
    p.add_argument("--net", required=True, help="net JSON path")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--report", default=None, help="optional JSON report path")
    add_seed(p)
    p.set_defaults(func=_cmd_audit_net)

    p = sub.add_parser("concentration", help="empirical tail of the pair statistic vs its bound")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--counts", type=_int_list, required=True,
                   help="comma-separated N values, one cell per (N, delta)")
    p.add_argument("--deltas", type=_float_list, required=True,
                   help="comma-separated delta values in (0, 1)")
    p.add_argument("--trials", type=int, default=10_000, help="channels per cell")
    p.add_argument("--random-pair", dest="random_pair", action="store_true",
                   help="use one Haar-random state pair instead of (e1, e1)")
    p.add_argument("--out", default=None, help="CSV output path")
    add_seed(p)
    add_threads(p)
    p.set_defaults(func=_cmd_concentration)

    p = sub.add_parser("sweep", help="verdict fractions over a (d, epsilon, N) grid")
    p.add_argument("--config", default=None, help="sweep grid JSON file (overrides grid flags)")
    p.add_argument("--dims", type=_int_list, default=[2], help="comma-separated dimensions")
    p.add_argument("--epsilons", type=_float_list, default=[0.5],
                   help="comma-separated epsilon values")
    p.add_argument("--counts", type=_int_list, default=[64], help="comma-separated N values")
    p.add_argument("--channels", type=int, default=20, help="channels per cell")
    p.add_argument("--delta", type=float, default=None,
                   help="net radius override (default: per-cell epsilon/(3+2 epsilon))")
    p.add_argument("--stop-k", dest="stop_k", type=int, default=None)
    p.add_argument("--max-net-states", dest="max_net_states", type=int, default=None)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=500)
    p.add_argument("--out", default=None, help="CSV output path")
    add_seed(p)
    add_threads(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bounds", help="closed-form sample-size and failure-probability numbers")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--constant-c", dest="constant_c", type=float,
                   default=bounds_mod.DEFAULT_CONSTANTS.c,
                   help="concentration exponent constant c")
    p.add_argument("--constant-C", dest="constant_big_c", type=float,
                   default=bounds_mod.DEFAULT_CONSTANTS.C,
                   help="sample-size prefactor constant C")
    p.set_defaults(func=_cmd_bounds)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except RandomizerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
