"""``revroute`` command line.

Exit status: 0 on success, 2 on bad input, 3 when a produced schedule fails
verification (or ``verify`` finds a failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import (CostModel, ScheduleError, apply_sequence, check_bits, check_permutation,
                   dumps_schedule, is_sorted, makespan)
from .experiments import (DEFAULT_N_GRID, fit_mu, fit_sigma, read_sweep_csv, sweep,
                          write_sweep_csv)
from .graph_algorithms import graph_center, parse_graph, route_sparse_general
from .oracle import ball_count, exhaustive_verify
from .path_algorithms import ALGORITHMS, atbs, route, tbs

EXIT_INPUT = 2
EXIT_VERIFY = 3


class VerificationFailure(Exception):
    pass


def format_cost(cost) -> str:
    if isinstance(cost, Fraction):
        return str(cost)
    return f"{float(cost):.12g}"


def _load_json_arg(value: str):
    """A JSON literal, or the name of a file holding one."""
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        pass
    path = Path(value)
    if not path.is_file():
        raise ValueError(f"{value!r} is neither JSON nor a readable file")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{value}: invalid JSON ({exc})") from None


def _load_perm(value: str) -> tuple[int, ...]:
    data = _load_json_arg(value)
    if not isinstance(data, list):
        raise ValueError("permutation must be a JSON list")
    return check_permutation(data)


def _emit_schedule(ops, cost, out: str | None) -> None:
    print(f"makespan {format_cost(cost)}")
    text = dumps_schedule(ops)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_route(args) -> int:
    perm = _load_perm(args.perm)
    ops = route(perm, args.algo, verify=False)
    if not is_sorted(apply_sequence(perm, ops)):
        raise VerificationFailure(f"{args.algo} schedule does not sort {list(perm)}")
    _emit_schedule(ops, makespan(ops, args.model, n=len(perm)), args.out)
    return 0


def cmd_sort_bits(args) -> int:
    bits = check_bits(args.bits.strip())
    ops = tbs(bits) if args.algo == "tbs" else atbs(bits)
    if list(apply_sequence(bits, ops)) != sorted(bits):
        raise VerificationFailure(f"{args.algo} did not sort {args.bits}")
    print(json.dumps([[op.lo, op.hi] for op in ops]))
    print(f"cost {format_cost(makespan(ops, args.model, n=max(1, len(bits))))}")
    return 0


def cmd_graph_route(args) -> int:
    g = parse_graph(args.graph)
    n = g.number_of_nodes()
    if args.perm is not None:
        perm = _load_perm(args.perm)
    elif args.movers is not None:
        if args.seed is None:
            raise ValueError("--movers draws a random arrangement and needs --seed")
        movers = _load_json_arg(args.movers)
        if not isinstance(movers, list) or len(set(movers)) != len(movers):
            raise ValueError("--movers must be a JSON list of distinct vertices")
        if any(not 0 <= int(v) < n for v in movers):
            raise ValueError("--movers names a vertex outside the graph")
        rng = np.random.default_rng(args.seed)
        perm = list(range(n))
        for src, dst in zip(movers, rng.permutation(movers)):
            perm[int(src)] = int(dst)
        perm = tuple(perm)
    else:
        raise ValueError("give --perm or --movers")
    center, _ = graph_center(g)
    try:
        ops = route_sparse_general(g, perm, verify=True, center=center)
    except ScheduleError as exc:
        raise VerificationFailure(str(exc)) from None
    _emit_schedule(ops, makespan(ops, args.model, n=n), args.out)
    return 0


def _parse_grid(text: str) -> list[int]:
    try:
        grid = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"bad --n-grid {text!r}") from None
    if not grid or any(n < 1 for n in grid):
        raise ValueError("--n-grid needs positive lengths")
    return grid


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.n_grid) if args.n_grid else list(DEFAULT_N_GRID)
    results = sweep(args.algo, grid, args.trials, args.seed, args.model)
    text = write_sweep_csv(results)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_fit(args) -> int:
    rows = read_sweep_csv(Path(args.csv).read_text())
    if args.algo:
        rows = [r for r in rows if r.algorithm == args.algo]
    algos = {r.algorithm for r in rows}
    if len(algos) > 1:
        raise ValueError(f"CSV mixes algorithms {sorted(algos)}; pick one with --algo")
    fit = (fit_mu if args.target == "mu" else fit_sigma)(rows)
    text = fit.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_verify(args) -> int:
    report = exhaustive_verify(args.n, args.algo, args.model, workers=args.workers)
    balls = []
    for m in range(2, min(args.n, args.phi_max_n) + 1):
        for k in range(1, m):
            b = ball_count(k, m)
            balls.append({"k": k, "n": m, "exact_count": b.exact_count, "phi": b.phi,
                          "ok": b.within_bound})
    out = json.loads(report.to_json())
    out["phi_checks"] = balls
    out["phi_ok"] = all(b["ok"] for b in balls)
    print(json.dumps(out))
    return 0 if report.all_correct and out["phi_ok"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="revroute", description="Reversal-based permutation routing.")
    sub = p.add_subparsers(dest="command", required=True)
    models = [m.value for m in CostModel]

    r = sub.add_parser("route", help="route a path permutation")
    r.add_argument("--perm", required=True, help="JSON list or file holding one")
    r.add_argument("--algo", choices=sorted(ALGORITHMS), default="gdc-tbs")
    r.add_argument("--model", choices=models, default="linear")
    r.add_argument("--out", help="write the schedule JSON here")
    r.set_defaults(func=cmd_route)

    b = sub.add_parser("sort-bits", help="sort a bit string with reversals")
    b.add_argument("--bits", required=True)
    b.add_argument("--algo", choices=["tbs", "atbs"], default="tbs")
    b.add_argument("--model", choices=models, default="linear")
    b.set_defaults(func=cmd_sort_bits)

    g = sub.add_parser("graph-route", help="route a sparse permutation on a graph")
    g.add_argument("--graph", required=True, help="grid:RxC or an edge-list file")
    g.add_argument("--perm", help="JSON list (or file) mapping vertex to destination")
    g.add_argument("--movers", help="JSON list of vertices to permute at random (needs --seed)")
    g.add_argument("--seed", type=int)
    g.add_argument("--model", choices=models, default="linear")
    g.add_argument("--out")
    g.set_defaults(func=cmd_graph_route)

    s = sub.add_parser("sweep", help="average makespan over random permutations")
    s.add_argument("--algo", choices=sorted(ALGORITHMS), required=True)
    s.add_argument("--n-grid", help="comma separated lengths")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--model", choices=models, default="linear")
    s.add_argument("--out", help="CSV file (default stdout)")
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fit", help="fit a n + b sqrt(n) + c to a sweep CSV")
    f.add_argument("--csv", required=True)
    f.add_argument("--target", choices=["mu", "sigma"], default="mu")
    f.add_argument("--algo")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit)

    v = sub.add_parser("verify", help="exhaustive correctness and ball-bound checks")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--algo", choices=sorted(ALGORITHMS), default="gdc-tbs")
    v.add_argument("--model", choices=models, default="linear")
    v.add_argument("--phi-max-n", type=int, default=8)
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
