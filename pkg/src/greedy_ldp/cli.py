"""Command-line front end: ``greedy-ldp <command> [options]``.

Exit codes: 0 success, 1 verification or solver failure, 2 usage or domain
error, 3 resource limit. Data goes to stdout (or ``--out``), diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Optional, Sequence

import numpy as np

from greedy_ldp import discrete_el, oracle, ratefn, simulator, trajectory, verify
from greedy_ldp.errors import ConvergenceError, DomainError, ResourceLimitError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _num(v):
    """Plain Python scalar; non-finite floats become ``None``."""
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def _csv_cell(v):
    v = _num(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit(payload, fmt: str) -> str:
    """Serialise a flat object or a list of flat row objects.

    Floats are written in shortest round-trip form, so parsing the output
    gives back the same doubles.
    """
    if isinstance(payload, dict):
        payload = {k: _num(v) for k, v in payload.items()}
    else:
        payload = [{k: _num(v) for k, v in row.items()} for row in payload]
    if fmt == "json":
        return json.dumps(payload, allow_nan=False) + "\n"
    rows = [payload] if isinstance(payload, dict) else payload
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row.values()])
    return buf.getvalue()


def cmd_rate(args) -> Any:
    sol = ratefn.rate(args.c, args.s, args.tol)
    return {"c": sol.c, "s": sol.s, "s_c": sol.s_c, "a": sol.a, "b": sol.b,
            "rate": sol.rate, "side": sol.side}


def cmd_trajectory(args) -> Any:
    grid = trajectory.trajectory_grid(args.c, args.s, args.grid)
    s_c = ratefn.critical_fraction(args.c)
    rows = []
    for x, y, slope, ell in zip(grid.xs, grid.ys, grid.slopes, grid.costs):
        mean = trajectory.mean_trajectory(args.c, x) if x <= s_c else None
        rows.append({"x": x, "y": y, "slope": slope, "cost": ell, "mean_y": mean})
    return rows


def cmd_plot_data(args) -> Any:
    s_c = ratefn.critical_fraction(args.c)
    grid = np.union1d(np.linspace(0.01, 0.99, args.points), [s_c])
    return [{"s": s, "rate": ratefn.rate(args.c, s).rate} for s in grid]


def cmd_oracle(args) -> Any:
    if args.pmf == (args.s is not None):
        raise DomainError("give exactly one of --pmf or --s")
    dist = oracle.sg_distribution(args.n, args.c, max_n=args.max_n, allow_large=args.allow_large)
    if args.pmf:
        return [
            {"k": k, "probability": math.exp(lp), "log_probability": lp}
            for k, lp in enumerate(dist.absorbed_logp.tolist())
            if math.isfinite(lp)
        ]
    s_c = ratefn.critical_fraction(args.c)
    side = args.side or ("le" if args.s < s_c else "ge")
    value = oracle.tail_logprob(args.n, args.c, args.s, side, dist=dist)
    out = {"n": args.n, "c": args.c, "s": args.s, "side": side, "tail_logprob": value}
    if 0 < args.s < 1:
        out["rate"] = ratefn.rate(args.c, args.s).rate
    return out


def cmd_simulate(args) -> Any:
    results = simulator.run_samples(
        args.process, args.n, args.c, args.samples, args.seed, workers=args.workers
    )
    summary = simulator.empirical_stats(results)
    if args.dump:
        rows = [{"index": i, "seed": r.seed, "sg": r.sg} for i, r in enumerate(results)]
        with open(args.dump, "w") as fh:
            fh.write(emit(rows, "csv"))
    return {
        "process": args.process,
        "n": args.n,
        "c": args.c,
        "samples": args.samples,
        "seed": args.seed,
        "mean_fraction": summary.mean,
        "variance_fraction": summary.variance,
        "s_c": ratefn.critical_fraction(args.c),
    }


def cmd_el(args) -> Any:
    if args.ladder:
        target = ratefn.rate(args.c, args.s).rate
        rows, prev = [], None
        for m in args.ladder:
            sol = discrete_el.solve_bvp(args.c, args.s, m)
            err = float(np.abs(sol.ys - trajectory.optimal_trajectory(args.c, args.s, sol.xs)).max())
            rows.append({
                "m": m,
                "sup_error": err,
                "error_ratio": err / prev if prev else None,
                "action": sol.action,
                "rate": target,
                "action_error": sol.action - target,
            })
            prev = err
        return rows
    sol = discrete_el.solve_bvp(args.c, args.s, args.m)
    exact = trajectory.optimal_trajectory(args.c, args.s, sol.xs)
    ws = list(sol.ws) + [None]
    return [
        {"i": i, "x": x, "y": y, "w": w, "y_exact": e}
        for i, (x, y, w, e) in enumerate(zip(sol.xs, sol.ys, ws, exact))
    ]


def cmd_verify(args) -> int:
    results = verify.run_checks(args.check or None)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", file=args.stream)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAIL


def _ladder(text):
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greedy-ldp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, default_format="json"):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=("csv", "json"), default=default_format)
        p.add_argument("--out", help="write output here instead of stdout")
        return p

    p = add("rate", cmd_rate, "rate function and a, b at (c, s)")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--tol", type=float, default=ratefn.DEFAULT_TOL)

    p = add("trajectory", cmd_trajectory, "optimal trajectory table on [0, s]", "csv")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--grid", type=int, default=trajectory.DEFAULT_GRID_SIZE)

    p = add("plot-data", cmd_plot_data, "rate over an s-grid on (0.01, 0.99)", "csv")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--points", type=int, default=99)

    p = add("oracle", cmd_oracle, "exact finite-n law of S_g")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--pmf", action="store_true")
    p.add_argument("--s", type=float)
    p.add_argument("--side", choices=("le", "ge"))
    p.add_argument("--max-n", type=int, default=oracle.DEFAULT_MAX_N)
    p.add_argument("--allow-large", action="store_true")

    p = add("simulate", cmd_simulate, "Monte Carlo summary of S_g/n")
    p.add_argument("--process", choices=sorted(simulator.PROCESSES), default="chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, help=f"default: ${simulator.THREADS_ENV} or CPU count")
    p.add_argument("--dump", help="CSV file for per-sample (index, seed, sg)")

    p = add("el", cmd_el, "discrete Euler-Lagrange solution or convergence table", "csv")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--m", type=int, default=512)
    p.add_argument("--ladder", type=_ladder, help="comma-separated mesh counts, e.g. 128,256,512")

    p = sub.add_parser("verify", help="run the invariant checks")
    p.set_defaults(func=cmd_verify)
    p.add_argument("--check", action="append", choices=sorted(verify.CHECKS))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "verify":
            args.stream = sys.stdout
            return args.func(args)
        text = emit(args.func(args), args.format)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
