"""Command line entry point: ``sipcsa {run,table1,rates,mh-sensitivity}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .core import InvalidInputError, PolicyInfeasibleError
from .harness import (POLICIES, ExperimentSpec, cmd_mh_sensitivity, cmd_rates, cmd_run,
                      cmd_table1, format_table1, loglog_slope)
from .problems import PROBLEMS


def _int_list(text: str) -> list:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return vals


def _sample_count(text: str):
    if text == "theory":
        return None
    try:
        M = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--M takes a positive integer or 'theory'")
    if M < 1:
        raise argparse.ArgumentTypeError("--M must be >= 1")
    return M


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sipcsa", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seeds="0"):
        sp.add_argument("--seeds", type=_int_list, default=_int_list(seeds))
        sp.add_argument("--out", default=None, help="output directory for CSV files")
        sp.add_argument("--jobs", type=_positive_int, default=1,
                        help="worker processes for the seed sweep")

    run = sub.add_parser("run", help="run one configuration over several seeds")
    run.add_argument("--problem", choices=PROBLEMS, default="robust-lp")
    run.add_argument("--policy", choices=sorted(POLICIES), default="convex")
    run.add_argument("--sampler", choices=("fixed", "adaptive", "grid"), default="adaptive")
    run.add_argument("--M", type=_sample_count, default=10)
    run.add_argument("--mh-iters", type=_positive_int, default=200)
    run.add_argument("--grid-points", type=int, default=101)
    run.add_argument("--N", type=_positive_int, default=1000)
    run.add_argument("--cg", type=float, default=1.0)
    run.add_argument("--ce", type=float, default=1.0)
    run.add_argument("--oracle-every", type=int, default=0)
    run.add_argument("--record-time", action="store_true",
                     help="fill the wall_time column (makes summary.csv non-reproducible)")
    common(run)

    t1 = sub.add_parser("table1", help="adaptive vs fixed-M sampler comparison on the robust LP")
    t1.add_argument("--N", type=_positive_int, default=1000)
    common(t1, seeds="0,1,2,3,4,5,6,7,8,9")

    rates = sub.add_parser("rates", help="optimality gap / violation against N")
    rates.add_argument("--problem", choices=PROBLEMS, default="robust-lp")
    rates.add_argument("--policy", choices=sorted(POLICIES), default="convex")
    rates.add_argument("--sampler", choices=("fixed", "adaptive", "grid"), default="grid")
    rates.add_argument("--M", type=_sample_count, default=None)
    rates.add_argument("--mh-iters", type=_positive_int, default=200)
    rates.add_argument("--grid-points", type=int, default=101)
    rates.add_argument("--N-list", type=_int_list, default=_int_list("100,1000,10000"))
    common(rates)

    mh = sub.add_parser("mh-sensitivity", help="objective against the MH chain length")
    mh.add_argument("--iterations", type=_int_list, default=_int_list("1,10,50,100,200,400"))
    mh.add_argument("--N", type=_positive_int, default=1000)
    common(mh, seeds="0,1,2,3,4,5,6,7,8,9")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            spec = ExperimentSpec(problem=args.problem, policy=args.policy, c_g=args.cg,
                                  c_e=args.ce, sampler=args.sampler, M=args.M,
                                  mh_iterations=args.mh_iters, grid_points=args.grid_points,
                                  N=args.N, seeds=tuple(args.seeds),
                                  oracle_every=args.oracle_every, out=args.out,
                                  record_time=args.record_time)
            status, outcomes = cmd_run(spec, jobs=args.jobs)
            for o in outcomes:
                print(f"seed={o.seed} status={o.status} f(x_bar)={o.f_xbar} "
                      f"G(x_bar)={o.G_xbar} |B|={o.B_size}")
            return status
        if args.command == "table1":
            rows, f_star = cmd_table1(args.seeds, out=args.out, N=args.N, jobs=args.jobs)
            print(format_table1(rows, f_star))
            return 0
        if args.command == "rates":
            rows = cmd_rates(args.problem, args.policy, args.sampler, args.N_list, args.seeds,
                             out=args.out, M=args.M, mh_iterations=args.mh_iters,
                             grid=args.grid_points, jobs=args.jobs)
            print("N,mean_gap,mean_violation,gap_bound,violation_bound")
            for r in rows:
                print(f"{r.N},{r.mean_gap!r},{r.mean_violation!r},{r.gap_bound!r},"
                      f"{r.violation_bound!r}")
            if len(rows) > 1:
                Ns = [r.N for r in rows]
                viols = [r.mean_violation for r in rows]
                if all(v > 0 for v in viols):
                    print(f"log-log slope of violation: {loglog_slope(Ns, viols):.3f}")
            return 0
        rows = cmd_mh_sensitivity(args.iterations, args.seeds, out=args.out, N=args.N,
                                  jobs=args.jobs)
        for T, f_mean, gap in rows:
            print(f"mh_iterations={T} mean f(x_bar)={f_mean:.4f} relative gap={100 * gap:.2f}%")
        return 0
    except (InvalidInputError, PolicyInfeasibleError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
