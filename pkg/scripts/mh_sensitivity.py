"""Seed-mean objective of the adaptive sampler as the MH chain length varies."""

import argparse

from sipcsa.harness import cmd_mh_sensitivity, default_jobs

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--iterations", default="1,10,50,100,200,400")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--out", default="results/mh_sensitivity")
    ap.add_argument("--jobs", type=int, default=default_jobs())
    args = ap.parse_args()
    its = [int(v) for v in args.iterations.split(",")]
    for T, f_mean, gap in cmd_mh_sensitivity(its, range(args.seeds), out=args.out, jobs=args.jobs):
        print(f"{T:>5}  mean f(x_bar) = {f_mean:.4f}  relative gap = {100 * gap:+.2f}%")
