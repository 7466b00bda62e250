"""Seed-mean objective values for the adaptive and fixed-M samplers (N=1000, c_g=0.35, c_e=0.001)."""

import argparse

from sipcsa.harness import cmd_table1, default_jobs, format_table1

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--out", default="results/table1")
    ap.add_argument("--jobs", type=int, default=default_jobs())
    args = ap.parse_args()
    rows, f_star = cmd_table1(range(args.seeds), out=args.out, jobs=args.jobs)
    print(format_table1(rows, f_star))
