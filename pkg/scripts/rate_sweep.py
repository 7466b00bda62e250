"""Optimality gap and oracle violation against N for both policies, with least-squares slopes."""

import argparse

from sipcsa.harness import cmd_rates, default_jobs, loglog_slope

CONFIGS = [("robust-lp", "convex", "grid"), ("strongly-convex", "strongly-convex", "adaptive")]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N-list", default="100,1000,10000")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--out", default="results/rates")
    ap.add_argument("--jobs", type=int, default=default_jobs())
    args = ap.parse_args()
    Ns = [int(v) for v in args.N_list.split(",")]
    for problem, policy, sampler in CONFIGS:
        seeds = (0,) if sampler == "grid" else range(args.seeds)
        rows = cmd_rates(problem, policy, sampler, Ns, seeds,
                         out=f"{args.out}/{problem}", jobs=args.jobs)
        print(f"\n{problem} / {policy} / {sampler}")
        print(f"{'N':>7} {'gap':>12} {'gap bound':>12} {'G(x_bar)':>12} {'G bound':>12}")
        for r in rows:
            print(f"{r.N:>7} {r.mean_gap:>12.5f} {r.gap_bound:>12.5f} "
                  f"{r.mean_violation:>12.5f} {r.violation_bound:>12.5f}")
        print(f"slope |gap|: {loglog_slope(Ns, [abs(r.mean_gap) for r in rows]):.3f}, "
              f"slope G(x_bar): {loglog_slope(Ns, [max(r.mean_violation, 1e-300) for r in rows]):.3f}")
