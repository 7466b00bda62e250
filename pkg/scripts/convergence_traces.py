"""Per-iteration traces (objective and oracle violation of x_k and of the running average)."""

import argparse

from sipcsa.harness import ExperimentSpec, cmd_run

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=1000)
    ap.add_argument("--oracle-every", type=int, default=10)
    ap.add_argument("--out", default="results/traces")
    args = ap.parse_args()
    for label, sampler, M in [("adaptive", "adaptive", None), ("fixed_M10", "fixed", 10)]:
        spec = ExperimentSpec(sampler=sampler, M=M, c_g=0.35, c_e=0.001, N=args.N,
                              oracle_every=args.oracle_every, out=f"{args.out}/{label}")
        status, outcomes = cmd_run(spec)
        o = outcomes[0]
        print(f"{label}: f(x_bar)={o.f_xbar:.4f} G(x_bar)={o.G_xbar:.4f} |B|={o.B_size}")
