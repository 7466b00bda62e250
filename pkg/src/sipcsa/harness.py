"""Experiment runner: traces, summaries, the sampler comparison, rate sweeps and MH sensitivity.

Every output is CSV with a header row. Floats are written with ``repr`` so files are
locale independent and round-trip exactly.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import InvalidInputError
from .cutgen import (AdaptiveSampler, AdaptiveSamplerConfig, FixedSampler, FixedSamplerConfig,
                     GridCut, grid_points, _grid_max)
from .engine import (GENERAL_CONVEX, STRONGLY_CONVEX, EmptyBError, PolicySchedule, RunResult,
                     csa_run)
from .problems import get_problem, robust_lp_optimum

log = logging.getLogger(__name__)

POLICIES = {"convex": GENERAL_CONVEX, "strongly-convex": STRONGLY_CONVEX}
TRACE_COLUMNS = ["k", "branch", "gamma_k", "eta_k", "sampled_value", "f_xk", "oracle_G_xk",
                 "f_xbar_running", "oracle_G_xbar_running"]
SUMMARY_COLUMNS = ["seed", "status", "f_xbar", "oracle_G_xbar", "B_size", "wall_time"]

TABLE1_N = 1000
TABLE1_CG = 0.35
TABLE1_CE = 0.001
TABLE1_FIXED_M = (10, 20, 50, 100)


@dataclass
class ExperimentSpec:
    problem: str = "robust-lp"
    policy: str = "convex"
    c_g: float = 1.0
    c_e: float = 1.0
    sampler: str = "adaptive"  # adaptive | fixed | grid
    M: Optional[int] = 10  # fixed sampler; None = theoretical schedule
    mh_iterations: int = 200
    grid_points: int = 101
    N: int = 1000
    seeds: Sequence[int] = (0,)
    oracle_every: int = 0
    out: Optional[str] = None
    record_time: bool = False

    def __post_init__(self):
        if not self.seeds:
            raise InvalidInputError("seeds must be nonempty")
        if self.N < 1:
            raise InvalidInputError("N must be >= 1")
        if self.policy not in POLICIES:
            raise InvalidInputError(f"policy must be one of {sorted(POLICIES)}")
        if self.sampler not in ("adaptive", "fixed", "grid"):
            raise InvalidInputError("sampler must be adaptive, fixed or grid")
        if self.oracle_every < 0:
            raise InvalidInputError("oracle_every must be >= 0")

    def backend(self):
        if self.sampler == "adaptive":
            return AdaptiveSampler(AdaptiveSamplerConfig(mh_iterations=self.mh_iterations))
        if self.sampler == "fixed":
            return FixedSampler(FixedSamplerConfig(constant_M=self.M))
        return GridCut(self.grid_points)


@dataclass
class SeedOutcome:
    seed: int
    status: str
    f_xbar: Optional[float]
    G_xbar: Optional[float]
    B_size: int
    wall_time: float
    G_tolerance: Optional[float] = None
    trace_rows: list = field(default_factory=list, repr=False)
    min_cut_error: Optional[float] = None  # min over k of G(x_k) - sampled value


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _trace_rows(problem, result: RunResult, spec: ExperimentSpec, o_grid):
    """One row per iteration; the running average uses the horizon-k window s(k)."""
    rows = []
    kind = POLICIES[spec.policy]
    cum_wx = np.zeros(problem.decision_set.dim)
    cum_w = 0.0
    pref_wx, pref_w = [cum_wx.copy()], [0.0]
    for r in result.trace:
        cum_wx = cum_wx + r.weight * r.x_k
        cum_w += r.weight
        pref_wx.append(cum_wx.copy())
        pref_w.append(cum_w)
    for r in result.trace:
        k = r.k
        s_k = math.ceil(k / 2) if kind == GENERAL_CONVEX else 1
        w = pref_w[k] - pref_w[s_k - 1]
        f_run = G_run = None
        if w > 0:
            x_run = (pref_wx[k] - pref_wx[s_k - 1]) / w
            f_run = problem.f(x_run)
            if r.oracle_G is not None:
                G_run = _grid_max(problem, x_run, *o_grid).value
        rows.append([k, r.branch == "B", r.gamma_k, r.eta_k, r.sampled_value,
                     problem.f(r.x_k), r.oracle_G, f_run, G_run])
    return rows


def run_seed(spec: ExperimentSpec, seed: int, keep_trace: bool = True,
             check_cut_error: bool = False) -> SeedOutcome:
    problem, _, _ = get_problem(spec.problem)
    schedule = PolicySchedule(POLICIES[spec.policy], problem.constants, spec.N, spec.c_g, spec.c_e)
    o_grid = grid_points(problem.index_set, spec.grid_points)
    t0 = time.perf_counter()
    try:
        result = csa_run(problem, schedule, spec.backend(), rng_seed=seed,
                         oracle_every=spec.oracle_every or None, oracle_points=spec.grid_points)
    except EmptyBError as err:
        result = err.result
        wall = time.perf_counter() - t0
        log.warning("seed %d: B is empty", seed)
        rows = _trace_rows(problem, result, spec, o_grid) if keep_trace else []
        return SeedOutcome(seed, "empty_B", None, None, 0, wall, trace_rows=rows)
    wall = time.perf_counter() - t0
    final = _grid_max(problem, result.x_bar, *o_grid)
    out = SeedOutcome(seed, "ok", result.f_of_x_bar, final.value, result.B_size, wall,
                      G_tolerance=final.tolerance)
    if keep_trace:
        out.trace_rows = _trace_rows(problem, result, spec, o_grid)
    if check_cut_error:
        out.min_cut_error = min(_grid_max(problem, r.x_k, *o_grid).value - r.sampled_value
                                for r in result.trace)
    return out


def _run_seeds(spec: ExperimentSpec, jobs: int = 1, **kw) -> list:
    seeds = list(spec.seeds)
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futures = [ex.submit(run_seed, spec, s, **kw) for s in seeds]
            return [f.result() for f in futures]
    return [run_seed(spec, s, **kw) for s in seeds]


def cmd_run(spec: ExperimentSpec, jobs: int = 1) -> tuple[int, list]:
    """Write ``trace_seed<k>.csv`` per seed and ``summary.csv``.

    Returns ``(exit_status, outcomes)``; the status is 1 only when every seed failed.
    """
    outcomes = _run_seeds(spec, jobs)
    if spec.out:
        out = Path(spec.out)
        for o in outcomes:
            _write_csv(out / f"trace_seed{o.seed}.csv", TRACE_COLUMNS, o.trace_rows)
        _write_csv(out / "summary.csv", SUMMARY_COLUMNS,
                   [[o.seed, o.status, o.f_xbar, o.G_xbar, o.B_size,
                     o.wall_time if spec.record_time else None] for o in outcomes])
    status = 1 if all(o.status != "ok" for o in outcomes) else 0
    return status, outcomes


def seed_mean(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else math.nan


def relative_gap(f_value: float, f_star: float) -> float:
    return (f_value - f_star) / abs(f_star)


def table1_specs(seeds, N: int = TABLE1_N, mh_iterations: int = 200):
    base = ExperimentSpec(problem="robust-lp", policy="convex", c_g=TABLE1_CG, c_e=TABLE1_CE,
                          N=N, seeds=tuple(seeds))
    specs = [("adaptive", replace(base, sampler="adaptive", mh_iterations=mh_iterations))]
    specs += [(f"M={M}", replace(base, sampler="fixed", M=M)) for M in TABLE1_FIXED_M]
    return specs


def cmd_table1(seeds, out: Optional[str] = None, N: int = TABLE1_N, jobs: int = 1):
    """Seed-mean objective and relative gap for the adaptive sampler and fixed M in {10, 20, 50, 100}."""
    _, f_star = robust_lp_optimum()
    rows = []
    for label, spec in table1_specs(seeds, N):
        outcomes = _run_seeds(spec, jobs, keep_trace=False)
        f_mean = seed_mean(o.f_xbar for o in outcomes)
        failed = sum(o.status != "ok" for o in outcomes)
        rows.append([label, f_mean, relative_gap(f_mean, f_star), len(outcomes) - failed, failed])
    if out:
        _write_csv(Path(out) / "table1.csv",
                   ["config", "mean_f_xbar", "relative_gap", "n_ok", "n_empty_B"], rows)
    return rows, f_star


def format_table1(rows, f_star: float) -> str:
    labels = ["Adaptive"] + [r[0].replace("M=", "M_k=") for r in rows[1:]] + ["Optimal value"]
    objs = [f"{r[1]:.3f}" for r in rows] + [f"{f_star:.3f}"]
    gaps = [f"{100 * r[2]:.1f}%" for r in rows] + ["-"]
    width = max(len(s) for s in labels + objs + gaps) + 2
    line = lambda name, cells: f"{name:<18}" + "".join(f"{c:>{width}}" for c in cells)
    return "\n".join([line("", labels), line("Objective values", objs),
                      line("Relative gaps", gaps)])


def theoretical_bounds(problem, schedule: PolicySchedule) -> tuple[float, float]:
    """(optimality-gap bound, constraint-violation bound) for exact cut generation."""
    c = problem.constants
    N = schedule.N
    if schedule.kind == GENERAL_CONVEX:
        base = c.D_X * (c.L_f + c.L_gX) / math.sqrt(N)
        return 6 * base, 12 * base
    fac = schedule.strong_factor
    return 8 * c.L_prox / (N + 1) * fac, 8 * c.L_prox / N * fac


def sampled_violation_bound(problem, schedule: PolicySchedule) -> float:
    """Expected-violation bound when the cuts come from a sampler with the policy's epsilon_k."""
    c = problem.constants
    N = schedule.N
    if schedule.kind == GENERAL_CONVEX:
        return 14 * c.D_X * (c.L_f + c.L_gX) / math.sqrt(N)
    return 9 * c.L_prox / N * schedule.strong_factor


@dataclass
class RateRow:
    N: int
    mean_gap: float
    mean_violation: float
    gap_bound: float
    violation_bound: float
    se_gap: float
    se_violation: float
    n_ok: int
    oracle_tolerance: float
    min_cut_error: float


def cmd_rates(problem: str, policy: str, sampler: str, N_list, seeds, out: Optional[str] = None,
              M: Optional[int] = None, mh_iterations: int = 200, grid: int = 101,
              jobs: int = 1) -> list:
    """Seed-mean optimality gap and oracle violation per N, next to the a-priori bounds.

    The violation bound is the exact-cut one for the grid backend and the
    in-expectation one for the samplers.
    """
    prob, _, f_star = get_problem(problem)
    rows = []
    for N in N_list:
        spec = ExperimentSpec(problem=problem, policy=policy, sampler=sampler, M=M,
                              mh_iterations=mh_iterations, grid_points=grid, N=N,
                              seeds=tuple(seeds))
        outcomes = [o for o in _run_seeds(spec, jobs, keep_trace=False, check_cut_error=True)
                    if o.status == "ok"]
        schedule = PolicySchedule(POLICIES[policy], prob.constants, N)
        gap_bound, viol_bound = theoretical_bounds(prob, schedule)
        if sampler != "grid":
            viol_bound = sampled_violation_bound(prob, schedule)
        gaps = np.array([o.f_xbar - f_star for o in outcomes])
        viols = np.array([o.G_xbar for o in outcomes])
        se = lambda a: float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else 0.0
        rows.append(RateRow(N, float(gaps.mean()), float(viols.mean()), gap_bound, viol_bound,
                            se(gaps), se(viols), len(outcomes),
                            max(o.G_tolerance for o in outcomes),
                            min(o.min_cut_error for o in outcomes)))
    if out:
        _write_csv(Path(out) / "rates.csv",
                   ["N", "mean_gap", "mean_violation", "gap_bound", "violation_bound",
                    "se_gap", "se_violation", "n_ok", "oracle_tolerance", "min_cut_error"],
                   [[r.N, r.mean_gap, r.mean_violation, r.gap_bound, r.violation_bound,
                     r.se_gap, r.se_violation, r.n_ok, r.oracle_tolerance, r.min_cut_error]
                    for r in rows])
    return rows


def loglog_slope(N_list, values) -> float:
    """Least-squares slope of log(values) against log(N)."""
    x = np.log(np.asarray(N_list, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def cmd_mh_sensitivity(iterations_list, seeds, out: Optional[str] = None, N: int = TABLE1_N,
                       jobs: int = 1) -> list:
    _, f_star = robust_lp_optimum()
    rows = []
    for T in iterations_list:
        (_, spec), = table1_specs(seeds, N, mh_iterations=T)[:1]
        outcomes = _run_seeds(spec, jobs, keep_trace=False)
        f_mean = seed_mean(o.f_xbar for o in outcomes)
        rows.append([T, f_mean, relative_gap(f_mean, f_star)])
    if out:
        _write_csv(Path(out) / "mh_sensitivity.csv",
                   ["mh_iterations", "mean_f_xbar", "relative_gap"], rows)
    return rows


def default_jobs() -> int:
    return max(1, min(os.cpu_count() or 1, 8))
