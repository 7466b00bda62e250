"""Inexact cooperative stochastic approximation (CSA) for SIP."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import InvalidInputError, ProblemConstants, SipProblem, prox_map
from .cutgen import GridCut, grid_points, _grid_max

GENERAL_CONVEX = "general_convex"
STRONGLY_CONVEX = "strongly_convex"
OBJECTIVE, CONSTRAINT = "objective", "constraint"


class InvalidPolicyError(ValueError):
    pass


class EmptyBError(RuntimeError):
    """No objective step with k >= s: the averaged output is undefined.

    Carries the partial result (``x_bar`` is None) for diagnosis.
    """

    def __init__(self, message: str, result: "RunResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class PolicySchedule:
    """Step-size / tolerance policy.

    ``general_convex``: eta_k = 6 (L_f + L_gX) D_X / sqrt(k), gamma_k = D_X / (sqrt(k) (L_f + L_gX)),
    s = ceil(N / 2).  ``strongly_convex``: constant eta, gamma_k = 2 L / (mu (k + 1)) with the
    modulus of the branch actually taken, s = 1.  ``scale_gamma`` and ``scale_eta`` multiply
    gamma_k and eta_k only.
    """

    kind: str
    constants: ProblemConstants
    N: int
    scale_gamma: float = 1.0
    scale_eta: float = 1.0

    def __post_init__(self):
        if self.kind not in (GENERAL_CONVEX, STRONGLY_CONVEX):
            raise InvalidPolicyError(f"unknown policy kind {self.kind!r}")
        if self.N < 1:
            raise InvalidInputError("N must be >= 1")
        if not (self.scale_gamma > 0 and self.scale_eta > 0):
            raise InvalidInputError("scaling factors must be positive")
        c = self.constants
        if self.kind == STRONGLY_CONVEX and not (c.mu_f > 0 and c.mu_g > 0 and c.L_prox > 0):
            raise InvalidPolicyError("strongly convex policy needs mu_f > 0, mu_g > 0, L_prox > 0")

    @property
    def s(self) -> int:
        return math.ceil(self.N / 2) if self.kind == GENERAL_CONVEX else 1

    @property
    def strong_factor(self) -> float:
        """max(mu_f, mu_g) * max(L_f^2 / mu_f^2, L_gX^2 / mu_g^2)."""
        c = self.constants
        return max(c.mu_f, c.mu_g) * max(c.L_f ** 2 / c.mu_f ** 2, c.L_gX ** 2 / c.mu_g ** 2)

    def mu(self, branch: str) -> float:
        return self.constants.mu_f if branch == OBJECTIVE else self.constants.mu_g


def policy_params(schedule: PolicySchedule, k: int, branch_hint: str = OBJECTIVE):
    """Return ``(gamma_k, eta_k, epsilon_k, s)``; gamma/eta include the scaling factors."""
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    c = schedule.constants
    if schedule.kind == GENERAL_CONVEX:
        Lsum = c.L_f + c.L_gX
        eta = 6 * Lsum * c.D_X / math.sqrt(k)
        gamma = c.D_X / (math.sqrt(k) * Lsum)
        eps = Lsum * c.D_X / math.sqrt(k)
    else:
        if not (c.mu_f > 0 and c.mu_g > 0):
            raise InvalidPolicyError("strongly convex policy needs mu_f, mu_g > 0")
        L, N = c.L_prox, schedule.N
        eta = 8 * L / N * schedule.strong_factor
        gamma = 2 * L / (schedule.mu(branch_hint) * (k + 1))
        eps = L / N * schedule.strong_factor
    return schedule.scale_gamma * gamma, schedule.scale_eta * eta, eps, schedule.s


class RhoRecursion:
    """a_k = mu gamma_k / L,  A_1 = 1,  A_k = (1 - a_k) A_{k-1},  rho_k = gamma_k / A_k."""

    def __init__(self, schedule: PolicySchedule):
        if schedule.kind != STRONGLY_CONVEX:
            raise InvalidPolicyError("rho weights are defined for the strongly convex policy only")
        self.schedule = schedule
        self.k = 0
        self.A = 1.0
        self.a = None

    def step(self, gamma: float, branch: str) -> float:
        self.k += 1
        self.a = self.schedule.mu(branch) * gamma / self.schedule.constants.L_prox
        if self.k > 1:
            self.A = (1.0 - self.a) * self.A
            if not self.A > 0:
                raise InvalidPolicyError(f"A_k became nonpositive at k={self.k} (a_k={self.a})")
        return gamma / self.A


def rho_weights(schedule: PolicySchedule, steps) -> np.ndarray:
    """rho_k for each ``(gamma_k, branch)`` pair (or IterationRecord) in order."""
    rec = RhoRecursion(schedule)
    out = []
    for st in steps:
        if isinstance(st, IterationRecord):
            gamma, branch = st.gamma_k, OBJECTIVE if st.branch == "B" else CONSTRAINT
        else:
            gamma, branch = st
        out.append(rec.step(gamma, branch))
    return np.array(out)


@dataclass(frozen=True)
class IterationRecord:
    k: int
    branch: str  # "B" objective step, "N" constraint step
    gamma_k: float
    eta_k: float
    epsilon_k: float
    sampled_value: float
    delta_k: np.ndarray
    weight: float
    x_k: np.ndarray
    samples_used: int = 0
    oracle_G: Optional[float] = None


@dataclass
class RunResult:
    x_bar: Optional[np.ndarray]
    trace: list
    B_size: int
    f_of_x_bar: Optional[float]
    s: int
    G_of_x_bar_oracle: Optional[float] = None
    oracle_tolerance: Optional[float] = None
    metadata: dict = field(default_factory=dict)


def weighted_average(records, s: int) -> np.ndarray:
    num, den = None, 0.0
    for r in records:
        if r.k >= s and r.branch == "B" and r.weight > 0:
            num = r.weight * r.x_k if num is None else num + r.weight * r.x_k
            den += r.weight
    if num is None:
        raise EmptyBError(f"no objective steps with k >= {s}",
                          RunResult(None, list(records), 0, None, s))
    return num / den


def csa_run(problem: SipProblem, schedule: PolicySchedule, cut_backend, N: Optional[int] = None,
            x1=None, rng_seed: int = 0, oracle_every: Optional[int] = None,
            oracle_points: int = 101) -> RunResult:
    """Run N iterations of inexact CSA and return the weighted average of the B-iterates.

    Per iteration: draw delta_k from the backend (tolerance epsilon_k), compare the
    sampled value with eta_k, pick gamma_k for the branch taken, then
    x_{k+1} = prox(x_k, gamma_k h_k).
    """
    N = schedule.N if N is None else N
    if N != schedule.N:
        raise InvalidInputError("N must match schedule.N")
    X = problem.decision_set
    x = X.inball_center.copy() if x1 is None else np.asarray(x1, dtype=float).copy()
    if x.shape != (X.dim,) or not X.contains(x, tol=1e-12):
        raise InvalidInputError("x1 must lie in the decision set")
    rng = np.random.default_rng(rng_seed)
    strong = schedule.kind == STRONGLY_CONVEX
    rho = RhoRecursion(schedule) if strong else None
    s = schedule.s

    if oracle_every:
        o_pts, o_diag = grid_points(problem.index_set, oracle_points)

    trace = []
    for k in range(1, N + 1):
        _, eta, eps, _ = policy_params(schedule, k, OBJECTIVE)
        cut = cut_backend.cut(problem, x, eps, rng)
        objective_step = cut.value <= eta
        branch = OBJECTIVE if objective_step else CONSTRAINT
        gamma, _, _, _ = policy_params(schedule, k, branch)
        if objective_step:
            _, h = problem.objective(x)
        else:
            _, h = problem.constraint(x, cut.delta)
        weight_k = rho.step(gamma, branch) if strong else gamma
        oracle = None
        if oracle_every and k % oracle_every == 0:
            oracle = _grid_max(problem, x, o_pts, o_diag).value
        trace.append(IterationRecord(
            k=k, branch="B" if objective_step else "N", gamma_k=gamma, eta_k=eta,
            epsilon_k=eps, sampled_value=cut.value, delta_k=cut.delta,
            weight=weight_k if objective_step else 0.0, x_k=x, samples_used=cut.samples_used,
            oracle_G=oracle))
        x = prox_map(problem.prox, X, x, gamma * np.asarray(h, dtype=float))

    metadata = {
        "problem": problem.name, "policy": schedule.kind, "N": N,
        "scale_gamma": schedule.scale_gamma, "scale_eta": schedule.scale_eta,
        "seed": rng_seed, "omega": problem.prox.kind, **cut_backend.describe(),
    }
    B_size = sum(1 for r in trace if r.branch == "B" and r.k >= s)
    try:
        x_bar = weighted_average(trace, s)
    except EmptyBError as err:
        err.result.metadata = metadata
        raise
    result = RunResult(x_bar=x_bar, trace=trace, B_size=B_size, f_of_x_bar=problem.f(x_bar),
                       s=s, metadata=metadata)
    if oracle_every:
        res = _grid_max(problem, x_bar, o_pts, o_diag)
        result.G_of_x_bar_oracle, result.oracle_tolerance = res.value, res.tolerance
    return result


@dataclass
class WellDefinedReport:
    condition_holds: bool
    lhs: float
    rhs: float
    B_size: int
    half_window: float  # (N - s + 1) / 2

    @property
    def B_at_least_half(self) -> bool:
        return self.B_size >= self.half_window


def check_well_defined(schedule: PolicySchedule, result: RunResult) -> WellDefinedReport:
    """Evaluate the sufficient condition for a nonempty B on the realized partition."""
    c = schedule.constants
    N, s = schedule.N, schedule.s
    window = [r for r in result.trace if r.k >= s]
    B = [r for r in window if r.branch == "B"]
    Nset = [r for r in window if r.branch == "N"]
    half = (N - s + 1) / 2
    if schedule.kind == GENERAL_CONVEX:
        lhs = half * min((r.gamma_k * r.eta_k for r in Nset), default=math.inf)
        rhs = (c.D_X ** 2 + 0.5 * sum(r.gamma_k ** 2 for r in B) * c.L_f ** 2
               + 0.5 * sum(r.gamma_k ** 2 for r in Nset) * c.L_gX ** 2)
    else:
        rho = rho_weights(schedule, result.trace)
        rec = RhoRecursion(schedule)
        a_s = A_s = None
        for r in result.trace:
            rec.step(r.gamma_k, OBJECTIVE if r.branch == "B" else CONSTRAINT)
            if r.k == s:
                a_s, A_s = rec.a, rec.A
        prods = sorted(rho[r.k - 1] * r.eta_k for r in window)
        lhs = float(sum(prods[:math.ceil(half)]))
        rhs = ((1 - a_s) * c.D_X ** 2 / A_s
               + 0.5 * sum(rho[r.k - 1] * r.gamma_k for r in B) * c.L_f ** 2
               + 0.5 * sum(rho[r.k - 1] * r.gamma_k for r in Nset) * c.L_gX ** 2)
    return WellDefinedReport(lhs > rhs, float(lhs), float(rhs), len(B), half)
