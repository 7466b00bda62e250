"""Built-in benchmark problems with analytic constants and known optima."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (Ball, Box, IndexSetGeometry, InvalidInputError, ProblemConstants,
                   SipProblem)

# Robust LP: min -x1 - x2  s.t.  max_i (a_i + 0.2 delta)^T x - b_i <= 0,  x in [-2, 2]^2,
# |delta| <= 1. The per-row perturbations share one delta (see README).
LP_A = np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
LP_B = np.array([0.0, 0.0, 1.0, 1.0])
LP_SCALE = 0.2
LP_HALF_WIDTH = 2.0


def robust_lp_true_G(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.max(LP_A @ x - LP_B) + LP_SCALE * np.linalg.norm(x))


def robust_lp_optimum() -> tuple[np.ndarray, float]:
    t = 1.0 / (1.0 + LP_SCALE * math.sqrt(2.0))
    return np.array([t, t]), -2.0 * t


def _lp_objective(x):
    return -x[0] - x[1], np.array([-1.0, -1.0])


def _lp_constraint(x, delta):
    rows = LP_A @ x - LP_B
    i = int(np.argmax(rows))
    return float(rows[i] + LP_SCALE * (delta @ x)), LP_A[i] + LP_SCALE * delta


def _lp_constraint_values(x, deltas):
    return np.max(LP_A @ x - LP_B) + LP_SCALE * (deltas @ x)


def _lp_section(x):
    base = float(np.max(LP_A @ x - LP_B))
    sx = [LP_SCALE * v for v in x.tolist()]
    return lambda d: base + sum(a * b for a, b in zip(sx, d))


def robust_lp() -> SipProblem:
    rad = LP_HALF_WIDTH * math.sqrt(2.0)  # max |x| over the box
    L_gX = float(np.max(np.linalg.norm(LP_A, axis=1))) + LP_SCALE
    constants = ProblemConstants(
        L_f=math.sqrt(2.0),
        L_gX=L_gX,
        L_gDelta=LP_SCALE * rad,
        D_X=LP_HALF_WIDTH * 2,  # sqrt(0.5 * (4 sqrt 2)^2)
        M_lower=-(L_gX * rad + 1.0),
        M_upper=L_gX * rad,
        dim_x=2,
        dim_delta=2,
    )
    return SipProblem(
        name="robust-lp",
        objective=_lp_objective,
        constraint=_lp_constraint,
        decision_set=Box.cube(LP_HALF_WIDTH, 2),
        index_set=IndexSetGeometry(Ball.unit(2)),
        constants=constants,
        constraint_values=_lp_constraint_values,
        section=_lp_section,
    )


# ---------------------------------------------------------------------------
# Strongly convex synthetic problem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SyntheticParams:
    """f(x) = |x - c|^2,  g(x, delta) = |x|^2 - R^2 + theta <delta, x>,
    X = [-w, w]^n, Delta = unit ball in R^n."""

    center: tuple = (0.8, 0.6)
    radius: float = 0.7
    theta: float = 0.1
    half_width: float = 1.0


@dataclass(frozen=True)
class SyntheticInstance:
    problem: SipProblem
    params: SyntheticParams
    x_star: np.ndarray
    f_star: float

    def true_G(self, x) -> float:
        return synthetic_true_G(self.params, x)


def synthetic_true_G(params: SyntheticParams, x) -> float:
    x = np.asarray(x, dtype=float)
    nx = float(np.linalg.norm(x))
    return nx * nx - params.radius ** 2 + params.theta * nx


def feasible_radius(params: SyntheticParams, tol: float = 1e-15) -> float:
    """Largest |x| with |x|^2 + theta |x| - R^2 <= 0, found by bisection."""
    lo, hi = 0.0, params.radius
    h = lambda r: r * r + params.theta * r - params.radius ** 2
    while h(hi) < 0:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


def strongly_convex_synthetic(params: SyntheticParams = SyntheticParams()) -> SyntheticInstance:
    c = np.asarray(params.center, dtype=float)
    n = c.shape[0]
    w, th, R = params.half_width, params.theta, params.radius
    if not (R > 0 and w > 0 and th >= 0):
        raise InvalidInputError("need radius > 0, half_width > 0, theta >= 0")
    rho = feasible_radius(params)
    if rho > w:
        raise InvalidInputError("feasible ball must lie inside the box")
    if np.linalg.norm(np.clip(c, -w, w)) <= rho:
        raise InvalidInputError("the constraint must be active at the optimum")
    # radial projection of c onto {|x| <= rho}; inside the box since rho <= w
    x_star = rho * c / np.linalg.norm(c)
    f_star = float(np.sum((x_star - c) ** 2))

    corner_far = np.where(c >= 0, -w, w)
    max_norm = w * math.sqrt(n)
    constants = ProblemConstants(
        L_f=2.0 * float(np.linalg.norm(corner_far - c)),
        L_gX=2.0 * max_norm + th,
        L_gDelta=th * max_norm,
        D_X=w * math.sqrt(2.0 * n),
        M_lower=-R ** 2 - th ** 2 / 4,
        M_upper=max_norm ** 2 - R ** 2 + th * max_norm,
        dim_x=n,
        dim_delta=n,
        mu_f=2.0,
        mu_g=2.0,
    )

    def objective(x):
        return float(np.sum((x - c) ** 2)), 2.0 * (x - c)

    def constraint(x, delta):
        return float(x @ x - R ** 2 + th * (delta @ x)), 2.0 * x + th * delta

    def constraint_values(x, deltas):
        return (x @ x - R ** 2) + th * (deltas @ x)

    def section(x):
        base = float(x @ x) - R ** 2
        tx = [th * v for v in x.tolist()]
        return lambda d: base + sum(a * b for a, b in zip(tx, d))

    problem = SipProblem(
        name="strongly-convex",
        objective=objective,
        constraint=constraint,
        decision_set=Box.cube(w, n),
        index_set=IndexSetGeometry(Ball.unit(n)),
        constants=constants,
        constraint_values=constraint_values,
        section=section,
    )
    return SyntheticInstance(problem, params, x_star, f_star)


PROBLEMS = ("robust-lp", "strongly-convex")


def get_problem(name: str):
    """Return ``(problem, x_star, f_star)`` for a registered problem name."""
    if name == "robust-lp":
        x_star, f_star = robust_lp_optimum()
        return robust_lp(), x_star, f_star
    if name == "strongly-convex":
        inst = strongly_convex_synthetic()
        return inst.problem, inst.x_star, inst.f_star
    raise InvalidInputError(f"unknown problem {name!r}; choose from {PROBLEMS}")
