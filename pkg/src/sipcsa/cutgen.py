"""Cut generation: approximate max over delta of g(x, delta).

Three backends share the ``cut(problem, x, epsilon, rng)`` interface:

* ``GridCut``      exhaustive grid search (reference oracle, ignores ``epsilon``)
* ``FixedSampler`` best of M uniform draws; M constant or derived from ``epsilon``
* ``AdaptiveSampler`` Metropolis-Hastings on the Gibbs density exp(g / kappa(epsilon))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (IndexSetGeometry, InvalidInputError, PolicyInfeasibleError,
                   ProblemConstants, SipProblem, unit_ball_volume)


class InfeasibleGridError(ValueError):
    """The grid has no point inside the index set."""


@dataclass(frozen=True)
class CutResult:
    delta: np.ndarray
    value: float
    samples_used: int
    backend: str
    tolerance: float = 0.0  # a-priori bound on G(x) - value; only the grid backend sets it


# ---------------------------------------------------------------------------
# Grid oracle
# ---------------------------------------------------------------------------

def grid_points(geometry: IndexSetGeometry, points_per_axis: int) -> tuple[np.ndarray, float]:
    """Regular grid over the bounding box, restricted to the set.

    Returns the points and the cell diagonal.
    """
    if points_per_axis < 2:
        raise InfeasibleGridError("points_per_axis must be >= 2")
    lo, hi = geometry.shape.bounding_box
    axes = [np.linspace(l, h, points_per_axis) for l, h in zip(lo, hi)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, geometry.dim)
    pts = mesh[geometry.contains_many(mesh)]
    if pts.shape[0] == 0:
        raise InfeasibleGridError("grid does not intersect the index set")
    cell_diag = float(np.linalg.norm((hi - lo) / (points_per_axis - 1)))
    return pts, cell_diag


def grid_oracle_G(problem: SipProblem, x, points_per_axis: int) -> CutResult:
    pts, cell_diag = grid_points(problem.index_set, points_per_axis)
    return _grid_max(problem, x, pts, cell_diag)


def _grid_max(problem, x, pts, cell_diag) -> CutResult:
    vals = problem.g_many(x, pts)
    i = int(np.argmax(vals))  # first occurrence on ties
    return CutResult(pts[i].copy(), float(vals[i]), int(pts.shape[0]), "grid",
                     tolerance=problem.constants.L_gDelta * cell_diag)


@dataclass
class GridCut:
    points_per_axis: int = 101
    name: str = field(default="grid", init=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def _points(self, geometry):
        key = (geometry, self.points_per_axis)
        if key not in self._cache:
            self._cache[key] = grid_points(geometry, self.points_per_axis)
        return self._cache[key]

    def cut(self, problem, x, epsilon, rng) -> CutResult:
        pts, diag = self._points(problem.index_set)
        return _grid_max(problem, x, pts, diag)

    def describe(self) -> dict:
        return {"sampler": "grid", "points_per_axis": self.points_per_axis}


# ---------------------------------------------------------------------------
# Fixed-distribution sampling
# ---------------------------------------------------------------------------

def sample_size(epsilon: float, beta: float) -> int:
    """ceil(ln beta / ln(1 - epsilon)) for epsilon, beta in (0, 1)."""
    if not (0 < epsilon < 1 and 0 < beta < 1):
        raise InvalidInputError(f"need 0 < epsilon, beta < 1; got {epsilon}, {beta}")
    return max(1, math.ceil(math.log(beta) / math.log1p(-epsilon)))


def make_default_ulb(geometry: IndexSetGeometry) -> Callable[[float], float]:
    """Lower bound phi(r) on the uniform mass of B_r(delta) for any delta in the set.

    A ball of radius lam * R_Delta centred at (1 - lam) delta + lam delta_0, with
    lam = r / (R_Delta + D_Delta), lies both in the set (convexity) and in B_r(delta).
    """
    R, D, d, vol = geometry.R_Delta, geometry.D_Delta, geometry.dim, geometry.volume
    scale = unit_ball_volume(d) / vol

    def phi(r: float) -> float:
        if r <= 0:
            return 0.0
        return min(1.0, scale * (r * R / (R + D)) ** d)

    return phi


def theoretical_Mk(constants: ProblemConstants, ulb_phi, epsilon_k: float) -> int:
    if not epsilon_k > 0:
        raise InvalidInputError("epsilon_k must be positive")
    if constants.L_gDelta <= 0:
        raise PolicyInfeasibleError("L_gDelta must be positive for the sample-size rule")
    if constants.M_upper <= constants.M_lower:
        raise PolicyInfeasibleError("M_upper - M_lower must be positive for the sample-size rule")
    level = ulb_phi(epsilon_k / (2 * constants.L_gDelta))
    beta = epsilon_k / (2 * (constants.M_upper - constants.M_lower))
    if not 0 < level < 1:
        raise PolicyInfeasibleError(f"phi(epsilon_k / (2 L_gDelta)) = {level} is outside (0, 1)")
    if not 0 < beta < 1:
        raise PolicyInfeasibleError(f"epsilon_k / (2 (M_upper - M_lower)) = {beta} is outside (0, 1)")
    return sample_size(level, beta)


def fixed_sample_cut(problem: SipProblem, x, M: int, rng: np.random.Generator) -> CutResult:
    if M < 1:
        raise InvalidInputError("M must be >= 1")
    draws = problem.index_set.uniform_sample(rng, M)
    vals = problem.g_many(x, draws)
    i = int(np.argmax(vals))
    return CutResult(draws[i].copy(), float(vals[i]), M, "fixed")


@dataclass
class FixedSamplerConfig:
    """``constant_M=None`` selects the theoretical schedule driven by epsilon_k."""

    constant_M: Optional[int] = 10
    ulb_phi: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.constant_M is not None and self.constant_M < 1:
            raise InvalidInputError("constant_M must be >= 1")

    @property
    def sample_size_mode(self) -> str:
        return "constant" if self.constant_M is not None else "theoretical"


@dataclass
class FixedSampler:
    config: FixedSamplerConfig = field(default_factory=FixedSamplerConfig)
    name: str = field(default="fixed", init=False)
    saturated: int = field(default=0, init=False)

    def sample_count(self, problem: SipProblem, epsilon: float) -> int:
        if self.config.constant_M is not None:
            return self.config.constant_M
        phi = self.config.ulb_phi or make_default_ulb(problem.index_set)
        c = problem.constants
        if c.L_gDelta <= 0:
            # g does not depend on delta: any draw is a maximizer
            return 1
        try:
            return theoretical_Mk(c, phi, epsilon)
        except PolicyInfeasibleError:
            # phi or beta at/above 1: the in-expectation guarantee already holds with one draw.
            if phi(epsilon / (2 * c.L_gDelta)) >= 1 or epsilon >= 2 * (c.M_upper - c.M_lower):
                self.saturated += 1
                return 1
            raise

    def cut(self, problem, x, epsilon, rng) -> CutResult:
        return fixed_sample_cut(problem, x, self.sample_count(problem, epsilon), rng)

    def describe(self) -> dict:
        return {"sampler": "fixed", "M": self.config.constant_M or "theory",
                "saturated_Mk": self.saturated}


# ---------------------------------------------------------------------------
# Adaptive (Gibbs) sampling
# ---------------------------------------------------------------------------

@dataclass
class AdaptiveSamplerConfig:
    mh_iterations: int = 200
    samples_per_iteration: int = 1
    proposal_stddev: Optional[float] = None  # None: D_Delta / 20
    kappa_floor: float = 1e-8

    def __post_init__(self):
        if self.mh_iterations < 1 or self.samples_per_iteration < 1:
            raise InvalidInputError("mh_iterations and samples_per_iteration must be >= 1")
        if self.proposal_stddev is not None and not self.proposal_stddev > 0:
            raise InvalidInputError("proposal_stddev must be positive")
        if not self.kappa_floor > 0:
            raise InvalidInputError("kappa_floor must be positive")


def compute_C(geometry: IndexSetGeometry, L_gDelta: float) -> float:
    """L_gDelta (R_Delta + D_Delta) - ln r."""
    r = geometry.volume_ratio
    if not 0 < r <= 1:
        raise InvalidInputError(f"volume ratio {r} outside (0, 1]")
    if L_gDelta < 0:
        raise InvalidInputError("L_gDelta must be nonnegative")
    return L_gDelta * (geometry.R_Delta + geometry.D_Delta) - math.log(r)


def kappa_of_epsilon(epsilon: float, d: int, C: float, kappa_floor: float = 1e-8) -> float:
    if not epsilon > 0 or d < 1:
        raise InvalidInputError("need epsilon > 0 and d >= 1")
    if not C > 0:
        raise PolicyInfeasibleError("C must be positive (degenerate index set / L_gDelta = 0)")
    return max(kappa_floor, min(epsilon / (2 * C), (epsilon / (2 * d)) ** 2, 1.0))


def gibbs_log_density_unnorm(problem: SipProblem, x, kappa: float, delta) -> float:
    if not kappa > 0:
        raise InvalidInputError("kappa must be positive")
    if not problem.index_set.contains(delta):
        return -math.inf
    return problem.g(x, delta) / kappa


def mh_sample_cut(problem: SipProblem, x, kappa: float, config: AdaptiveSamplerConfig,
                  rng: np.random.Generator) -> CutResult:
    """Random-walk Metropolis-Hastings targeting exp(g(x, .) / kappa) on the index set.

    Each chain starts at a uniform draw, runs ``mh_iterations`` steps and keeps its
    final state; the best final state over the chains is returned.
    """
    if not kappa > 0:
        raise InvalidInputError("kappa must be positive")
    geom = problem.index_set
    d = geom.dim
    step = config.proposal_stddev or geom.D_Delta / 20.0
    T = config.mh_iterations
    g = problem.g_section(x)
    inside = geom.shape.membership()
    inv_kappa = 1.0 / kappa

    best_delta, best_val = None, -math.inf
    for _ in range(config.samples_per_iteration):
        cur = geom.uniform_sample(rng).tolist()
        cur_val = g(cur)
        noise = (rng.standard_normal((T, d)) * step).tolist()
        log_u = np.log(rng.random(T)).tolist()
        for t in range(T):
            prop = [a + b for a, b in zip(cur, noise[t])]
            if not inside(prop):
                continue
            prop_val = g(prop)
            # log-domain acceptance: min(1, exp((g' - g) / kappa))
            if log_u[t] <= (prop_val - cur_val) * inv_kappa:
                cur, cur_val = prop, prop_val
        if cur_val > best_val:
            best_delta, best_val = cur, cur_val
    best_delta = np.array(best_delta)
    return CutResult(best_delta, float(best_val), config.samples_per_iteration, "adaptive")


@dataclass
class AdaptiveSampler:
    config: AdaptiveSamplerConfig = field(default_factory=AdaptiveSamplerConfig)
    name: str = field(default="adaptive", init=False)
    clamped: int = field(default=0, init=False)

    def kappa(self, problem: SipProblem, epsilon: float) -> float:
        C = compute_C(problem.index_set, problem.constants.L_gDelta)
        k = kappa_of_epsilon(epsilon, problem.index_set.dim, C, self.config.kappa_floor)
        if k == self.config.kappa_floor:
            self.clamped += 1
        return k

    def cut(self, problem, x, epsilon, rng) -> CutResult:
        return mh_sample_cut(problem, x, self.kappa(problem, epsilon), self.config, rng)

    def describe(self) -> dict:
        return {"sampler": "adaptive", "mh_iterations": self.config.mh_iterations,
                "samples_per_iteration": self.config.samples_per_iteration,
                "kappa_clamped": self.clamped}
