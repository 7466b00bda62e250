"""Problem types, set geometry and the Euclidean prox machinery."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np


class InvalidInputError(ValueError):
    """Raised on malformed arguments (shapes, ranges)."""


class PolicyInfeasibleError(ValueError):
    """A derived quantity left the range a formula needs."""


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _as_vector(v, n: Optional[int] = None, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise InvalidInputError(f"{name} has length {arr.shape[0]}, expected {n}")
    return arr


# ---------------------------------------------------------------------------
# Set geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[lower, upper]``."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise InvalidInputError("box bounds must be nonempty and of equal length")
        if any(h <= l for l, h in zip(lo, hi)):
            raise InvalidInputError("box must have upper > lower in every coordinate")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, half_width: float, dim: int) -> "Box":
        return cls((-half_width,) * dim, (half_width,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.lower)

    @property
    def hi(self) -> np.ndarray:
        return np.array(self.upper)

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.widths))

    @property
    def inradius(self) -> float:
        return float(self.widths.min() / 2)

    @property
    def inball_center(self) -> np.ndarray:
        return (self.lo + self.hi) / 2

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    @property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lo, self.hi

    def contains(self, p, tol: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lo - tol) and np.all(p <= self.hi + tol))

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=-1)

    def membership(self) -> Callable[[list], bool]:
        """Plain-float membership predicate for hot loops."""
        bounds = list(zip(self.lower, self.upper))
        return lambda p: all(l <= v <= h for v, (l, h) in zip(p, bounds))

    def project(self, p) -> np.ndarray:
        return np.clip(np.asarray(p, dtype=float), self.lo, self.hi)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        shape = (self.dim,) if size is None else (size, self.dim)
        return self.lo + rng.random(shape) * self.widths


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        if not c:
            raise InvalidInputError("ball center must be nonempty")
        if not self.radius > 0:
            raise InvalidInputError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def unit(cls, dim: int) -> "Ball":
        return cls((0.0,) * dim, 1.0)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def c(self) -> np.ndarray:
        return np.array(self.center)

    @property
    def diameter(self) -> float:
        return 2 * self.radius

    @property
    def inradius(self) -> float:
        return self.radius

    @property
    def inball_center(self) -> np.ndarray:
        return self.c

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    @property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.c - self.radius, self.c + self.radius

    def contains(self, p, tol: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        return float(np.sum((p - self.c) ** 2)) <= (self.radius + tol) ** 2

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        return np.sum((pts - self.c) ** 2, axis=-1) <= self.radius ** 2

    def membership(self) -> Callable[[list], bool]:
        """Plain-float membership predicate for hot loops."""
        c, r2 = self.center, self.radius ** 2
        return lambda p: sum((v - ci) * (v - ci) for v, ci in zip(p, c)) <= r2

    def project(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        off = p - self.c
        nrm = float(np.linalg.norm(off))
        if nrm <= self.radius:
            return p.copy()
        return self.c + off * (self.radius / nrm)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        m = 1 if size is None else size
        dirs = rng.standard_normal((m, self.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = self.radius * rng.random(m) ** (1.0 / self.dim)
        pts = self.c + dirs * radii[:, None]
        return pts[0] if size is None else pts


Geometry = Union[Box, Ball]


@dataclass(frozen=True)
class IndexSetGeometry:
    """The compact index set together with the constants the samplers need.

    ``volume_ratio`` is vol(largest inscribed ball) / vol(set).
    """

    shape: Geometry

    @property
    def dim(self) -> int:
        return self.shape.dim

    @property
    def R_Delta(self) -> float:
        return self.shape.inradius

    @property
    def D_Delta(self) -> float:
        return self.shape.diameter

    @property
    def volume(self) -> float:
        return self.shape.volume

    @property
    def volume_ratio(self) -> float:
        if isinstance(self.shape, Ball):
            return 1.0
        return min(1.0, unit_ball_volume(self.dim) * self.R_Delta ** self.dim / self.volume)

    @property
    def inball_center(self) -> np.ndarray:
        return self.shape.inball_center

    def contains(self, delta, tol: float = 0.0) -> bool:
        return self.shape.contains(delta, tol)

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        return self.shape.contains_many(pts)

    def uniform_sample(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        return self.shape.sample(rng, size)


# ---------------------------------------------------------------------------
# Prox machinery (Euclidean distance generator)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProxState:
    """Distance generator ``omega``. Only the Euclidean half-squared norm ships."""

    kind: str = "euclidean"

    def __post_init__(self):
        if self.kind != "euclidean":
            raise InvalidInputError(f"unsupported distance generator {self.kind!r}")

    def omega(self, x: np.ndarray) -> float:
        return 0.5 * float(x @ x)

    def grad_omega(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)

    @property
    def L_prox(self) -> float:
        return 1.0

    def prox_diameter(self, shape: Geometry) -> float:
        """sqrt(max V(x, z)) over the set; closed form for boxes and balls."""
        return shape.diameter / math.sqrt(2.0)


EUCLIDEAN = ProxState()


def bregman_distance(state: ProxState, x, z) -> float:
    x = _as_vector(x, name="x")
    z = _as_vector(z, x.shape[0], name="z")
    val = state.omega(z) - state.omega(x) - float(state.grad_omega(x) @ (z - x))
    return max(val, 0.0)


def prox_map(state: ProxState, shape: Geometry, x, y) -> np.ndarray:
    """argmin over the set of <y, z> + V(x, z).

    With the Euclidean generator this is the projection of ``x - y``.
    """
    x = _as_vector(x, shape.dim, name="x")
    y = _as_vector(y, shape.dim, name="y")
    return shape.project(x - y)


# ---------------------------------------------------------------------------
# Problem definition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemConstants:
    L_f: float
    L_gX: float
    L_gDelta: float
    D_X: float
    M_lower: float
    M_upper: float
    dim_x: int
    dim_delta: int
    mu_f: float = 0.0
    mu_g: float = 0.0
    L_prox: float = 1.0

    def __post_init__(self):
        if min(self.L_f, self.L_gX, self.L_gDelta) < 0:
            raise InvalidInputError("Lipschitz constants must be nonnegative")
        if not self.D_X > 0:
            raise InvalidInputError("D_X must be positive")
        if self.M_lower > self.M_upper:
            raise InvalidInputError("M_lower must not exceed M_upper")
        if min(self.mu_f, self.mu_g) < 0:
            raise InvalidInputError("strong-convexity moduli must be nonnegative")
        if not self.L_prox > 0:
            raise InvalidInputError("L_prox must be positive")
        if self.dim_x < 1 or self.dim_delta < 1:
            raise InvalidInputError("dimensions must be >= 1")


ObjectiveOracle = Callable[[np.ndarray], tuple[float, np.ndarray]]
ConstraintOracle = Callable[[np.ndarray, np.ndarray], tuple[float, np.ndarray]]


@dataclass(frozen=True)
class SipProblem:
    """min f(x) over X subject to g(x, delta) <= 0 for every delta in Delta.

    ``constraint_values`` is an optional batched evaluator ``(x, deltas[m, d]) -> values[m]``;
    without one, values are computed point by point through ``constraint``.
    ``section`` optionally maps x to a plain-float evaluator of delta -> g(x, delta)
    (delta given as a list); the MH sampler uses it in its inner loop.
    """

    name: str
    objective: ObjectiveOracle
    constraint: ConstraintOracle
    decision_set: Geometry
    index_set: IndexSetGeometry
    constants: ProblemConstants
    constraint_values: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    section: Optional[Callable[[np.ndarray], Callable[[list], float]]] = None
    prox: ProxState = field(default=EUCLIDEAN)

    def f(self, x) -> float:
        return float(self.objective(np.asarray(x, dtype=float))[0])

    def g(self, x, delta) -> float:
        return float(self.constraint(np.asarray(x, dtype=float), np.asarray(delta, dtype=float))[0])

    def g_section(self, x) -> Callable[[list], float]:
        x = np.asarray(x, dtype=float)
        if self.section is not None:
            return self.section(x)
        return lambda d: float(self.constraint(x, np.asarray(d, dtype=float))[0])

    def g_many(self, x, deltas: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        deltas = np.atleast_2d(np.asarray(deltas, dtype=float))
        if self.constraint_values is not None:
            return np.asarray(self.constraint_values(x, deltas), dtype=float)
        return np.array([self.constraint(x, d)[0] for d in deltas], dtype=float)


# ---------------------------------------------------------------------------
# Constant validation
# ---------------------------------------------------------------------------

@dataclass
class Violation:
    check: str
    lhs: float
    rhs: float
    witness: dict


@dataclass
class ValidationReport:
    trials: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_constants(problem: SipProblem, trials: int, rng_seed: int = 0,
                       rtol: float = 1e-9) -> ValidationReport:
    """Monte-Carlo spot check of the Lipschitz, bound and convexity constants.

    Report-only: every violated inequality is listed with the points that broke it.
    Subgradient (and strong-convexity, when the moduli are positive) inequalities
    are checked for both the objective and g(., delta).
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    c = problem.constants
    X, D = problem.decision_set, problem.index_set
    report = ValidationReport(trials=trials)

    def check(name, lhs, rhs, **witness):
        if lhs > rhs + rtol * max(1.0, abs(rhs)):
            report.violations.append(Violation(name, float(lhs), float(rhs),
                                               {k: np.asarray(v).tolist() for k, v in witness.items()}))

    for _ in range(trials):
        x, z = X.sample(rng), X.sample(rng)
        d1, d2 = D.uniform_sample(rng), D.uniform_sample(rng)
        fx, dfx = problem.objective(x)
        fz, _ = problem.objective(z)
        gx, dgx = problem.constraint(x, d1)
        gz, _ = problem.constraint(z, d1)
        gx2, _ = problem.constraint(x, d2)
        dxz = float(np.linalg.norm(x - z))
        check("L_f", abs(fx - fz), c.L_f * dxz, x=x, z=z)
        check("L_gX", abs(gx - gz), c.L_gX * dxz, x=x, z=z, delta=d1)
        check("L_gDelta", abs(gx - gx2), c.L_gDelta * float(np.linalg.norm(d1 - d2)),
              x=x, delta=d1, delta2=d2)
        check("M_lower", c.M_lower, gx, x=x, delta=d1)
        check("M_upper", gx, c.M_upper, x=x, delta=d1)
        # f(z) >= f(x) + <f'(x), z - x> + mu/2 |z - x|^2
        check("objective_subgradient", fx + float(dfx @ (z - x)) + 0.5 * c.mu_f * dxz ** 2, fz,
              x=x, z=z)
        check("constraint_subgradient", gx + float(dgx @ (z - x)) + 0.5 * c.mu_g * dxz ** 2, gz,
              x=x, z=z, delta=d1)
    return report
