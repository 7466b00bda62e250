import math

import numpy as np
import pytest

from sipcsa.core import InvalidInputError, validate_constants
from sipcsa.cutgen import grid_oracle_G
from sipcsa.problems import (LP_A, LP_B, SyntheticParams, feasible_radius, get_problem,
                             robust_lp, robust_lp_optimum, robust_lp_true_G,
                             strongly_convex_synthetic, synthetic_true_G)


class TestRobustLp:
    def test_constants(self):
        c = robust_lp().constants
        assert c.L_f == pytest.approx(math.sqrt(2))
        assert c.L_gX == pytest.approx(1.2)
        assert c.L_gDelta == pytest.approx(0.4 * math.sqrt(2))
        assert c.D_X == pytest.approx(4.0)
        assert c.M_lower == pytest.approx(-(1.2 * 2 * math.sqrt(2) + 1))
        assert c.M_upper == pytest.approx(1.2 * 2 * math.sqrt(2))
        geo = robust_lp().index_set
        assert (geo.R_Delta, geo.D_Delta, geo.volume_ratio) == (1.0, 2.0, 1.0)

    def test_objective(self):
        v, grad = robust_lp().objective(np.ones(2))
        assert v == -2.0
        np.testing.assert_array_equal(grad, [-1, -1])

    def test_true_G_values(self):
        assert robust_lp_true_G([0, 0]) == 0.0
        assert robust_lp_true_G([2, 2]) == pytest.approx(1.56569, abs=1e-5)

    def test_optimum(self):
        x, f = robust_lp_optimum()
        assert f == pytest.approx(-2 / (1 + 0.2 * math.sqrt(2)), abs=1e-15)
        assert f == pytest.approx(-1.5590376, abs=1e-7)
        assert round(f, 3) == -1.559
        assert abs(robust_lp_true_G(x)) <= 1e-12
        assert np.all(np.abs(x) <= 2)

    def test_optimum_against_brute_force(self):
        # on a fine grid of X, the best feasible objective is no better than f*
        _, f = robust_lp_optimum()
        t = np.linspace(-2, 2, 801)
        X1, X2 = np.meshgrid(t, t)
        pts = np.stack([X1.ravel(), X2.ravel()], axis=1)
        G = np.max(pts @ LP_A.T - LP_B, axis=1) + 0.2 * np.linalg.norm(pts, axis=1)
        best = np.min((-pts[:, 0] - pts[:, 1])[G <= 0])
        assert f <= best + 1e-12
        assert best - f < 0.01

    def test_inner_max_duality(self):
        rng = np.random.default_rng(0)
        p = robust_lp()
        deltas = p.index_set.uniform_sample(rng, 10_000)
        for _ in range(1000):
            x = p.decision_set.sample(rng)
            i = rng.integers(4)
            sampled = np.max((LP_A[i] + 0.2 * deltas) @ x)
            closed = LP_A[i] @ x + 0.2 * np.linalg.norm(x)
            assert sampled <= closed + 1e-12
            assert closed - sampled <= 0.01

    def test_true_G_midpoint_convexity(self):
        rng = np.random.default_rng(1)
        for _ in range(2000):
            a, b = rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2)
            assert robust_lp_true_G((a + b) / 2) <= 0.5 * (robust_lp_true_G(a) + robust_lp_true_G(b)) + 1e-12

    def test_grid_oracle_agrees(self):
        p = robust_lp()
        rng = np.random.default_rng(2)
        for x in p.decision_set.sample(rng, 100):
            res = grid_oracle_G(p, x, 101)
            G = robust_lp_true_G(x)
            assert G - res.tolerance <= res.value <= G + 1e-12

    def test_validates(self):
        assert validate_constants(robust_lp(), 10_000, rng_seed=1).ok


class TestSynthetic:
    def test_default_optimum_frozen(self):
        inst = strongly_convex_synthetic()
        # quadratic formula: rho = (-theta + sqrt(theta^2 + 4 R^2)) / 2, |c| = 1
        rho = (-0.1 + math.sqrt(0.01 + 4 * 0.49)) / 2
        assert feasible_radius(inst.params) == pytest.approx(rho, abs=1e-12)
        assert inst.f_star == pytest.approx(0.1212548, abs=1e-6)
        assert inst.f_star == pytest.approx((1 - rho) ** 2, abs=1e-12)
        assert abs(inst.true_G(inst.x_star)) <= 1e-12

    def test_optimum_against_brute_force(self):
        inst = strongly_convex_synthetic()
        t = np.linspace(-1, 1, 1001)
        X1, X2 = np.meshgrid(t, t)
        pts = np.stack([X1.ravel(), X2.ravel()], axis=1)
        nrm = np.linalg.norm(pts, axis=1)
        feas = nrm ** 2 - 0.49 + 0.1 * nrm <= 0
        best = np.min(np.sum((pts[feas] - np.array([0.8, 0.6])) ** 2, axis=1))
        assert inst.f_star <= best + 1e-12 and best - inst.f_star < 1e-2

    def test_theta_zero_closed_form(self):
        params = SyntheticParams(center=(1.2, -0.5), radius=0.6, theta=0.0)
        inst = strongly_convex_synthetic(params)
        c = np.array([1.2, -0.5])
        np.testing.assert_allclose(inst.x_star, 0.6 * c / np.linalg.norm(c), atol=1e-12)
        assert synthetic_true_G(params, inst.x_star) == pytest.approx(0.0, abs=1e-12)

    def test_moduli_and_validation(self):
        inst = strongly_convex_synthetic()
        c = inst.problem.constants
        assert (c.mu_f, c.mu_g) == (2.0, 2.0)
        assert validate_constants(inst.problem, 10_000, rng_seed=2).ok

    @pytest.mark.parametrize("params", [
        SyntheticParams(center=(0.1, 0.1)),           # unconstrained minimiser feasible
        SyntheticParams(radius=3.0),                  # feasible ball leaves the box
        SyntheticParams(radius=-1.0),
    ])
    def test_invalid(self, params):
        with pytest.raises(InvalidInputError):
            strongly_convex_synthetic(params)


def test_registry():
    for name in ("robust-lp", "strongly-convex"):
        prob, x_star, f_star = get_problem(name)
        assert prob.name == name and prob.f(x_star) == pytest.approx(f_star)
    with pytest.raises(InvalidInputError):
        get_problem("nope")
