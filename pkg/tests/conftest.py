import math

import numpy as np
import pytest
from hypothesis import settings

from sipcsa.core import Box, IndexSetGeometry, ProblemConstants, SipProblem

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


def interval_toy(g, dg_dx=None, L_gDelta=1.0, M_lower=-1.0, M_upper=1.0, name="toy"):
    """One-dimensional problem on X = Delta = [-1, 1] whose constraint ignores x
    unless ``dg_dx`` says otherwise. Used for the quadrature / Monte-Carlo checks."""

    def constraint(x, delta):
        return float(g(float(delta[0]))), np.zeros(1) if dg_dx is None else dg_dx(x, delta)

    return SipProblem(
        name=name,
        objective=lambda x: (0.0, np.zeros(1)),
        constraint=constraint,
        decision_set=Box.cube(1.0, 1),
        index_set=IndexSetGeometry(Box.cube(1.0, 1)),
        constants=ProblemConstants(L_f=0.0, L_gX=0.0, L_gDelta=L_gDelta, D_X=math.sqrt(2.0),
                                   M_lower=M_lower, M_upper=M_upper, dim_x=1, dim_delta=1),
        constraint_values=lambda x, ds: np.array([g(float(d)) for d in ds[:, 0]]),
    )


# (label, g, Lipschitz constant in delta, argmax over [-1, 1], max value)
INTERVAL_TOYS = [
    ("linear", lambda d: d, 1.0, 1.0, 1.0),
    ("kink", lambda d: -abs(d - 0.3), 1.0, 0.3, 0.0),
    ("wave", lambda d: math.sin(3 * d), 3.0, math.pi / 6, 1.0),
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def report(capsys):
    """Print and remember one PASS/FAIL line per acceptance criterion, then assert."""

    def _report(number, title, checks):
        failed = [name for name, ok in checks if not ok]
        line = f"criterion {number} [{'PASS' if not failed else 'FAIL'}] {title}"
        if failed:
            line += " | failed: " + "; ".join(failed)
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
