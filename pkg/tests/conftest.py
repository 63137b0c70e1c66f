import os
import sys

import numpy as np
import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from ql1pipe.problem import CountingOperator, QuadraticProblem  # noqa: E402
from ql1pipe.solver import SolverConfig  # noqa: E402


def dense_problem(a, b, tau):
    return QuadraticProblem(CountingOperator.dense(np.atleast_2d(a)), np.atleast_1d(b), tau)


@pytest.fixture(scope="session")
def root_path():
    return ROOT


@pytest.fixture
def scalar_problem():
    """0.5 * 2 x^2 - 4 x + |x|, minimized at x = 1.5."""
    return dense_problem([[2.0]], [4.0], 1.0)


@pytest.fixture
def diagonal_problem():
    a = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    b = np.array([3.0, -1.0, 0.2, 8.0, -6.0])
    tau = 0.5
    x_star = np.sign(b) * np.maximum(np.abs(b) - tau, 0.0) / a
    return dense_problem(np.diag(a), b, tau), x_star


@pytest.fixture
def tight_config():
    return SolverConfig(tol=1e-11, mv_budget=20000)
