import numpy as np
import pytest

from minimax_al.core import (
    Box, ConstraintMap, MinimaxProblem, ProxFriendly, SmoothCoupling, box_indicator,
)


def cube(dim, radius=1.0):
    return box_indicator(Box.cube(dim, radius))


def scalar_problem(value, grad, L=1.0, sigma=1.0, c=None, d=None, radius=1.0):
    """One-dimensional problem on ``[-radius, radius]^2``."""
    f = SmoothCoupling(value, grad, L_grad=L, sigma=sigma)
    return MinimaxProblem(f, cube(1, radius), cube(1, radius), c=c, d=d)


def affine_c(J, b, lipschitz=None, hi=10.0):
    J = np.atleast_2d(np.asarray(J, float))
    b = np.atleast_1d(np.asarray(b, float))
    return ConstraintMap(
        value=lambda x: J @ x - b,
        vjp=lambda x, lam: J.T @ lam,
        dim=J.shape[0],
        lipschitz=float(np.linalg.norm(J, 2)) if lipschitz is None else lipschitz,
        smoothness=0.0,
        hi=hi,
        affine=(J, b),
    )


def affine_d(Jx, Jy, b, hi=10.0):
    Jx = np.atleast_2d(np.asarray(Jx, float))
    Jy = np.atleast_2d(np.asarray(Jy, float))
    b = np.atleast_1d(np.asarray(b, float))
    J = np.hstack((Jx, Jy))
    return ConstraintMap(
        value=lambda x, y: Jx @ x + Jy @ y - b,
        vjp=lambda x, y, lam: (Jx.T @ lam, Jy.T @ lam),
        dim=J.shape[0],
        lipschitz=float(np.linalg.norm(J, 2)),
        smoothness=0.0,
        hi=hi,
        affine=(J, b),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def central_fd(fun, z, h=1e-6):
    g = np.zeros_like(z)
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = h
        g[i] = (fun(z + e) - fun(z - e)) / (2 * h)
    return g


# one line per acceptance criterion, echoed after the test summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
