import math

import numpy as np
import pytest

from minimax_al.core import Box, ContractError, MinimaxProblem, ProxFriendly, SmoothCoupling
from minimax_al.kkt import (
    RESIDUALS, KKTReport, dist_subdiff_box, failed_residuals, is_eps_kkt, kkt_report,
    primal_dual_residual,
)

from conftest import affine_c, affine_d, cube, scalar_problem
from oracles import cone_distance_grid, random_box_triple


def test_dist_interior_and_bounds():
    box = Box.cube(2)
    assert dist_subdiff_box([1.0, -1.0], [0.0, 0.0], box) == pytest.approx(math.sqrt(2))
    assert dist_subdiff_box([-3.0, 0.0], [1.0, 0.2], box) == 0.0
    assert dist_subdiff_box([3.0, 0.0], [1.0, 0.2], box) == pytest.approx(3.0)
    assert dist_subdiff_box([3.0, 0.0], [-1.0, 0.2], box) == 0.0
    assert dist_subdiff_box([-2.0, 0.0], [-1.0, 0.2], box) == pytest.approx(2.0)
    flat = Box([0.0, -1.0], [0.0, 1.0])
    assert dist_subdiff_box([5.0, 0.5], [0.0, 0.0], flat) == pytest.approx(0.5)


def test_dist_contract():
    with pytest.raises(ContractError):
        dist_subdiff_box([0.0], [2.0], Box.cube(1))


def test_dist_matches_grid_search():
    rng = np.random.default_rng(7)
    for _ in range(100):
        g, x, lo, hi = random_box_triple(rng)
        assert dist_subdiff_box(g, x, Box(lo, hi)) == pytest.approx(
            cone_distance_grid(g, x, lo, hi), abs=2e-3
        )


def test_report_zero_at_interior_stationary_point():
    prob = scalar_problem(lambda x, y: float(-(y @ y)), lambda x, y: (np.zeros(1), -2 * y))
    rep = kkt_report(prob, np.array([0.3]), np.zeros(1))
    assert all(getattr(rep, k) == 0 for k in RESIDUALS)
    assert is_eps_kkt(rep, 1e-12)


def test_report_constructed_kkt_point():
    # f = -x + 2y - y^2/2, c = x - 1, d = y - 1, (x, y) = (1, 1), multipliers 1
    f = lambda x, y: float(-x[0] + 2 * y[0] - y[0] ** 2 / 2)
    g = lambda x, y: (np.array([-1.0]), np.array([2.0 - y[0]]))
    prob = scalar_problem(f, g, c=affine_c([[1.0]], [1.0]), d=affine_d([[0.0]], [[1.0]], [1.0]), radius=2.0)
    rep = kkt_report(prob, np.ones(1), np.ones(1), np.ones(1), np.ones(1))
    assert [getattr(rep, k) for k in RESIDUALS] == [0.0] * 6
    # moving y off the constraint surface breaks feasibility and complementarity
    rep = kkt_report(prob, np.ones(1), np.array([1.5]), np.ones(1), np.ones(1))
    assert rep.feas_d == pytest.approx(0.5) and rep.comp_d == pytest.approx(0.5)
    assert rep.stat_y == pytest.approx(0.5)


def test_report_signs_on_bilinear():
    # f = x y on [-1, 1]^2 at (0.5, -0.25): stat_x = |y|, stat_y = |x|
    prob = scalar_problem(lambda x, y: float(x @ y), lambda x, y: (y.copy(), x.copy()))
    rep = kkt_report(prob, np.array([0.5]), np.array([-0.25]))
    assert rep.stat_x == pytest.approx(0.25) and rep.stat_y == pytest.approx(0.5)
    # at y = 1 the y-gradient x > 0 pushes against the upper bound and is absorbed
    rep = kkt_report(prob, np.array([0.5]), np.array([1.0]))
    assert rep.stat_y == 0.0


def test_report_contracts():
    prob = scalar_problem(lambda x, y: 0.0, lambda x, y: (np.zeros(1), np.zeros(1)),
                          c=affine_c([[1.0]], [0.0]), d=affine_d([[1.0]], [[1.0]], [0.0]))
    with pytest.raises(ContractError):
        kkt_report(prob, np.zeros(1), np.zeros(1), -np.ones(1), np.ones(1))
    with pytest.raises(ContractError):
        kkt_report(prob, np.full(1, 2.0), np.zeros(1))


def test_surrogate_mode_for_non_box_regularizer():
    box = Box.cube(1, 5.0)
    l1 = ProxFriendly(box, prox=lambda t, v: np.clip(np.sign(v) * np.maximum(np.abs(v) - t, 0), -5, 5),
                      value=lambda x: float(np.abs(x).sum()))
    f = SmoothCoupling(lambda x, y: float(x @ x - y @ y), lambda x, y: (2 * x, -2 * y), 2.0, 2.0)
    prob = MinimaxProblem(f, l1, cube(1))
    rep = kkt_report(prob, np.zeros(1), np.zeros(1))
    assert rep.surrogate and rep.stat_x == 0.0
    rep = kkt_report(prob, np.array([1.0]), np.zeros(1), surrogate_step=0.1)
    # prox-gradient residual: (1 - shrink(1 - 0.2, 0.1)) / 0.1 = 3
    assert rep.stat_x == pytest.approx(3.0)


def test_is_eps_kkt_rules():
    zero = KKTReport(0, 0, 0, 0, 0, 0)
    assert is_eps_kkt(zero, 1e-9)
    rep = KKTReport(0, 0, 2e-3, 0, 0, 0)
    assert not is_eps_kkt(rep, 1e-3)
    assert failed_residuals(rep, 1e-3) == ["feas_c"]
    mult = {"feas_c": 2.0}
    assert is_eps_kkt(KKTReport(0, 0, 2e-3, 0, 0, 0), 1e-3, mult)
    assert primal_dual_residual(KKTReport(0.1, 0.3, 0, 0, 0, 0)) == 0.3


def test_report_is_pure(rng):
    prob = scalar_problem(lambda x, y: float(x @ y), lambda x, y: (y.copy(), x.copy()))
    x, y = rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1)
    assert kkt_report(prob, x, y).as_dict() == kkt_report(prob, x, y).as_dict()
