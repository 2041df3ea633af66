import logging
import math

import numpy as np
import pytest

from minimax_al.alm import (
    AlmError, AlmState, ConstrainedProblem, NearlyFeasibleError, al_gradient_oracle, al_grads,
    al_value, find_nearly_feasible, lipschitz_Lk, lk_constants, monitor_multiplier_growth,
    select_init, solve_constrained, update_multipliers,
)
from minimax_al.core import Box, ContractError, EvalCounters, MinimaxProblem
from minimax_al.instances import gen_constrained, gen_scsc
from minimax_al.ppa import NcscProblem, solve_ncsc

from conftest import affine_c, affine_d, central_fd, scalar_problem


def xy_problem(radius=3.0):
    # f = x y, c = x - 1, d = x + y - 1
    return scalar_problem(
        lambda x, y: float(x @ y), lambda x, y: (y.copy(), x.copy()),
        c=affine_c([[1.0]], [1.0]), d=affine_d([[1.0]], [[1.0]], [1.0]), radius=radius,
    )


def test_al_value_examples():
    prob = xy_problem()
    assert al_value(prob, [2.0], [0.0], [0.0], [0.0], 2.0) == pytest.approx(0.0)
    # slack constraints with zero multipliers leave F
    assert al_value(prob, [-1.0], [0.5], [0.0], [0.0], 2.0) == pytest.approx(-0.5)
    # saturated y-penalty contributes +||ly||^2 / (2 rho)
    x, y, ly, rho = np.array([-2.5]), np.array([-2.5]), np.array([1.5]), 4.0
    x_part = (max(0.0, 0 + rho * (x[0] - 1)) ** 2 - 0) / (2 * rho)
    assert al_value(prob, x, y, [0.0], ly, rho) == pytest.approx(x[0] * y[0] + x_part + 1.5**2 / (2 * rho))
    assert al_value(prob, [4.0], [0.0], [0.0], [0.0], 1.0) == math.inf
    with pytest.raises(ContractError):
        al_value(prob, [0.0], [0.0], [0.0], [0.0], 0.0)


def test_al_grads_examples():
    prob = xy_problem()
    gx, gy = al_grads(prob, np.array([2.0]), np.array([0.0]), [0.0], [0.0], 2.0)
    assert gx == pytest.approx([0.0]) and gy == pytest.approx([0.0])
    gx, gy = al_grads(prob, np.array([-1.0]), np.array([0.5]), [0.0], [0.0], 2.0)
    assert gx == pytest.approx([0.5]) and gy == pytest.approx([-1.0])


def _away_from_kinks(prob, x, y, lx, ly, rho, margin=1e-3):
    u = np.r_[lx + rho * prob.c.value(x), ly + rho * prob.d.value(x, y)]
    return bool(np.all(np.abs(u) > margin))


@pytest.mark.parametrize("seed", range(3))
def test_al_grads_finite_differences(seed):
    inst = gen_constrained(5, 6, 2, 3, seed)
    prob = inst.to_problem()
    rng = np.random.default_rng(seed)
    n = prob.n
    checked = 0
    while checked < 30:
        x, y = rng.uniform(-0.99, 0.99, n), rng.uniform(-0.99, 0.99, prob.m)
        lx, ly, rho = rng.uniform(0, 2, 2), rng.uniform(0, 2, 3), rng.uniform(1, 20)
        if not _away_from_kinks(prob, x, y, lx, ly, rho):
            continue
        checked += 1
        gx, gy = al_grads(prob, x, y, lx, ly, rho)
        fd = central_fd(lambda w: al_value(prob, w[:n], w[n:], lx, ly, rho), np.r_[x, y])
        assert np.allclose(np.r_[gx, gy], fd, rtol=1e-5, atol=1e-5)
        G = al_gradient_oracle(prob, lx, ly, rho)
        cx, cy = G(x, y)
        assert np.allclose(cx, gx, atol=1e-12) and np.allclose(cy, gy, atol=1e-12)


def test_lipschitz_Lk():
    k = dict(L_grad_f=1, L_c=1, L_grad_c=1, c_hi=2, L_d=1, L_grad_d=1, d_hi=3)
    assert lipschitz_Lk(k, 2.0, 1.0, 2.0) == 18
    zero = dict(L_grad_f=5.0, L_c=0, L_grad_c=0, c_hi=0, L_d=0, L_grad_d=0, d_hi=0)
    assert lipschitz_Lk(zero, 7.0, 3.0, 4.0) == 5.0
    inc = lipschitz_Lk(k, 4.0, 1.0, 2.0) - lipschitz_Lk(k, 2.0, 1.0, 2.0)
    assert inc == pytest.approx(2.0 * (1 + 2 + 1 + 3))


def test_select_init_rules():
    prob = xy_problem()
    x = np.array([0.5])
    assert select_init(prob, x, np.zeros(1), x.copy(), np.zeros(1), 1.0) is not None
    assert np.array_equal(select_init(prob, x, np.zeros(1), x.copy(), np.zeros(1), 1.0), x)
    # deeply infeasible iterate loses to a feasible x_nf
    out = select_init(prob, np.array([3.0]), np.zeros(1), np.array([0.0]), np.zeros(1), 100.0)
    assert np.array_equal(out, [0.0])
    free = scalar_problem(lambda x, y: float(x[0] ** 2), lambda x, y: (2 * x, np.zeros(1)),
                          c=affine_c([[0.0]], [1.0], hi=0.0))
    assert np.array_equal(select_init(free, np.array([0.1]), np.zeros(1), np.array([0.5]), np.zeros(1), 10.0), [0.1])


def test_update_multipliers_examples():
    lx, _ = update_multipliers([0.5], [0.0], 1.0, [-2.0], [0.0], 10.0)
    assert np.array_equal(lx, [0.0])
    lx, _ = update_multipliers([1.0], [0.0], 2.0, [1.0], [0.0], 2.0)
    assert np.allclose(lx, [2.0])
    _, ly = update_multipliers([0.0], [1.0, 0.0], 4.0, [0.0], [0.5, -1.0], 10.0)
    assert np.array_equal(ly, [3.0, 0.0])


def _state(k, lam_y, tau=0.5):
    return AlmState(k, tau**k, tau**-k, np.zeros(1), np.asarray(lam_y, float), np.zeros(1), np.zeros(1), np.zeros(1))


def test_growth_monitor():
    assert monitor_multiplier_growth(_state(0, [0.0]), np.zeros(1), 10.0, 2.0, 0.5)
    assert not monitor_multiplier_growth(_state(0, [1e3]), np.zeros(1), 10.0, 2.0, 0.5)


def test_find_nearly_feasible():
    c = affine_c([[1.0, 1.0], [1.0, -1.0]], [-1.0, -0.5], hi=4.0)  # x1 + x2 <= -1, x1 - x2 <= -0.5
    box = Box.cube(2)
    x = find_nearly_feasible(c, box, 1e-10)
    assert np.linalg.norm(np.maximum(c.value(x), 0)) <= 1e-5 and box.contains(x)
    counters = EvalCounters()
    x0 = np.array([-0.9, -0.2])
    assert np.array_equal(find_nearly_feasible(c, box, 1e-4, x0=x0, counters=counters), x0)
    assert counters.grad_c == 0
    with pytest.raises(NearlyFeasibleError) as err:
        # x + 2 <= 0 is out of reach on [-1, 1]
        find_nearly_feasible(affine_c([[1.0]], [-2.0]), Box.cube(1), 1e-4)
    assert err.value.residual == pytest.approx(1.0)


def _constant_constraints(inst):
    prob = inst.to_problem()
    n, m = prob.n, prob.m
    c = affine_c(np.zeros((1, n)), [1.0], lipschitz=0.0, hi=1.0)
    d = affine_d(np.zeros((1, n)), np.zeros((1, m)), [1.0], hi=1.0)
    return MinimaxProblem(prob.f, prob.p, prob.q, c=c, d=d)


def test_inactive_constraints_match_ppa():
    inst = gen_scsc(4, 3, 2)
    prob = _constant_constraints(inst)
    sol = solve_constrained(ConstrainedProblem(prob), 1e-2, 0.5, 10.0, x_nf=np.zeros(4))
    assert all(np.all(s.lam_x == 0) and np.all(s.lam_y == 0) for s in sol.states)
    f = prob.f
    (x, y), _, _ = solve_ncsc(NcscProblem(f.grad, f.L_grad, f.sigma, prob.p, prob.q), 1e-2, 5e-3,
                              np.zeros(4), np.zeros(3))
    xs, _ = inst.analytic_saddle()
    assert np.linalg.norm(sol.x - x) <= 1e-2
    assert np.linalg.norm(sol.x - xs) <= 1e-2
    assert sol.report.stat_x <= 1e-2 and sol.report.stat_y <= 1e-2


def test_small_constrained_run_invariants():
    inst = gen_constrained(4, 6, 2, 2, 3)
    cprob = inst.to_constrained_problem()
    sol = solve_constrained(cprob, 1e-2, 0.5, 1.0, x_nf=inst.x_nf)
    K = 7
    assert sol.outer_iterations == K + 1 and sol.budget.K == K
    for s in sol.states:
        assert np.linalg.norm(s.lam_x) <= 1.0 and np.all(s.lam_y >= 0)
        assert abs(s.eps_k * s.rho_k - 1) <= 1e-12
    last = sol.states[K]
    c_val = cprob.problem.c.value(sol.x)
    assert np.array_equal(sol.lam_x_tilde, np.maximum(last.lam_x + last.rho_k * c_val, 0.0))
    assert sol.report.stat_x <= 1e-2 and sol.report.stat_y <= 1e-2
    assert sol.monitors and all(m["ok"] for m in sol.monitors)
    assert {it.init for it in sol.iterations} <= {"x_k", "x_nf"}


def test_inner_failure_carries_context():
    inst = gen_constrained(3, 3, 1, 1, 0)
    with pytest.raises(AlmError) as err:
        solve_constrained(inst.to_constrained_problem(), 1e-2, 0.5, 10.0, x_nf=inst.x_nf, max_ppa_outer=1)
    assert err.value.k is not None and err.value.states


def test_contracts():
    inst = gen_constrained(3, 3, 1, 1, 0)
    cprob = inst.to_constrained_problem()
    with pytest.raises(ContractError):
        solve_constrained(cprob, 1.5, 0.5, 10.0)
    with pytest.raises(ContractError):
        solve_constrained(cprob, 1e-2, 0.5, 10.0, lam_x0=[20.0])
    with pytest.raises(ContractError):
        solve_constrained(cprob, 1e-2, 0.5, 10.0, x_nf=np.ones(3) * 5)
    with pytest.raises(ContractError):
        ConstrainedProblem(inst.to_problem(), Delta=-1.0)


def test_condition_warning_is_logged(caplog):
    inst = gen_constrained(3, 3, 1, 1, 1)
    with caplog.at_level(logging.WARNING, logger="minimax_al.alm"):
        sol = solve_constrained(inst.to_constrained_problem(), 0.5, 0.5, 10.0, x_nf=inst.x_nf)
    if sol.budget.cond_ok is False:
        assert any("condition" in r.message for r in caplog.records)
