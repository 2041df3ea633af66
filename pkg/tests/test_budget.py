import math

import numpy as np
import pytest

from minimax_al.budget import alm_budget, alm_outer_index, foam_budget, inner_trip_cap, ppa_budget
from minimax_al.core import ContractError

ALM_ARGS = dict(
    Lambda=10.0, sigma=20.0, L_grad_f=22.0, L_c=0.4, L_grad_c=0.0, c_hi=2.0,
    L_d=1.0, L_grad_d=0.0, d_hi=10.0, D_x=8.9, D_y=12.6,
)
META = dict(Delta=1000.0, theta=0.1, delta_c=0.15, delta_d=0.5, L_F=17.0)


def test_ppa_alpha():
    kw = dict(eps=1e-2, eps_hat0=5e-3, D_x=2.0, D_y=2.0, H0_max=1.0, H_star_low=0.0, H_low=0.0)
    assert ppa_budget(1.0, 2.0, **kw).alpha == 1.0
    assert ppa_budget(100.0, 1.0, **kw).alpha == pytest.approx(math.sqrt(0.08))


def test_ppa_T_with_zero_gap():
    eps = 1e-2
    b = ppa_budget(1.0, 1.0, eps, eps / 2, 2.0, 2.0, H0_max=0.0, H_star_low=0.0, H_low=-1.0)
    assert b.T == 15
    assert b.inputs["eps_hat0"] == eps / 2


def test_ppa_contracts():
    with pytest.raises(ContractError):
        ppa_budget(1.0, 1.0, 1e-2, 6e-3, 1.0, 1.0, 0.0, 0.0, 0.0)
    with pytest.raises(ContractError):
        ppa_budget(0.0, 1.0, 1e-2, 5e-3, 1.0, 1.0, 0.0, 0.0, 0.0)


def test_outer_index():
    assert alm_outer_index(1e-2, 0.5) == 7
    assert alm_outer_index(1e-2, 0.1) == 2
    assert alm_outer_index(0.5, 0.5) == 1
    with pytest.raises(ContractError):
        alm_outer_index(1.0, 0.5)


def test_alm_K_and_cond_flags():
    b = alm_budget(1e-2, 0.5, **ALM_ARGS, **META)
    assert b.K == 7 and b.cond_ok is not None
    bare = alm_budget(1e-2, 0.5, **ALM_ARGS)
    assert bare.cond_ok is None and "Delta unknown" in bare.flags
    assert math.isinf(bare.kkt_multipliers["feas_d"])


def test_alm_unconstrained_degeneracy():
    args = dict(ALM_ARGS, Lambda=0.0, L_c=0.0, L_grad_c=0.0, c_hi=0.0, L_d=0.0, L_grad_d=0.0, d_hi=0.0)
    assert alm_budget(1e-2, 0.5, **args, Delta=10.0).L == args["L_grad_f"]


def test_alm_N_doubles_with_the_tau_factor():
    # near tau = 1 the factor 1 / (1 - tau^3.5) dominates; T also grows, so N at
    # least doubles when that factor doubles
    t1 = 0.99
    t2 = (1 - (1 - t1**3.5) / 2) ** (1 / 3.5)
    n1 = alm_budget(1e-2, t1, **ALM_ARGS, **META).N
    n2 = alm_budget(1e-2, t2, **ALM_ARGS, **META).N
    assert n2 / n1 >= 2 * (t1 / t2) ** 3.5


def test_alm_multipliers_formula():
    b = alm_budget(1e-2, 0.5, **ALM_ARGS, **META)
    B_d = 2 * (META["Delta"] + ALM_ARGS["D_y"]) / META["delta_d"]
    B_c = (META["L_F"] + ALM_ARGS["L_d"] * B_d + 1) / META["delta_c"]
    assert b.kkt_multipliers["feas_d"] == pytest.approx(B_d)
    assert b.kkt_multipliers["comp_d"] == pytest.approx(B_d * B_d)
    assert b.kkt_multipliers["feas_c"] == pytest.approx(B_c)
    assert b.kkt_multipliers["comp_c"] == pytest.approx(B_c * max(B_c, 10.0))


def test_foam_rate_branch_and_delta():
    b = foam_budget(1.0, 1.0, 1.0, 1e-3, 2 * math.sqrt(5), 2 * math.sqrt(3))
    assert b.alpha == 1.0
    assert b.delta == pytest.approx(12 * 5 + 8 * 3)
    cap = inner_trip_cap(1.0, 1.0)
    assert cap == math.ceil(96 * math.sqrt(2) * 9) + 2
    assert b.N % cap == 0 and b.N // cap >= 2


def test_foam_K_under_halving():
    args = (2.0, 0.5, 4.0)
    for eps in (1e-2, 1e-4, 1e-6):
        k1 = foam_budget(*args, eps, 3.0, 3.0, gap=5.0)
        k2 = foam_budget(*args, eps / 2, 3.0, 3.0, gap=5.0)
        assert k1.K <= k2.K <= k1.K + math.ceil(k1.rate * math.log(4)) + 1


@pytest.mark.parametrize("which", ["ppa", "alm", "foam"])
def test_budgets_monotone_in_inverse_eps(which):
    grid = np.geomspace(0.5, 1e-4, 12)
    if which == "ppa":
        vals = [ppa_budget(3.0, 1.0, e, e / 2, 2.0, 2.0, 5.0, -5.0, -5.0).N for e in grid]
    elif which == "alm":
        vals = [alm_budget(e, 0.5, **ALM_ARGS, **META).N for e in grid[1:]]
    else:
        vals = [foam_budget(2.0, 1.0, 3.0, e, 2.0, 2.0, gap=1.0).N for e in grid]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
