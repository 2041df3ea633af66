"""First-order augmented Lagrangian method for constrained minimax problems.

Solves ``min_x max_y F(x, y)`` subject to ``c(x) <= 0`` and ``d(x, y) <= 0``
by running :func:`minimax_al.ppa.solve_ncsc` on a sequence of augmented
Lagrangian subproblems::

    L(x, y) = F(x, y) + (||[lx + rho c(x)]_+||^2 - ||lx||^2) / (2 rho)
                      - (||[ly + rho d(x, y)]_+||^2 - ||ly||^2) / (2 rho)

with tolerance ``eps_k = tau^k``, penalty ``rho_k = 1 / eps_k`` and
safeguarded x-multipliers kept in the nonnegative ball of radius ``Lambda``.

Three run-time monitors check bounds that hold under the method's
assumptions: multiplier growth, the coupled-constraint violation and the
upper bound on the subproblem value. A failed monitor is logged, not raised.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .budget import AlmBudget, alm_budget, alm_outer_index
from .core import (
    AffineHingeGradient, Box, ConstraintMap, ContractError, EvalCounters, MinimaxProblem,
    as_vec, box_diameter, eval_F, project_nonneg_ball,
)
from .kkt import KKTReport, kkt_report
from .ppa import NcscProblem, PpaError, PpaTrace, solve_ncsc

log = logging.getLogger(__name__)


NF_SLACK = 1e-9


class AlmError(RuntimeError):
    """Inner solver failure, with the outer index and the states reached so far."""

    def __init__(self, message, k=None, states=None):
        super().__init__(message)
        self.k = k
        self.states = states or []


class NearlyFeasibleError(RuntimeError):
    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


@dataclass(frozen=True)
class ConstrainedProblem:
    """A minimax problem with both constraint maps and optional bound metadata.

    Parameters
    ----------
    problem : MinimaxProblem
        Must carry both ``c`` and ``d``.
    L_F : float, optional
        Lipschitz constant of ``F(., y)`` on ``dom p``.
    delta_c, theta : float, optional
        Constraint-qualification constants of ``c``.
    delta_d : float, optional
        Uniform Slater margin of ``d``.
    Delta : float, optional
        Upper bound on ``max F - min F`` over the domain.
    F_hi : float, optional
        Upper bound on ``max F`` over the domain.
    """

    problem: MinimaxProblem
    L_F: Optional[float] = None
    delta_c: Optional[float] = None
    delta_d: Optional[float] = None
    theta: Optional[float] = None
    Delta: Optional[float] = None
    F_hi: Optional[float] = None

    def __post_init__(self):
        if self.problem.c is None or self.problem.d is None:
            raise ContractError("a constrained problem needs both c and d")
        for name in ("L_F", "delta_c", "delta_d", "theta", "Delta"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ContractError(f"{name} must be positive when supplied")

    @property
    def D_x(self) -> float:
        return box_diameter(self.problem.p.domain)

    @property
    def D_y(self) -> float:
        return box_diameter(self.problem.q.domain)


@dataclass(frozen=True)
class ScheduleConfig:
    """Tolerance, penalty and safeguard schedule plus caps and monitor switch."""

    eps: float = 1e-2
    tau: float = 0.5
    Lambda: float = 10.0
    lam_x0: Optional[np.ndarray] = None
    lam_y0: Optional[np.ndarray] = None
    max_ppa_outer: Optional[int] = None
    monitors: bool = True


@dataclass
class AlmState:
    """Loop-entry state of outer iteration ``k``."""

    k: int
    eps_k: float
    rho_k: float
    lam_x: np.ndarray
    lam_y: np.ndarray
    x: np.ndarray
    y: np.ndarray
    x_nf: np.ndarray


@dataclass
class AlmIteration:
    k: int
    L_k: float
    init: str
    ppa_outer: int
    counters: dict
    trace: Optional[PpaTrace] = None


@dataclass
class AlmSolution:
    x: np.ndarray
    y: np.ndarray
    lam_y: np.ndarray
    lam_x_tilde: np.ndarray
    report: KKTReport
    monitors: list
    states: list
    iterations: list
    counters: EvalCounters
    budget: Optional[AlmBudget] = None
    warnings: list = field(default_factory=list)

    @property
    def outer_iterations(self) -> int:
        return len(self.iterations)


# AL oracles ------------------------------------------------------------------


def _hinge(lam, rho, val):
    return np.maximum(lam + rho * val, 0.0)


def _multipliers(prob, lam_x, lam_y):
    lx = np.zeros(0 if prob.c is None else prob.c.dim) if lam_x is None else np.asarray(lam_x, float)
    ly = np.zeros(0 if prob.d is None else prob.d.dim) if lam_y is None else np.asarray(lam_y, float)
    return lx, ly


def al_value(prob: MinimaxProblem, x, y, lam_x, lam_y, rho: float) -> float:
    """Augmented Lagrangian value; infinite values follow :func:`eval_F`."""
    if not rho > 0:
        raise ContractError("rho must be positive")
    val = eval_F(prob, x, y)
    if math.isinf(val):
        return val
    lx, ly = _multipliers(prob, lam_x, lam_y)
    if prob.c is not None:
        u = _hinge(lx, rho, prob.c.value(x))
        val += (u @ u - lx @ lx) / (2 * rho)
    if prob.d is not None:
        u = _hinge(ly, rho, prob.d.value(x, y))
        val -= (u @ u - ly @ ly) / (2 * rho)
    return float(val)


def al_x_value(prob: MinimaxProblem, x, y, lam_x, rho: float) -> float:
    """AL function of the minimization part, which leaves out the d-penalty."""
    val = eval_F(prob, x, y)
    if math.isinf(val) or prob.c is None:
        return val
    lx, _ = _multipliers(prob, lam_x, None)
    u = _hinge(lx, rho, prob.c.value(x))
    return float(val + (u @ u - lx @ lx) / (2 * rho))


def al_grads(prob: MinimaxProblem, x, y, lam_x, lam_y, rho: float):
    """Gradients of the smooth part of the augmented Lagrangian.

    ``grad_x = grad_x f + Jc' [lx + rho c]_+ - Jx d' [ly + rho d]_+`` and
    ``grad_y = grad_y f - Jy d' [ly + rho d]_+``.
    """
    lx, ly = _multipliers(prob, lam_x, lam_y)
    gx, gy = prob.f.grad(x, y)
    gx, gy = np.array(gx, dtype=float), np.array(gy, dtype=float)
    if prob.c is not None:
        gx += prob.c.vjp(x, _hinge(lx, rho, prob.c.value(x)))
    if prob.d is not None:
        dgx, dgy = prob.d.vjp(x, y, _hinge(ly, rho, prob.d.value(x, y)))
        gx -= dgx
        gy -= dgy
    return gx, gy


def al_gradient_oracle(prob: MinimaxProblem, lam_x, lam_y, rho: float):
    """``(x, y) -> al_grads(...)`` with the multipliers and penalty frozen.

    Returns an :class:`AffineHingeGradient` when ``grad f`` is affine and both
    constraint maps are affine, so that the compiled solver path applies.
    """
    lx, ly = _multipliers(prob, lam_x, lam_y)
    G = prob.f.grad
    affine = (
        isinstance(G, AffineHingeGradient)
        and G.r.shape[0] == 0
        and all(cm is None or cm.affine is not None for cm in (prob.c, prob.d))
    )
    if not affine:
        lx, ly = lx.copy(), ly.copy()
        return lambda x, y: al_grads(prob, x, y, lx, ly, rho)
    n, N = prob.n, prob.n + prob.m
    P, Q, r = [], [], []
    if prob.c is not None:
        J, b = prob.c.affine
        Jw = np.hstack((J, np.zeros((J.shape[0], N - n))))
        P.append(Jw)
        Q.append(rho * Jw)
        r.append(lx - rho * np.asarray(b))
    if prob.d is not None:
        J, b = prob.d.affine
        P.append(-J)
        Q.append(rho * J)
        r.append(ly - rho * np.asarray(b))
    if not P:
        return G
    return AffineHingeGradient(G.H, G.o, n, np.vstack(P), np.vstack(Q), np.concatenate(r))


def grad_cost(prob: MinimaxProblem) -> tuple:
    names = ["grad_f"]
    if prob.c is not None:
        names.append("grad_c")
    if prob.d is not None:
        names.append("grad_d")
    return tuple(names)


def lk_constants(prob: MinimaxProblem) -> dict:
    k = {"L_grad_f": prob.f.L_grad, "L_c": 0.0, "L_grad_c": 0.0, "c_hi": 0.0,
         "L_d": 0.0, "L_grad_d": 0.0, "d_hi": 0.0}
    if prob.c is not None:
        k.update(L_c=prob.c.lipschitz, L_grad_c=prob.c.smoothness, c_hi=prob.c.hi)
    if prob.d is not None:
        k.update(L_d=prob.d.lipschitz, L_grad_d=prob.d.smoothness, d_hi=prob.d.hi)
    return k


def lipschitz_Lk(constants: dict, rho: float, lam_x_norm: float, lam_y_norm: float) -> float:
    """Smoothness constant of the k-th AL subproblem."""
    k = constants
    return (
        k["L_grad_f"]
        + rho * k["L_c"] ** 2 + rho * k["c_hi"] * k["L_grad_c"] + lam_x_norm * k["L_grad_c"]
        + rho * k["L_d"] ** 2 + rho * k["d_hi"] * k["L_grad_d"] + lam_y_norm * k["L_grad_d"]
    )


def al_subproblem(prob: MinimaxProblem, lam_x, lam_y, rho: float, L_k: float) -> NcscProblem:
    lx, ly = _multipliers(prob, lam_x, lam_y)
    lx, ly = lx.copy(), ly.copy()
    return NcscProblem(
        grad=al_gradient_oracle(prob, lx, ly, rho),
        L_grad=L_k,
        sigma_y=prob.f.sigma,
        p=prob.p,
        q=prob.q,
        value=lambda x, y: al_value(prob, x, y, lx, ly, rho),
        grad_cost=grad_cost(prob),
    )


# outer-loop pieces -------------------------------------------------------------


def select_init(prob: MinimaxProblem, x_k, y_k, x_nf, lam_x, rho: float) -> np.ndarray:
    """Warm start ``x_k`` unless the nearly feasible point has a smaller x-part AL value."""
    a = al_x_value(prob, x_k, y_k, lam_x, rho)
    b = al_x_value(prob, x_nf, y_k, lam_x, rho)
    if math.isinf(a) and math.isinf(b) and a > 0 and b > 0:
        raise ContractError("both candidates lie outside dom p")
    return np.asarray(x_k if a <= b else x_nf, dtype=float)


def update_multipliers(lam_x, lam_y, rho: float, c_val, d_val, Lambda: float):
    """Safeguarded x-update in the nonnegative ball and plain y-update."""
    lx = project_nonneg_ball(Lambda, np.asarray(lam_x, float) + rho * np.asarray(c_val, float))
    ly = _hinge(np.asarray(lam_y, float), rho, np.asarray(d_val, float))
    return lx, ly


def growth_bound(lam_y0_norm: float, Delta: float, D_y: float, tau: float) -> float:
    return lam_y0_norm**2 + 2 * (Delta + D_y) / (1 - tau)


def monitor_multiplier_growth(state: AlmState, lam_y0, Delta: float, D_y: float, tau: float) -> bool:
    """Check ``||ly^k||^2 / rho_k <= ||ly^0||^2 + 2 (Delta + D_y) / (1 - tau)``."""
    ly = np.asarray(state.lam_y, float)
    lhs = float(ly @ ly) / state.rho_k
    return lhs <= growth_bound(float(np.linalg.norm(lam_y0)), Delta, D_y, tau)


def find_nearly_feasible(
    c: ConstraintMap,
    domain: Box,
    eps: float,
    x0=None,
    max_iter: int = 10000,
    counters: Optional[EvalCounters] = None,
) -> np.ndarray:
    """Projected gradient on ``||[c(x)]_+||^2`` until the violation is at most ``sqrt(eps)``."""
    if not 0 < eps < 1:
        raise ContractError("eps must lie in (0, 1)")
    target = math.sqrt(eps)
    x = domain.center if x0 is None else np.clip(as_vec(x0, dim=domain.dim), domain.lower, domain.upper)
    smooth = 2 * (c.lipschitz**2 + c.hi * c.smoothness)
    step = 1.0 / smooth if smooth > 0 else 1.0
    best, best_res = x, math.inf
    for _ in range(max_iter + 1):
        viol = np.maximum(np.asarray(c.value(x), float), 0.0)
        res = float(np.linalg.norm(viol))
        if res < best_res:
            best, best_res = x, res
        if res <= target:
            return x
        g = 2 * c.vjp(x, viol)
        if counters is not None:
            counters.charge(("grad_c",))
        x_new = np.clip(x - step * g, domain.lower, domain.upper)
        if np.array_equal(x_new, x):
            break
        x = x_new
    raise NearlyFeasibleError(
        f"violation {best_res:.3g} above sqrt(eps) = {target:.3g}", best=best, residual=best_res
    )


def _max_over_y(sub: NcscProblem, x, y0, tol=1e-9, max_iter=20000):
    """``max_y`` of the subproblem value by accelerated projected ascent (box q only)."""
    box = sub.q.domain
    L, mu = sub.L_grad, sub.sigma_y
    mom = (1 - math.sqrt(mu / L)) / (1 + math.sqrt(mu / L))
    y = np.clip(y0, box.lower, box.upper)
    v = y
    for _ in range(max_iter):
        y_new = np.clip(v + sub.grad(x, v)[1] / L, box.lower, box.upper)
        gmap = L * np.linalg.norm(np.clip(y_new + sub.grad(x, y_new)[1] / L, box.lower, box.upper) - y_new)
        if gmap <= tol:
            break
        v = y_new + mom * (y_new - y)
        y = y_new
    # a gradient-mapping norm G bounds the value gap by G^2 / (2 mu)
    return sub.value(x, y_new) + gmap**2 / (2 * mu)


def _monitor(logbook, k, name, lhs, rhs):
    ok = bool(lhs <= rhs)
    logbook.append({"k": k, "monitor": name, "ok": ok, "lhs": float(lhs), "rhs": float(rhs)})
    if not ok:
        log.warning("monitor %s failed at k=%d: %.6g > %.6g", name, k, lhs, rhs)
    return ok


def solve_constrained(
    cprob: ConstrainedProblem,
    eps: float,
    tau: float,
    Lambda: float,
    lam_x0=None,
    lam_y0=None,
    x0=None,
    y0=None,
    x_nf=None,
    max_ppa_outer: Optional[int] = None,
    monitors: bool = True,
    counters: Optional[EvalCounters] = None,
) -> AlmSolution:
    """Run ``K + 1`` augmented Lagrangian iterations, ``K = ceil(log eps / log tau)_+``.

    Parameters
    ----------
    cprob : ConstrainedProblem
    eps, tau : float
        Target accuracy and schedule ratio, both in ``(0, 1)``.
    Lambda : float
        Radius of the multiplier safeguard ball.
    lam_x0, lam_y0 : array, optional
        Initial multipliers, zero by default.
    x0, y0 : array, optional
        Start in ``dom p x dom q``, zero by default.
    x_nf : array, optional
        Point with ``||[c(x_nf)]_+|| <= sqrt(eps)``. Computed by
        :func:`find_nearly_feasible` when omitted.
    max_ppa_outer : int, optional
        Cap forwarded to each proximal-point solve.
    monitors : bool
        Evaluate the theoretical-bound monitors (needs ``Delta`` metadata).

    Returns
    -------
    AlmSolution

    Raises
    ------
    AlmError
        When an inner solve fails.
    """
    prob = cprob.problem
    if not (0 < eps < 1 and 0 < tau < 1):
        raise ContractError("eps and tau must lie in (0, 1)")
    if not Lambda > 0:
        raise ContractError("Lambda must be positive")
    counters = EvalCounters() if counters is None else counters
    lam_x = np.zeros(prob.c.dim) if lam_x0 is None else as_vec(lam_x0, dim=prob.c.dim, name="lam_x0")
    lam_y = np.zeros(prob.d.dim) if lam_y0 is None else as_vec(lam_y0, dim=prob.d.dim, name="lam_y0")
    if np.any(lam_x < 0) or np.linalg.norm(lam_x) > Lambda:
        raise ContractError("lam_x0 must lie in the nonnegative ball of radius Lambda")
    if np.any(lam_y < 0):
        raise ContractError("lam_y0 must be nonnegative")
    x = np.zeros(prob.n) if x0 is None else as_vec(x0, dim=prob.n, name="x0").copy()
    y = np.zeros(prob.m) if y0 is None else as_vec(y0, dim=prob.m, name="y0").copy()
    if not (prob.p.domain.contains(x) and prob.q.domain.contains(y)):
        raise ContractError("starting point outside dom p x dom q")
    if x_nf is None:
        x_nf = find_nearly_feasible(prob.c, prob.p.domain, eps, counters=counters)
    x_nf = as_vec(x_nf, dim=prob.n, name="x_nf")
    # generated instances hit the threshold exactly, up to rounding
    if np.linalg.norm(np.maximum(prob.c.value(x_nf), 0.0)) > math.sqrt(eps) + NF_SLACK:
        raise ContractError("x_nf is not sqrt(eps)-nearly feasible")

    K = alm_outer_index(eps, tau)
    consts = lk_constants(prob)
    lam_y0_vec = lam_y.copy()
    ly0 = float(np.linalg.norm(lam_y0_vec))
    budget = alm_budget(
        eps, tau, Lambda, prob.f.sigma,
        consts["L_grad_f"], consts["L_c"], consts["L_grad_c"], consts["c_hi"],
        consts["L_d"], consts["L_grad_d"], consts["d_hi"], cprob.D_x, cprob.D_y,
        lam_y0_norm=ly0, Delta=cprob.Delta, theta=cprob.theta,
        delta_c=cprob.delta_c, delta_d=cprob.delta_d, L_F=cprob.L_F,
    )
    notes = []
    if budget.cond_ok is False:
        notes.append("condition on eps for the KKT guarantees is violated")
        log.warning("alm: %s (eps=%g, tau=%g, Lambda=%g)", notes[-1], eps, tau, Lambda)
    watch = monitors and cprob.Delta is not None
    logbook, states, iters = [], [], []

    for k in range(K + 1):
        eps_k = tau**k
        rho_k = 1.0 / eps_k
        assert abs(eps_k * rho_k - 1.0) <= 1e-12
        state = AlmState(k, eps_k, rho_k, lam_x.copy(), lam_y.copy(), x.copy(), y.copy(), x_nf)
        states.append(state)
        if watch:
            _monitor(logbook, k, "multiplier_growth", float(lam_y @ lam_y) / rho_k,
                     growth_bound(ly0, cprob.Delta, cprob.D_y, tau))
        L_k = lipschitz_Lk(consts, rho_k, float(np.linalg.norm(lam_x)), float(np.linalg.norm(lam_y)))
        x_init = select_init(prob, x, y, x_nf, lam_x, rho_k)
        init = "x_k" if x_init is x or np.array_equal(x_init, x) else "x_nf"
        sub = al_subproblem(prob, lam_x, lam_y, rho_k, L_k)
        try:
            (x_new, y_new), trace, _ = solve_ncsc(
                sub, eps_k, eps_k / 2, x_init, y, counters, max_outer=max_ppa_outer
            )
        except PpaError as exc:
            raise AlmError(f"outer iteration {k}: {exc}", k=k, states=states) from exc
        iters.append(AlmIteration(k, L_k, init, trace.outer_iterations, counters.snapshot(), trace))
        if watch and cprob.F_hi is not None and prob.q.is_box_indicator:
            rhs = (
                cprob.Delta + cprob.F_hi + Lambda + 0.5 * (1 / tau + ly0**2)
                + (cprob.Delta + cprob.D_y) / (1 - tau) + 0.5 * (1 / L_k + L_k / prob.f.sigma**2) * eps_k**2
            )
            _monitor(logbook, k, "al_upper_bound", _max_over_y(sub, x_new, y_new), rhs)

        c_val = np.asarray(prob.c.value(x_new), float)
        d_val = np.asarray(prob.d.value(x_new, y_new), float)
        lam_x_tilde = _hinge(lam_x, rho_k, c_val)
        lam_x_new, lam_y_new = update_multipliers(lam_x, lam_y, rho_k, c_val, d_val, Lambda)
        if watch and cprob.delta_d is not None:
            dd2 = cprob.delta_d**2
            if rho_k >= 4 * ly0**2 / dd2 + 8 * (cprob.Delta + cprob.D_y) / (dd2 * (1 - tau)):
                viol = float(np.linalg.norm(np.maximum(d_val, 0.0)))
                mid = float(np.linalg.norm(lam_y_new)) / rho_k
                _monitor(logbook, k, "y_constraint", viol, mid)
                _monitor(logbook, k, "y_constraint_bound", mid,
                         2 * (cprob.Delta + cprob.D_y) / (rho_k * cprob.delta_d))
        x, y, lam_x, lam_y = x_new, y_new, lam_x_new, lam_y_new

    states.append(AlmState(K + 1, tau ** (K + 1), tau ** -(K + 1), lam_x.copy(), lam_y.copy(),
                           x.copy(), y.copy(), x_nf))
    if watch:
        _monitor(logbook, K + 1, "multiplier_growth", float(lam_y @ lam_y) / states[-1].rho_k,
                 growth_bound(ly0, cprob.Delta, cprob.D_y, tau))
    report = kkt_report(prob, x, y, lam_x_tilde, lam_y)
    return AlmSolution(
        x=x, y=y, lam_y=lam_y, lam_x_tilde=lam_x_tilde, report=report, monitors=logbook,
        states=states, iterations=iters, counters=counters, budget=budget, warnings=notes,
    )
