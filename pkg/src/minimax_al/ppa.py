"""Inexact proximal-point method for nonconvex-strongly-concave minimax problems.

Each outer step adds ``L||x - x_k||^2`` to the coupling term, which makes the
subproblem strongly convex in ``x``, and solves it to a decreasing accuracy
with :func:`minimax_al.foam.solve_sccsc` started at the current iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .budget import ppa_budget
from .core import GRAD_F, AffineHingeGradient, ContractError, EvalCounters, ProxFriendly, as_vec, box_diameter
from .foam import FoamError, SaddleSubproblem, solve_sccsc


class PpaError(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class NcscProblem:
    """``min_x max_y h(x,y) + p(x) - q(y)`` with ``h(x, .)`` strongly concave."""

    grad: Callable[[np.ndarray, np.ndarray], tuple]
    L_grad: float
    sigma_y: float
    p: ProxFriendly
    q: ProxFriendly
    value: Optional[Callable[[np.ndarray, np.ndarray], float]] = None
    grad_cost: tuple = GRAD_F

    def __post_init__(self):
        if not (self.L_grad > 0 and self.sigma_y > 0):
            raise ContractError("L_grad and sigma_y must be positive")


@dataclass
class PpaRecord:
    k: int
    eps_hat: float
    step: float
    residual: float
    foam_outer: int
    inner_trips: int
    counters: dict


@dataclass
class PpaTrace:
    records: list = field(default_factory=list)

    @property
    def outer_iterations(self) -> int:
        return len(self.records)


def shifted_subproblem(prob: NcscProblem, x_anchor) -> SaddleSubproblem:
    """Strongly convex-concave subproblem ``h(x,y) + L||x - x_anchor||^2``."""
    a = np.asarray(x_anchor, dtype=float).copy()
    L = prob.L_grad
    grad = prob.grad

    if isinstance(grad, AffineHingeGradient):
        shifted_grad = grad.shift_x(2 * L, a)
    else:

        def shifted_grad(x, y):
            gx, gy = grad(x, y)
            return gx + 2 * L * (x - a), gy

    value = None
    if prob.value is not None:
        base = prob.value

        def value(x, y):
            dx = x - a
            return base(x, y) + L * float(dx @ dx)

    return SaddleSubproblem(
        grad=shifted_grad,
        sigma_x=L,
        sigma_y=prob.sigma_y,
        L_grad=3 * L,
        p=prob.p,
        q=prob.q,
        value=value,
        grad_cost=prob.grad_cost,
    )


def _range_bound(prob, x, y, counters):
    # valid range of h over the box domain from one gradient and smoothness
    if not (prob.p.is_box_indicator and prob.q.is_box_indicator):
        raise ContractError("gap_bound is required when p or q is not a box indicator")
    gx, gy = prob.grad(x, y)
    counters.charge(prob.grad_cost)
    D = math.hypot(box_diameter(prob.p.domain), box_diameter(prob.q.domain))
    return 2 * math.hypot(np.linalg.norm(gx), np.linalg.norm(gy)) * D + prob.L_grad * D**2


def solve_ncsc(
    prob: NcscProblem,
    eps: float,
    eps_hat0: float,
    x0,
    y0,
    counters: Optional[EvalCounters] = None,
    max_outer: Optional[int] = None,
    gap_bound: Optional[float] = None,
):
    """Find an ``eps``-primal-dual stationary point.

    Parameters
    ----------
    prob : NcscProblem
    eps : float
        Target stationarity.
    eps_hat0 : float
        Initial subproblem accuracy, at most ``eps / 2``; the k-th subproblem
        is solved to ``eps_hat0 / (k + 1)``.
    x0, y0 : array
        Start in ``dom p x dom q``.
    counters : EvalCounters, optional
    max_outer : int, optional
        Defaults to ten times the worst-case bound.
    gap_bound : float, optional
        Upper bound on the range of ``h + p - q`` over the domain. Estimated
        from smoothness when both regularizers are box indicators.

    Returns
    -------
    (x, y), PpaTrace, EvalCounters
    """
    if not eps > 0 or not 0 < eps_hat0 <= eps / 2:
        raise ContractError("need eps > 0 and 0 < eps_hat0 <= eps / 2")
    counters = EvalCounters() if counters is None else counters
    x = as_vec(x0, dim=prob.p.domain.dim, name="x0").copy()
    y = as_vec(y0, dim=prob.q.domain.dim, name="y0").copy()
    if not (prob.p.domain.contains(x) and prob.q.domain.contains(y)):
        raise ContractError("starting point outside dom p x dom q")
    L = prob.L_grad
    D_x = box_diameter(prob.p.domain)
    if gap_bound is None:
        gap_bound = _range_bound(prob, x, y, counters)
    if max_outer is None:
        b = ppa_budget(
            L, prob.sigma_y, eps, eps_hat0, D_x, box_diameter(prob.q.domain),
            H0_max=gap_bound, H_star_low=0.0, H_low=0.0,
        )
        max_outer = 10 * (b.T + 1)
    sub_gap = gap_bound + L * D_x**2
    trace = PpaTrace()
    for k in range(max_outer):
        eps_hat = eps_hat0 / (k + 1)
        sub = shifted_subproblem(prob, x)
        try:
            cert, _ = solve_sccsc(sub, eps_hat, -sub.sigma_x * x, y, counters, gap_bound=sub_gap)
        except FoamError as exc:
            raise PpaError(f"subproblem {k} failed: {exc}", trace) from exc
        step = float(np.linalg.norm(cert.x - x))
        trace.records.append(
            PpaRecord(
                k=k, eps_hat=eps_hat, step=step, residual=cert.residual,
                foam_outer=cert.outer_iterations, inner_trips=sum(cert.inner_trips),
                counters=counters.snapshot(),
            )
        )
        x, y = cert.x, cert.y
        if step <= eps / (4 * L):
            return (x, y), trace, counters
    raise PpaError(f"no stationary point within {max_outer} outer iterations", trace)
