"""Optimal first-order method for strongly-convex-strongly-concave saddle problems.

Solves ``min_x max_y hbar(x, y) + p(x) - q(y)`` where ``hbar`` is
``sigma_x``-strongly convex in ``x``, ``sigma_y``-strongly concave in ``y`` and
``L``-smooth, and terminates with a verifiable certificate of
``eps``-primal-dual stationarity.

The outer iteration runs in the scaled variable ``z = -sigma_x * x``. Each outer
step solves a regularized monotone inclusion by an anchored extragradient loop
whose exit test is checkable from computed quantities only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .budget import foam_budget, inner_trip_cap
from . import _kernels
from .core import (
    GRAD_F, AffineHingeGradient, ContractError, EvalCounters, ProxFriendly, as_vec, box_diameter,
)


class FoamError(RuntimeError):
    """Iteration cap reached; ``state`` carries the last iterate for diagnosis."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state or {}


@dataclass(frozen=True)
class SaddleSubproblem:
    """Oracle bundle for a strongly-convex-strongly-concave saddle problem.

    ``grad(x, y)`` returns ``(grad_x hbar, grad_y hbar)``. Each call is charged to
    the counters named in ``grad_cost``.
    """

    grad: Callable[[np.ndarray, np.ndarray], tuple]
    sigma_x: float
    sigma_y: float
    L_grad: float
    p: ProxFriendly
    q: ProxFriendly
    value: Optional[Callable[[np.ndarray, np.ndarray], float]] = None
    grad_cost: tuple = GRAD_F

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_y > 0 and self.L_grad > 0):
            raise ContractError("moduli and smoothness constant must be positive")
        if self.sigma_x > self.L_grad * (1 + 1e-12) or self.sigma_y > self.L_grad * (1 + 1e-12):
            raise ContractError("strong convexity/concavity moduli cannot exceed L_grad")


@dataclass(frozen=True)
class FoamParams:
    alpha: float
    eta_z: float
    eta_y: float
    zeta: float
    gamma_x: float
    gamma_y: float
    zeta_bar: float

    @classmethod
    def for_subproblem(cls, sub: SaddleSubproblem) -> "FoamParams":
        sx, sy, L = sub.sigma_x, sub.sigma_y, sub.L_grad
        alpha = min(1.0, math.sqrt(8 * sy / sx))
        return cls(
            alpha=alpha,
            eta_z=sx / 2,
            eta_y=min(1 / (2 * sy), 4 / (alpha * sx)),
            zeta=1 / (2 * math.sqrt(5) * (1 + 8 * L / sx)),
            gamma_x=8 / sx,
            gamma_y=8 / sx,
            zeta_bar=min(sx, sy) / L**2,
        )

    @staticmethod
    def beta(t: int) -> float:
        return 2 / (t + 3)


@dataclass
class Certificate:
    """Output point with a subgradient witness of its stationarity.

    ``witness_x`` lies in the x-subdifferential of the full objective at
    ``(x, y)`` and ``witness_y`` in its y-subdifferential; ``residual`` is the
    norm of the stacked witness.
    """

    x: np.ndarray
    y: np.ndarray
    residual: float
    witness_x: np.ndarray
    witness_y: np.ndarray
    outer_iterations: int = 0
    inner_trips: list = field(default_factory=list)


def _charge(counters, names):
    if counters is not None:
        counters.charge(names)


def hat_h_grads(sub: SaddleSubproblem, x, y, counters: Optional[EvalCounters] = None):
    """Gradients of ``hbar(x,y) - sigma_x||x||^2/2 + sigma_y||y||^2/2``."""
    gx, gy = sub.grad(x, y)
    _charge(counters, sub.grad_cost)
    return gx - sub.sigma_x * x, gy + sub.sigma_y * y


def _a_from_hat(sub, ghx, ghy, x, y, z_g, y_g):
    a_x = ghx + sub.sigma_x * (x - z_g / sub.sigma_x) / 2
    a_y = -ghy + sub.sigma_y * y + sub.sigma_x * (y - y_g) / 8
    return a_x, a_y


def a_field(sub: SaddleSubproblem, params: FoamParams, x, y, z_g, y_g, counters=None):
    """Operator whose zero (plus prox subgradients) the inner loop seeks."""
    ghx, ghy = hat_h_grads(sub, x, y, counters)
    return _a_from_hat(sub, ghx, ghy, x, y, z_g, y_g)


@dataclass
class InnerResult:
    x: np.ndarray
    y: np.ndarray
    b_x: np.ndarray
    b_y: np.ndarray
    trips: int
    hat_grad_x: np.ndarray
    hat_grad_y: np.ndarray


def inner_loop(
    sub: SaddleSubproblem,
    params: FoamParams,
    z_g,
    y_g,
    counters: Optional[EvalCounters] = None,
    max_trips: Optional[int] = None,
    compiled: bool = True,
) -> InnerResult:
    """Anchored extragradient loop for one outer step.

    Runs until ``gx||a_x + b_x||^2 + gy||a_y + b_y||^2`` drops to at most
    ``||x - x_start||^2/gx + ||y - y_start||^2/gy``, where ``b`` are the
    subgradients recovered from the last prox steps.

    When the gradient is an :class:`AffineHingeGradient` and both
    regularizers are box indicators, a compiled copy of the loop runs
    instead; pass ``compiled=False`` to force the generic path.
    """
    if max_trips is None:
        max_trips = 10 * (inner_trip_cap(sub.L_grad, sub.sigma_x) - 2) + 20
    if compiled and _compiled_ok(sub):
        return _inner_loop_compiled(sub, params, z_g, y_g, counters, max_trips)
    sx = sub.sigma_x
    gam_x, gam_y = params.gamma_x, params.gamma_y
    s_x, s_y = params.zeta * gam_x, params.zeta * gam_y
    prox_p, prox_q, grad = sub.p.prox, sub.q.prox, sub.grad
    # a_x = grad_x hbar - sx x / 2 - z_g / 2 and a_y = -grad_y hbar + sx (y - y_g) / 8,
    # the same operator as _a_from_hat with the sigma terms cancelled.
    half_zg = 0.5 * z_g
    sx2, sx8 = 0.5 * sx, 0.125 * sx
    n_grad = n_prox = 0

    x_start = -z_g / sx
    y_start = y_g
    gx, gy = grad(x_start, y_start)
    n_grad += 1
    vx = x_start - s_x * (gx - sx2 * x_start - half_zg)
    vy = y_start - s_y * (sx8 * (y_start - y_g) - gy)
    x0 = prox_p(s_x, vx)
    y0 = prox_q(s_y, vy)
    n_prox += 1
    bx = (vx - x0) / s_x
    by = (vy - y0) / s_y

    x, y = x0, y0
    t = 0
    try:
        while True:
            gx, gy = grad(x, y)
            n_grad += 1
            rx = gx - sx2 * x - half_zg + bx
            ry = sx8 * (y - y_g) - gy + by
            dx, dy = x - x_start, y - y_start
            if gam_x * (rx @ rx) + gam_y * (ry @ ry) <= (dx @ dx) / gam_x + (dy @ dy) / gam_y:
                return InnerResult(x, y, bx, by, t, gx - sx * x, gy + sub.sigma_y * y)
            if t >= max_trips:
                raise FoamError(
                    f"inner loop exceeded {max_trips} trips",
                    state=dict(x=x, y=y, b_x=bx, b_y=by),
                )
            beta = params.beta(t)
            ancx = x + beta * (x0 - x)
            ancy = y + beta * (y0 - y)
            xh = ancx - s_x * rx
            yh = ancy - s_y * ry
            ghx, ghy = grad(xh, yh)
            n_grad += 1
            vx = ancx - s_x * (ghx - sx2 * xh - half_zg)
            vy = ancy - s_y * (sx8 * (yh - y_g) - ghy)
            x = prox_p(s_x, vx)
            y = prox_q(s_y, vy)
            n_prox += 1
            bx = (vx - x) / s_x
            by = (vy - y) / s_y
            t += 1
    finally:
        if counters is not None:
            counters.charge(sub.grad_cost, n_grad)
            counters.charge(("prox_p", "prox_q"), n_prox)


def _compiled_ok(sub):
    return (
        isinstance(sub.grad, AffineHingeGradient)
        and sub.p.is_box_indicator
        and sub.q.is_box_indicator
        and sub.grad.n == sub.p.domain.dim
        and sub.grad.dim == sub.p.domain.dim + sub.q.domain.dim
    )


def _inner_loop_compiled(sub, params, z_g, y_g, counters, max_trips):
    # the kernel takes one step size, valid because gamma_x == gamma_y
    G = sub.grad
    n = G.n
    lo = np.concatenate((sub.p.domain.lower, sub.q.domain.lower))
    hi = np.concatenate((sub.p.domain.upper, sub.q.domain.upper))
    status, w, b, t, n_grad, n_prox, g = _kernels.inner_kernel(
        G.Ht, G.o, G.P, G.Qt, G.r, n, float(sub.sigma_x),
        np.ascontiguousarray(z_g, dtype=float), np.ascontiguousarray(y_g, dtype=float),
        float(params.zeta * params.gamma_x), float(params.gamma_x), lo, hi, int(max_trips),
    )
    if counters is not None:
        counters.charge(sub.grad_cost, n_grad)
        counters.charge(("prox_p", "prox_q"), n_prox)
    x, y, bx, by = w[:n], w[n:], b[:n], b[n:]
    if status:
        raise FoamError(
            f"inner loop exceeded {max_trips} trips", state=dict(x=x, y=y, b_x=bx, b_y=by)
        )
    return InnerResult(x, y, bx, by, int(t), g[:n] - sub.sigma_x * x, g[n:] + sub.sigma_y * y)


def _default_gap(sub, x, y, counters):
    """Bound on the range of ``hbar`` over the domain from one gradient and smoothness."""
    if not (sub.p.is_box_indicator and sub.q.is_box_indicator):
        raise ContractError("gap_bound is required when p or q is not a box indicator")
    gx, gy = sub.grad(x, y)
    _charge(counters, sub.grad_cost)
    D = math.hypot(box_diameter(sub.p.domain), box_diameter(sub.q.domain))
    return 2 * math.hypot(np.linalg.norm(gx), np.linalg.norm(gy)) * D + sub.L_grad * D**2


def default_outer_cap(sub, eps, gap, safety=10):
    b = foam_budget(
        sub.sigma_x, sub.sigma_y, sub.L_grad, eps,
        box_diameter(sub.p.domain), box_diameter(sub.q.domain), gap=gap,
    )
    return safety * max(b.K, 1)


def solve_sccsc(
    sub: SaddleSubproblem,
    eps: float,
    z0,
    y0,
    counters: Optional[EvalCounters] = None,
    max_outer: Optional[int] = None,
    max_inner: Optional[int] = None,
    gap_bound: Optional[float] = None,
    callback: Optional[Callable] = None,
) -> tuple[Certificate, EvalCounters]:
    """Find an ``eps``-primal-dual stationary point with a certificate.

    Parameters
    ----------
    sub : SaddleSubproblem
    eps : float
        Target accuracy of the certificate residual.
    z0 : array
        Start in the scaled variable; ``-z0 / sigma_x`` must lie in ``dom p``.
    y0 : array
        Start in ``dom q``.
    counters : EvalCounters, optional
        Accumulates oracle calls; a fresh instance is created if omitted.
    max_outer : int, optional
        Outer cap. Defaults to ten times the worst-case bound, which needs
        ``gap_bound`` (a bound on ``H* - H_low``) or box regularizers.
    callback : callable, optional
        Called as ``callback(k, x, y)`` with the certified candidate of every
        outer iteration.

    Returns
    -------
    certificate, counters

    Raises
    ------
    FoamError
        If an iteration cap is exceeded.
    """
    if not eps > 0:
        raise ContractError("eps must be positive")
    counters = EvalCounters() if counters is None else counters
    params = FoamParams.for_subproblem(sub)
    sx, sy = sub.sigma_x, sub.sigma_y
    z = as_vec(z0, dim=sub.p.domain.dim, name="z0").copy()
    y = as_vec(y0, dim=sub.q.domain.dim, name="y0").copy()
    if not sub.p.domain.contains(-z / sx, tol=1e-9) or not sub.q.domain.contains(y, tol=1e-9):
        raise ContractError("starting point outside the domain")
    if max_outer is None:
        if gap_bound is None:
            gap_bound = _default_gap(sub, -z / sx, y, counters)
        max_outer = default_outer_cap(sub, eps, gap_bound)
    z_f, y_f = z.copy(), y.copy()
    zb = params.zeta_bar
    trips = []
    for k in range(max_outer):
        z_g = params.alpha * z + (1 - params.alpha) * z_f
        y_g = params.alpha * y + (1 - params.alpha) * y_f
        inner = inner_loop(sub, params, z_g, y_g, counters, max_inner)
        trips.append(inner.trips)
        x_f, y_f = inner.x, inner.y
        z_f = inner.hat_grad_x + inner.b_x
        w_f = -inner.hat_grad_y + inner.b_y
        z = z + params.eta_z / sx * (z_f - z) - params.eta_z * (x_f + z_f / sx)
        y = y + params.eta_y * sy * (y_f - y) - params.eta_y * (w_f + sy * y_f)
        x = -z / sx

        gx, gy = sub.grad(x, y)
        _charge(counters, sub.grad_cost)
        xt = sub.p.prox(zb, x - zb * gx)
        yt = sub.q.prox(zb, y + zb * gy)
        _charge(counters, ("prox_p", "prox_q"))
        gxt, gyt = sub.grad(xt, yt)
        _charge(counters, sub.grad_cost)
        wx = (x - xt) / zb - (gx - gxt)
        wy = (yt - y) / zb - (gy - gyt)
        res = math.sqrt(wx @ wx + wy @ wy)
        if callback is not None:
            callback(k, xt, yt)
        if res <= eps:
            cert = Certificate(xt, yt, res, wx, wy, outer_iterations=k + 1, inner_trips=trips)
            return cert, counters
    raise FoamError(
        f"no certified point within {max_outer} outer iterations",
        state=dict(x=xt, y=yt, residual=res, inner_trips=trips),
    )
