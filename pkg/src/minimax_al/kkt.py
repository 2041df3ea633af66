"""Independent certification of primal-dual stationarity and approximate KKT points.

For box regularizers the subdifferential of the indicator is the normal cone,
so the distance from a vector to ``g + N(x)`` separates by coordinate:

* interior coordinate: the cone is ``{0}`` and contributes ``|g_i|``;
* at the lower bound: the cone is ``s <= 0``, the best ``s`` cancels a positive
  ``g_i`` and the contribution is ``max(-g_i, 0)``;
* at the upper bound: the cone is ``s >= 0`` and the contribution is
  ``max(g_i, 0)``;
* degenerate coordinate (``lower == upper``): the cone is the whole line.

The maximization side is handled by negation: ``dist(0, grad_y L - dq(y))``
equals ``dist(0, -grad_y L + dq(y))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Box, ContractError, MinimaxProblem, ProxFriendly, as_vec

RESIDUALS = ("stat_x", "stat_y", "feas_c", "comp_c", "feas_d", "comp_d")


def dist_subdiff_box(g, x, box: Box) -> float:
    """``min ||g + s||`` over ``s`` in the normal cone of ``box`` at ``x``."""
    g = as_vec(g, dim=box.dim, name="g")
    x = as_vec(x, dim=box.dim, name="x")
    if not box.contains(x):
        raise ContractError("x lies outside the box")
    at_lo = x == box.lower
    at_hi = x == box.upper
    r = np.abs(g)
    r = np.where(at_lo, np.maximum(-g, 0.0), r)
    r = np.where(at_hi, np.maximum(g, 0.0), r)
    r = np.where(at_lo & at_hi, 0.0, r)
    return float(np.linalg.norm(r))


def prox_residual(g, x, reg: ProxFriendly, step: float) -> float:
    """Gradient-mapping surrogate ``||x - prox_{step reg}(x - step g)|| / step``."""
    x = as_vec(x, name="x")
    return float(np.linalg.norm(x - reg.prox(step, x - step * np.asarray(g))) / step)


def _stationarity(g, x, reg: ProxFriendly, step: float):
    if reg.is_box_indicator:
        return dist_subdiff_box(g, x, reg.domain), False
    return prox_residual(g, x, reg, step), True


@dataclass
class KKTReport:
    """The six residuals of an approximate KKT point and the multipliers used.

    ``surrogate`` is true when a stationarity entry came from the
    gradient-mapping surrogate rather than an exact subdifferential distance.
    """

    stat_x: float
    stat_y: float
    feas_c: float
    comp_c: float
    feas_d: float
    comp_d: float
    lam_x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lam_y: np.ndarray = field(default_factory=lambda: np.zeros(0))
    surrogate: bool = False

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in RESIDUALS}


def kkt_report(
    prob: MinimaxProblem,
    x,
    y,
    lam_x=None,
    lam_y=None,
    surrogate_step: Optional[float] = None,
) -> KKTReport:
    """Residuals of the KKT system at ``(x, y)`` with multipliers ``(lam_x, lam_y)``.

    Omitted multipliers (or constraint maps) count as zero. ``surrogate_step``
    is the prox step used for non-box regularizers, ``1 / L_grad`` by default.
    """
    x = as_vec(x, dim=prob.n, name="x")
    y = as_vec(y, dim=prob.m, name="y")
    gx, gy = prob.f.grad(x, y)
    gx, gy = np.array(gx, dtype=float), np.array(gy, dtype=float)
    feas_c = comp_c = feas_d = comp_d = 0.0
    lx = np.zeros(0) if prob.c is None else np.zeros(prob.c.dim)
    ly = np.zeros(0) if prob.d is None else np.zeros(prob.d.dim)
    if prob.c is not None:
        if lam_x is not None:
            lx = as_vec(lam_x, dim=prob.c.dim, name="lam_x")
        if np.any(lx < 0):
            raise ContractError("lam_x must be nonnegative")
        cv = np.asarray(prob.c.value(x), dtype=float)
        gx += prob.c.vjp(x, lx)
        feas_c = float(np.linalg.norm(np.maximum(cv, 0.0)))
        comp_c = abs(float(lx @ cv))
    if prob.d is not None:
        if lam_y is not None:
            ly = as_vec(lam_y, dim=prob.d.dim, name="lam_y")
        if np.any(ly < 0):
            raise ContractError("lam_y must be nonnegative")
        dv = np.asarray(prob.d.value(x, y), dtype=float)
        dgx, dgy = prob.d.vjp(x, y, ly)
        gx -= dgx
        gy -= dgy
        feas_d = float(np.linalg.norm(np.maximum(dv, 0.0)))
        comp_d = abs(float(ly @ dv))
    if not (prob.p.domain.contains(x) and prob.q.domain.contains(y)):
        raise ContractError("(x, y) must lie in dom p x dom q")
    step = 1.0 / prob.f.L_grad if surrogate_step is None else surrogate_step
    stat_x, sx = _stationarity(gx, x, prob.p, step)
    stat_y, sy = _stationarity(-gy, y, prob.q, step)
    return KKTReport(stat_x, stat_y, feas_c, comp_c, feas_d, comp_d, lx, ly, surrogate=sx or sy)


def is_eps_kkt(report: KKTReport, eps: float, multipliers: Optional[dict] = None) -> bool:
    """True iff every residual is at most ``eps`` times its multiplier (default 1)."""
    return not failed_residuals(report, eps, multipliers)


def failed_residuals(report: KKTReport, eps: float, multipliers: Optional[dict] = None) -> list:
    """Names of the residuals that exceed their ``eps``-scaled bound."""
    multipliers = multipliers or {}
    return [
        name for name in RESIDUALS
        if not getattr(report, name) <= eps * multipliers.get(name, 1.0)
    ]


def primal_dual_residual(report: KKTReport) -> float:
    """Worst stationarity entry; ``eps``-primal-dual stationarity means this is ``<= eps``."""
    return max(report.stat_x, report.stat_y)


__all__ = [
    "RESIDUALS", "KKTReport", "dist_subdiff_box", "failed_residuals", "is_eps_kkt",
    "kkt_report", "primal_dual_residual", "prox_residual",
]
