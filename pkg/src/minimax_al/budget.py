"""Closed-form complexity budgets for the three solver layers.

Every function here is a literal evaluation of a worst-case bound. Solvers
use them to size iteration caps; the CLI reports them next to observed counts.
Bounds on unknown quantities (optimal values, potential gaps) are inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .core import ContractError


def _ceil_plus(v: float) -> int:
    if math.isinf(v):
        raise OverflowError("budget is infinite")
    return max(0, math.ceil(v))


def _log_plus(v: float) -> float:
    return max(0.0, math.log(v)) if v > 0 else 0.0


def _require_positive(**kwargs):
    for name, v in kwargs.items():
        if v is None or not v > 0:
            raise ContractError(f"{name} must be positive, got {v!r}")


def inner_trip_cap(L_grad: float, sigma_x: float) -> int:
    """Per-call bound ``ceil(96*sqrt(2)*(1 + 8 L / sigma_x)) + 2`` on the inner loop."""
    return math.ceil(96 * math.sqrt(2) * (1 + 8 * L_grad / sigma_x)) + 2


@dataclass(frozen=True)
class FoamBudget:
    alpha: float
    delta: float
    rate: float
    theta0: float
    K: int
    N: int
    inner_cap: int


def foam_budget(
    sigma_x: float,
    sigma_y: float,
    L_grad: float,
    eps: float,
    D_x: float,
    D_y: float,
    gap: float = 0.0,
    theta0: Optional[float] = None,
) -> FoamBudget:
    """Outer-iteration and oracle-call budget of the SCSC solver.

    ``gap`` bounds ``H* - H_low`` of the subproblem. ``theta0`` bounds the
    initial potential; by default it is taken as ``delta + 2 gap / alpha``,
    which dominates the potential for any start in the domain.
    """
    _require_positive(sigma_x=sigma_x, sigma_y=sigma_y, L_grad=L_grad, eps=eps)
    if gap < 0 or D_x < 0 or D_y < 0:
        raise ContractError("gap and diameters must be nonnegative")
    alpha = min(1.0, math.sqrt(8 * sigma_y / sigma_x))
    eta_z = sigma_x / 2
    eta_y = min(1 / (2 * sigma_y), 4 / (alpha * sigma_x))
    zeta_bar = min(sigma_x, sigma_y) / L_grad**2
    delta = (2 + 1 / alpha) * sigma_x * D_x**2 + max(2 * sigma_y, alpha * sigma_x / 4) * D_y**2
    if theta0 is None:
        theta0 = delta + 2 * gap / alpha
    rate = max(2 / alpha, alpha * sigma_x / (4 * sigma_y))
    denom = (1 / zeta_bar + L_grad) ** -2 * eps**2
    ratio = 4 * max(eta_z / sigma_x**2, eta_y) * theta0 / denom
    K = _ceil_plus(rate * math.log(ratio)) if ratio > 0 else 0
    cap = inner_trip_cap(L_grad, sigma_x)
    n_ratio = (
        4
        * max(1 / (2 * sigma_x), min(1 / (2 * sigma_y), 4 / (alpha * sigma_x)))
        * (delta + 2 * gap / alpha)
        / ((L_grad**2 / min(sigma_x, sigma_y) + L_grad) ** -2 * eps**2)
    )
    n_rate = max(2.0, math.sqrt(sigma_x / (2 * sigma_y)))
    N = _ceil_plus(n_rate * math.log(n_ratio) if n_ratio > 0 else 0.0) * cap
    return FoamBudget(alpha=alpha, delta=delta, rate=rate, theta0=theta0, K=K, N=N, inner_cap=cap)


@dataclass(frozen=True)
class PpaBudget:
    alpha: float
    delta: float
    T: int
    N: float
    inputs: dict = field(default_factory=dict)


def ppa_budget(
    L_grad: float,
    sigma_y: float,
    eps: float,
    eps_hat0: float,
    D_x: float,
    D_y: float,
    H0_max: float,
    H_star_low: float,
    H_low: float,
) -> PpaBudget:
    """Outer-iteration bound ``T + 1`` and oracle budget ``N`` of the proximal-point layer.

    Parameters
    ----------
    H0_max : float
        Upper bound on ``max_y H(x0, y)``.
    H_star_low : float
        Lower bound on the saddle value ``H*``.
    H_low : float
        Lower bound on ``H`` over the domain.
    """
    _require_positive(L_grad=L_grad, sigma_y=sigma_y, eps=eps, eps_hat0=eps_hat0)
    if eps_hat0 > eps / 2:
        raise ContractError("eps_hat0 must not exceed eps / 2")
    L = L_grad
    alpha = min(1.0, math.sqrt(8 * sigma_y / L))
    delta = (2 + 1 / alpha) * L * D_x**2 + max(2 * sigma_y, alpha * L / 4) * D_y**2
    gap0 = max(0.0, H0_max - H_star_low)
    T = _ceil_plus(
        16 * gap0 * L / eps**2 + 32 * eps_hat0**2 * (1 + L**2 / sigma_y**2) / eps**2 - 1
    )
    # H* <= max_y H(x0, y), so H0_max - H_low bounds H* - H_low.
    star_gap = max(0.0, H0_max - H_low)
    num = (
        4
        * max(1 / (2 * L), min(1 / (2 * sigma_y), 4 / (alpha * L)))
        * (delta + 2 / alpha * (star_gap + L * D_x**2))
    )
    den = (9 * L**2 / min(L, sigma_y) + 3 * L) ** -2 * eps_hat0**2
    N = (
        3397
        * max(2.0, math.sqrt(L / (2 * sigma_y)))
        * ((T + 1) * _log_plus(num / den) + T + 1 + 2 * T * math.log(T + 1))
    )
    inputs = dict(
        L_grad=L, sigma_y=sigma_y, eps=eps, eps_hat0=eps_hat0, D_x=D_x, D_y=D_y,
        H0_max=H0_max, H_star_low=H_star_low, H_low=H_low,
    )
    return PpaBudget(alpha=alpha, delta=delta, T=T, N=N, inputs=inputs)


def alm_outer_index(eps: float, tau: float) -> int:
    """``K = ceil(log eps / log tau)_+``; the method runs ``K + 1`` outer iterations."""
    if not (0 < eps < 1 and 0 < tau < 1):
        raise ContractError("eps and tau must lie in (0, 1)")
    ratio = math.log(eps) / math.log(tau)
    # log(0.01)/log(0.1) evaluates to 2.0000000000000004; snap such ties.
    if abs(ratio - round(ratio)) < 1e-9:
        ratio = round(ratio)
    return max(0, math.ceil(ratio))


@dataclass(frozen=True)
class AlmBudget:
    L: float
    alpha: float
    delta: float
    M: float
    T: int
    K: int
    N: float
    cond_ok: Optional[bool]
    kkt_multipliers: dict
    flags: tuple = ()


def alm_budget(
    eps: float,
    tau: float,
    Lambda: float,
    sigma: float,
    L_grad_f: float,
    L_c: float,
    L_grad_c: float,
    c_hi: float,
    L_d: float,
    L_grad_d: float,
    d_hi: float,
    D_x: float,
    D_y: float,
    lam_y0_norm: float = 0.0,
    Delta: Optional[float] = None,
    theta: Optional[float] = None,
    delta_c: Optional[float] = None,
    delta_d: Optional[float] = None,
    L_F: Optional[float] = None,
) -> AlmBudget:
    """Constants of the augmented Lagrangian complexity bound and its KKT guarantees.

    Missing instance metadata (``Delta``, ``theta``, ``delta_c``, ``delta_d``,
    ``L_F``) leaves the dependent quantities infinite and is recorded in
    ``flags``; ``cond_ok`` is ``None`` when it cannot be decided.

    ``kkt_multipliers`` maps each residual name to the factor that multiplies
    ``eps`` on the right-hand side of the corresponding guarantee.
    """
    _require_positive(sigma=sigma, L_grad_f=L_grad_f)
    K = alm_outer_index(eps, tau)
    if Lambda < 0:
        raise ContractError("Lambda must be nonnegative")
    flags = []
    if Delta is None:
        flags.append("Delta unknown")
        Delta_ = math.inf
    else:
        Delta_ = Delta
    ly2 = lam_y0_norm**2
    growth = (Delta_ + D_y) / (1 - tau)
    L = (
        L_grad_f + L_c**2 + c_hi * L_grad_c + Lambda * L_grad_c + L_d**2 + d_hi * L_grad_d
        + (L_grad_d * math.sqrt(ly2 + 2 * growth) if L_grad_d > 0 else 0.0)
    )
    alpha = min(1.0, math.sqrt(8 * sigma / L))
    delta = (2 + 1 / alpha) * L * D_x**2 + max(2 * sigma, L / 4) * D_y**2
    rho_K = tau ** (-K)
    if L_c > 0:
        M = (
            16
            * max(1 / (2 * L_c**2), 4 / (alpha * L_c**2))
            * (81 / min(L_c**2, sigma) + 3 * L) ** 2
            * (
                delta
                + 2 / alpha * (
                    Delta_ + Lambda**2 / 2 + 1.5 * ly2 + 3 * growth + rho_K * d_hi**2 + L * D_x**2
                )
            )
        )
    else:
        M = math.inf
        flags.append("M undefined for L_c = 0")
    T_raw = 16 * (2 * Delta_ + Lambda + 0.5 * (1 / tau + ly2) + growth + Lambda**2 / 2) * L + 8 * (
        1 + L**2 / sigma**2
    )
    T = _ceil_plus(T_raw) if math.isfinite(T_raw) else -1
    if math.isfinite(M) and T >= 0:
        N = (
            3397
            * max(2.0, math.sqrt(L / (2 * sigma)))
            * T
            / (1 - tau**3.5)
            * (tau * eps) ** -3.5
            * (20 * K * math.log(1 / tau) + 2 * _log_plus(M) + 2 + 2 * math.log(2 * T))
        )
    else:
        N = math.inf

    cond_ok = None
    if theta is not None and delta_d is not None and Delta is not None:
        rhs = max(
            1.0,
            Lambda / theta,
            (
                4 * Delta + 2 * Lambda + 1 / tau + ly2 + 2 * growth
                + (1 / L_c**2 if L_c > 0 else math.inf) + L / sigma**2 + Lambda**2
            ) / theta**2,
            4 * ly2 / (delta_d**2 * tau) + 8 * growth / (delta_d**2 * tau),
        )
        cond_ok = bool(1 / eps >= rhs)
    else:
        flags.append("cond undecidable without theta, delta_d, Delta")

    mult = {"stat_x": 1.0, "stat_y": 1.0}
    if delta_d is not None and Delta is not None:
        B_d = 2 * (Delta + D_y) / delta_d
        mult["feas_d"] = B_d
        mult["comp_d"] = B_d * max(B_d, lam_y0_norm)
        if delta_c is not None and L_F is not None:
            B_c = (L_F + L_d * B_d + 1) / delta_c
            mult["feas_c"] = B_c
            mult["comp_c"] = B_c * max(B_c, Lambda)
    for name in ("feas_c", "comp_c", "feas_d", "comp_d"):
        if name not in mult:
            mult[name] = math.inf
            flags.append(f"{name} bound unavailable")
    return AlmBudget(
        L=L, alpha=alpha, delta=delta, M=M, T=T, K=K, N=N,
        cond_ok=cond_ok, kkt_multipliers=mult, flags=tuple(flags),
    )
