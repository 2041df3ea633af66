"""Augmented Lagrangian and proximal-point solvers for constrained minimax problems.

Layers, bottom up:

* :mod:`~minimax_al.foam` certifies stationary points of strongly-convex-strongly-concave
  saddle problems;
* :mod:`~minimax_al.ppa` wraps it in an inexact proximal-point loop for
  nonconvex-strongly-concave problems;
* :mod:`~minimax_al.alm` adds safeguarded multipliers for coupled inequality
  constraints.

:mod:`~minimax_al.kkt` checks results independently, :mod:`~minimax_al.budget`
evaluates the worst-case iteration bounds and :mod:`~minimax_al.instances`
generates the random quadratic test problems.
"""

from .alm import ConstrainedProblem, solve_constrained
from .core import (
    AffineHingeGradient, Box, ConstraintMap, ContractError, EvalCounters, MinimaxProblem,
    ProxFriendly, SmoothCoupling, box_indicator, eval_F, project_nonneg_ball, prox_box,
)
from .foam import SaddleSubproblem, solve_sccsc
from .kkt import KKTReport, dist_subdiff_box, is_eps_kkt, kkt_report
from .ppa import NcscProblem, solve_ncsc

__version__ = "0.1.0"

__all__ = [
    "AffineHingeGradient", "Box", "ConstrainedProblem", "ConstraintMap", "ContractError",
    "EvalCounters", "KKTReport", "MinimaxProblem", "NcscProblem", "ProxFriendly",
    "SaddleSubproblem", "SmoothCoupling", "box_indicator", "dist_subdiff_box", "eval_F",
    "is_eps_kkt", "kkt_report", "project_nonneg_ball", "prox_box", "solve_constrained",
    "solve_ncsc", "solve_sccsc",
]
