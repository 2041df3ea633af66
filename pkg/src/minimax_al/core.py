"""Problem abstraction, proximal maps, projections and oracle-call accounting.

Vectors are plain 1-D ``float64`` numpy arrays. Extended-real values are
ordinary Python floats, with ``math.inf`` standing for +inf/-inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Callable, Optional

import numpy as np


class ContractError(ValueError):
    """An operation was called with arguments that violate its preconditions."""


def as_vec(v, dim: Optional[int] = None, name: str = "vector") -> np.ndarray:
    """Return ``v`` as a finite 1-D float array, optionally checking its length."""
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1:
        raise ContractError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ContractError(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``{x : lower <= x <= upper}`` with finite bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_vec(self.lower, name="lower")
        hi = as_vec(self.upper, dim=lo.shape[0], name="upper")
        if np.any(lo > hi):
            raise ContractError("box lower bound exceeds upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, dim: int, radius: float = 1.0) -> "Box":
        return cls(np.full(dim, -radius), np.full(dim, radius))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(
            self.upper, other.upper
        )

    __hash__ = None


def prox_box(box: Box, gamma: float, v) -> np.ndarray:
    """Prox of the box indicator: a componentwise clamp, independent of ``gamma``."""
    if not gamma > 0:
        raise ContractError("prox parameter must be positive")
    v = as_vec(v, dim=box.dim, name="v")
    return np.clip(v, box.lower, box.upper)


def project_nonneg_ball(radius: float, v) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, ||x|| <= radius}``.

    The set is the intersection of the orthant with a centred ball, so the
    projection is the orthant projection followed by radial shrinking.
    """
    if not radius > 0:
        raise ContractError("ball radius must be positive")
    w = np.maximum(as_vec(v, name="v"), 0.0)
    nrm = np.linalg.norm(w)
    if nrm > radius:
        w = w * (radius / nrm)
        # rescaling can land an ulp outside; step the factor down until inside
        scale = 1.0
        while np.linalg.norm(w) > radius:
            scale = np.nextafter(scale, 0.0)
            w = w * scale
    return w


def box_diameter(box: Box) -> float:
    return float(np.linalg.norm(box.upper - box.lower))


@dataclass(frozen=True)
class ProxFriendly:
    """A closed convex function with compact domain and an exact prox.

    Parameters
    ----------
    domain : Box
        Domain of the function (compact by construction).
    prox : callable
        ``prox(gamma, v)`` returns ``argmin_u 0.5||u - v||^2 + gamma * g(u)``.
    value : callable, optional
        Value on the domain. ``None`` means the indicator function of
        ``domain`` (value 0 on the box).
    """

    domain: Box
    prox: Callable[[float, np.ndarray], np.ndarray]
    value: Optional[Callable[[np.ndarray], float]] = None

    @property
    def is_box_indicator(self) -> bool:
        return self.value is None

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if not self.domain.contains(x):
            return math.inf
        return 0.0 if self.value is None else float(self.value(x))


def box_indicator(box: Box) -> ProxFriendly:
    lo, hi = box.lower, box.upper

    # solver hot path: no argument validation
    def clamp(gamma, v):
        return np.minimum(np.maximum(v, lo), hi)

    return ProxFriendly(domain=box, prox=clamp)


@dataclass(frozen=True)
class SmoothCoupling:
    """Smooth coupling term ``f(x, y)`` with ``grad(x, y) -> (grad_x, grad_y)``.

    ``L_grad`` is the smoothness constant on the domain and ``sigma`` the
    strong-concavity modulus of ``f(x, .)``.
    """

    value: Callable[[np.ndarray, np.ndarray], float]
    grad: Callable[[np.ndarray, np.ndarray], tuple]
    L_grad: float
    sigma: float

    def __post_init__(self):
        if not (self.L_grad > 0 and self.sigma > 0):
            raise ContractError("smoothness and strong-concavity constants must be positive")


class AffineHingeGradient:
    """Gradient oracle ``g(w) = H w + o + P^T [Q w + r]_+`` on ``w = (x, y)``.

    Covers quadratic couplings (no hinge rows) and their augmented
    Lagrangians with affine constraints. Solvers recognise this form and run
    a compiled inner loop; as a callable it behaves like any
    ``grad(x, y) -> (grad_x, grad_y)`` oracle.
    """

    def __init__(self, H, o, n: int, P=None, Q=None, r=None):
        H = np.ascontiguousarray(H, dtype=float)
        N = H.shape[0]
        if H.shape != (N, N) or not 0 < n < N:
            raise ContractError("H must be square with n < dim")
        self.H = H
        self.o = np.ascontiguousarray(as_vec(o, dim=N, name="o"))
        self.n = int(n)
        if P is None:
            P = np.zeros((0, N))
            Q = np.zeros((0, N))
            r = np.zeros(0)
        self.P = np.ascontiguousarray(P, dtype=float)
        self.Q = np.ascontiguousarray(Q, dtype=float)
        self.r = np.ascontiguousarray(r, dtype=float)
        rows = self.r.shape[0]
        if self.P.shape != (rows, N) or self.Q.shape != (rows, N):
            raise ContractError("hinge blocks have inconsistent shapes")
        self.PT = np.ascontiguousarray(self.P.T)
        self.Ht = np.ascontiguousarray(H.T)
        self.Qt = np.ascontiguousarray(self.Q.T)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def stacked(self, w):
        g = self.H @ w + self.o
        if self.r.shape[0]:
            g += self.PT @ np.maximum(self.Q @ w + self.r, 0.0)
        return g

    def __call__(self, x, y):
        g = self.stacked(np.concatenate((x, y)))
        return g[: self.n], g[self.n :]

    def shift_x(self, weight: float, anchor) -> "AffineHingeGradient":
        """Gradient of the original plus ``weight/2 * ||x - anchor||^2``."""
        H = self.H.copy()
        idx = np.arange(self.n)
        H[idx, idx] += weight
        o = self.o.copy()
        o[: self.n] -= weight * np.asarray(anchor, dtype=float)
        return AffineHingeGradient(H, o, self.n, self.P, self.Q, self.r)


@dataclass(frozen=True)
class ConstraintMap:
    """Vector-valued smooth constraint map, ``value(.) <= 0`` being feasible.

    For an x-only map ``c`` the oracles are ``value(x)`` and
    ``vjp(x, lam) = Jc(x)^T lam``. For a coupled map ``d`` they are
    ``value(x, y)`` and ``vjp(x, y, lam) -> (Jx d^T lam, Jy d^T lam)``.

    ``lipschitz`` and ``smoothness`` are the Lipschitz constants of the map and
    of its Jacobian on the domain; ``hi`` bounds ``||value||`` there.
    ``affine``, when given, is ``(J, b)`` with ``value = J @ arg - b`` where
    ``arg`` is ``x`` or the stacked ``(x, y)``.
    """

    value: Callable
    vjp: Callable
    dim: int
    lipschitz: float
    smoothness: float
    hi: float
    affine: Optional[tuple] = None

    def __post_init__(self):
        if min(self.lipschitz, self.smoothness, self.hi) < 0:
            raise ContractError("constraint constants must be nonnegative")


@dataclass(frozen=True)
class MinimaxProblem:
    """``min_x max_y f(x,y) + p(x) - q(y)`` subject to ``c(x) <= 0``, ``d(x,y) <= 0``."""

    f: SmoothCoupling
    p: ProxFriendly
    q: ProxFriendly
    c: Optional[ConstraintMap] = None
    d: Optional[ConstraintMap] = None

    @property
    def n(self) -> int:
        return self.p.domain.dim

    @property
    def m(self) -> int:
        return self.q.domain.dim


def eval_F(problem: MinimaxProblem, x, y) -> float:
    """``f(x,y) + p(x) - q(y)`` as an extended real.

    Returns ``+inf`` when ``x`` is outside ``dom p`` and ``-inf`` when ``y`` is
    outside ``dom q``; the value is undefined when both are.
    """
    x = as_vec(x, dim=problem.n, name="x")
    y = as_vec(y, dim=problem.m, name="y")
    px, qy = problem.p(x), problem.q(y)
    if math.isinf(px) and math.isinf(qy):
        raise ContractError("objective undefined: x outside dom p and y outside dom q")
    if math.isinf(px):
        return math.inf
    if math.isinf(qy):
        return -math.inf
    return float(problem.f.value(x, y)) + px - qy


@dataclass
class EvalCounters:
    """Exact oracle-call counts for one solve."""

    grad_f: int = 0
    grad_c: int = 0
    grad_d: int = 0
    prox_p: int = 0
    prox_q: int = 0

    def charge(self, names, times: int = 1) -> None:
        for name in names:
            setattr(self, name, getattr(self, name) + times)

    def snapshot(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def total(self) -> int:
        return sum(self.snapshot().values())


GRAD_F = ("grad_f",)
