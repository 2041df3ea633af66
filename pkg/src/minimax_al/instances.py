"""Random quadratic minimax instances, exact constants and the hyper-objective.

Instances have the form::

    min_{Ahat x <= bhat} max_{Atil x + Btil y <= btil}
        x'Ax + x'By + y'Cy + c'x + d'y,   x in [-1,1]^n, y in [-1,1]^m

with ``C`` negative definite so that the inner problem is strongly concave.
The unconstrained family omits the two linear constraint blocks. A third,
strongly-convex-strongly-concave family (``kind="scsc"``) has ``A`` positive
definite and linear terms placed so that a known interior point is the saddle.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import linprog, milp, LinearConstraint, Bounds

from .core import AffineHingeGradient, Box, ConstraintMap, ContractError, MinimaxProblem, SmoothCoupling, box_indicator

FORMAT_VERSION = "v1"
C_SIGN = "negative-definite"
KINDS = ("unconstrained", "constrained", "scsc")
NEAR_FEASIBILITY = 0.1
MFCQ_THETA = 0.1

_MATRIX_KEYS = ("A", "B", "C", "Ahat", "Atil", "Btil")
_VECTOR_KEYS = ("c", "d", "bhat", "btil", "x_nf")


class InstanceFormatError(ValueError):
    """Instance file could not be parsed or fails structural validation."""


@dataclass(eq=False)
class QuadraticInstance:
    kind: str
    seed: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    c: np.ndarray
    d: np.ndarray
    Ahat: Optional[np.ndarray] = None
    bhat: Optional[np.ndarray] = None
    Atil: Optional[np.ndarray] = None
    Btil: Optional[np.ndarray] = None
    btil: Optional[np.ndarray] = None
    x_nf: Optional[np.ndarray] = None
    constants: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.C.shape[0]

    @property
    def nt(self) -> int:
        return 0 if self.Ahat is None else self.Ahat.shape[0]

    @property
    def mt(self) -> int:
        return 0 if self.Atil is None else self.Atil.shape[0]

    @property
    def constrained(self) -> bool:
        return self.kind == "constrained"

    @property
    def instance_id(self) -> str:
        if self.constrained:
            return f"constrained-n{self.n}-m{self.m}-nt{self.nt}-mt{self.mt}-s{self.seed}"
        return f"{self.kind}-n{self.n}-m{self.m}-s{self.seed}"

    def __eq__(self, other):
        if not isinstance(other, QuadraticInstance):
            return NotImplemented
        if (self.kind, self.seed, self.constants) != (other.kind, other.seed, other.constants):
            return False
        for key in _MATRIX_KEYS + _VECTOR_KEYS:
            a, b = getattr(self, key), getattr(other, key)
            if (a is None) != (b is None) or (a is not None and not np.array_equal(a, b)):
                return False
        return True

    # oracles -----------------------------------------------------------

    def f_value(self, x, y) -> float:
        return float(x @ self.A @ x + x @ self.B @ y + y @ self.C @ y + self.c @ x + self.d @ y)

    def f_grad(self, x, y):
        return self.gradient_oracle()(x, y)

    def gradient_oracle(self) -> AffineHingeGradient:
        """``grad f`` as the affine map ``w -> H w + (c, d)`` on ``w = (x, y)``."""
        G = self.__dict__.get("_grad_oracle")
        if G is None:
            H = np.block([[2 * self.A, self.B], [self.B.T, 2 * self.C]])
            G = AffineHingeGradient(H, np.concatenate((self.c, self.d)), self.n)
            self.__dict__["_grad_oracle"] = G
        return G

    def analytic_saddle(self):
        """Stationary point of ``f`` over the whole space, as ``(x, y)``.

        For the ``scsc`` family it is interior to the boxes by construction,
        hence the saddle point of the box-constrained problem.
        """
        G = self.gradient_oracle()
        w = np.linalg.solve(G.H, -G.o)
        return w[: self.n], w[self.n :]

    def to_saddle_subproblem(self):
        """Bundle for :func:`minimax_al.foam.solve_sccsc`; ``scsc`` instances only."""
        from .foam import SaddleSubproblem

        if self.kind != "scsc":
            raise ContractError("only scsc instances are strongly convex in x")
        k = self.constants
        return SaddleSubproblem(
            grad=self.gradient_oracle(), sigma_x=k["sigma_x"], sigma_y=k["sigma"],
            L_grad=k["L_grad_f"], p=box_indicator(Box.cube(self.n)),
            q=box_indicator(Box.cube(self.m)), value=self.f_value,
        )

    def c_value(self, x):
        return self.Ahat @ x - self.bhat

    def d_value(self, x, y):
        return self.Atil @ x + self.Btil @ y - self.btil

    def to_problem(self) -> MinimaxProblem:
        k = self.constants
        f = SmoothCoupling(self.f_value, self.gradient_oracle(), L_grad=k["L_grad_f"], sigma=k["sigma"])
        p = box_indicator(Box.cube(self.n))
        q = box_indicator(Box.cube(self.m))
        if not self.constrained:
            return MinimaxProblem(f, p, q)
        Ahat, Atil, Btil = self.Ahat, self.Atil, self.Btil
        cmap = ConstraintMap(
            value=self.c_value,
            vjp=lambda x, lam: Ahat.T @ lam,
            dim=self.nt,
            lipschitz=k["L_c"],
            smoothness=0.0,
            hi=k["c_hi"],
            affine=(Ahat, self.bhat),
        )
        dmap = ConstraintMap(
            value=self.d_value,
            vjp=lambda x, y, lam: (Atil.T @ lam, Btil.T @ lam),
            dim=self.mt,
            lipschitz=k["L_d"],
            smoothness=0.0,
            hi=k["d_hi"],
            affine=(np.hstack((Atil, Btil)), self.btil),
        )
        return MinimaxProblem(f, p, q, c=cmap, d=dmap)

    def to_constrained_problem(self):
        """The constrained problem with the bound metadata used by budgets and monitors."""
        from .alm import ConstrainedProblem

        if not self.constrained:
            raise ContractError("instance has no constraint blocks")
        k = self.constants

        def positive(name):
            v = k.get(name)
            return v if v is not None and v > 0 else None

        return ConstrainedProblem(
            self.to_problem(),
            L_F=positive("L_F"), delta_c=positive("delta_c"), delta_d=positive("delta_d"),
            theta=positive("theta"), Delta=positive("Delta"), F_hi=k.get("F_abs"),
        )


# generation ----------------------------------------------------------------


def _orth(rng, n):
    # QR with a sign fix so that the factor is unique for a given Gaussian draw.
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def _spectral(rng, n, diag):
    U = _orth(rng, n)
    M = (U * diag) @ U.T
    return (M + M.T) / 2


def _quadratic_part(rng, n, m, c_spectrum):
    A = _spectral(rng, n, rng.normal(0.0, 0.1, n))
    C = -_spectral(rng, m, rng.uniform(*c_spectrum, m))
    B = rng.normal(0.0, 0.1, (n, m))
    c = rng.normal(0.0, 0.1, n)
    d = rng.normal(0.0, 0.1, m)
    return A, B, C, c, d


def gen_unconstrained(n: int, m: int, seed: int) -> QuadraticInstance:
    """Box-constrained instance with ``eig(C)`` in ``[-3, -2]``."""
    if n < 1 or m < 1:
        raise ContractError("dimensions must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    A, B, C, c, d = _quadratic_part(rng, n, m, (2.0, 3.0))
    inst = QuadraticInstance("unconstrained", int(seed), A, B, C, c, d)
    inst.constants = derive_constants(inst)
    return inst


def gen_scsc(n: int, m: int, seed: int) -> QuadraticInstance:
    """Strongly-convex-strongly-concave box instance with a known saddle.

    ``eig(A)`` and ``-eig(C)`` lie in ``[0.5, 1]``. The saddle ``w*`` is drawn
    uniformly from ``[-0.5, 0.5]^(n+m)`` and ``(c, d) = -H w*``.
    """
    if n < 1 or m < 1:
        raise ContractError("dimensions must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    A = _spectral(rng, n, rng.uniform(0.5, 1.0, n))
    C = -_spectral(rng, m, rng.uniform(0.5, 1.0, m))
    B = rng.normal(0.0, 0.1, (n, m))
    w = rng.uniform(-0.5, 0.5, n + m)
    o = -np.block([[2 * A, B], [B.T, 2 * C]]) @ w
    inst = QuadraticInstance("scsc", int(seed), A, B, C, o[:n].copy(), o[n:].copy())
    inst.constants = derive_constants(inst)
    return inst


def gen_constrained(n: int, m: int, nt: int, mt: int, seed: int) -> QuadraticInstance:
    """Linearly constrained instance with ``eig(C)`` in ``[-11, -10]``.

    ``bhat`` is chosen so every x-constraint is violated at ``x_nf`` and the
    violation vector has norm exactly 0.1.
    """
    if min(n, m, nt, mt) < 1:
        raise ContractError("dimensions must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    A, B, C, c, d = _quadratic_part(rng, n, m, (10.0, 11.0))
    Ahat = rng.normal(0.0, 0.1, (nt, n))
    Atil = rng.normal(0.0, 0.1, (mt, n))
    Btil = rng.normal(0.0, 0.1, (mt, m))
    btil = rng.normal(0.0, 0.1, mt)
    x_nf = np.clip(rng.normal(0.0, 0.1, n), -1.0, 1.0)
    v = np.abs(rng.standard_normal(nt)) + 1e-3
    v *= NEAR_FEASIBILITY / np.linalg.norm(v)
    bhat = Ahat @ x_nf - v
    inst = QuadraticInstance(
        "constrained", int(seed), A, B, C, c, d, Ahat, bhat, Atil, Btil, btil, x_nf
    )
    inst.constants = derive_constants(inst)
    return inst


# constants -----------------------------------------------------------------


def _row_abs_bound(*blocks, offset=None):
    """Per-row max of ``|M z - offset|`` over the unit box for ``M = [blocks]``."""
    total = sum(np.abs(b).sum(axis=1) for b in blocks)
    if offset is not None:
        total = total + np.abs(offset)
    return total


def slater_constant(inst: QuadraticInstance) -> float:
    """Uniform Slater margin of ``Atil x + Btil y <= btil`` over the boxes.

    The margin is ``min_x max_y min_i (btil - Atil x - Btil y)_i``. By LP
    duality the inner max-min equals ``min_mu mu'(btil - Atil x) + ||Btil' mu||_1``
    over the simplex, and for fixed ``mu`` the minimizing ``x`` is a box
    vertex. Writing ``x = 2 beta - 1`` with binary ``beta`` makes the
    products ``mu_i beta_j`` exactly linearizable, so a mixed-integer program
    returns the exact margin. A nonpositive value means the condition fails.
    """
    At, Bt, bt = inst.Atil, inst.Btil, inst.btil
    mt, n = At.shape
    m = Bt.shape[1]
    # variables: mu (mt), beta (n), w (mt*n, w_ij = mu_i beta_j), e (m)
    nv = mt + n + mt * n + m
    iw = lambda i, j: mt + n + i * n + j
    cost = np.zeros(nv)
    cost[:mt] = bt + At.sum(axis=1)
    for i in range(mt):
        for j in range(n):
            cost[iw(i, j)] = -2 * At[i, j]
    cost[mt + n + mt * n:] = 1.0
    rows, lo, hi = [], [], []

    def add(coefs, l, u):
        row = np.zeros(nv)
        for k, v in coefs:
            row[k] += v
        rows.append(row)
        lo.append(l)
        hi.append(u)

    add([(i, 1.0) for i in range(mt)], 1.0, 1.0)
    for i in range(mt):
        for j in range(n):
            add([(iw(i, j), 1.0), (i, -1.0)], -np.inf, 0.0)
            add([(iw(i, j), 1.0), (mt + j, -1.0)], -np.inf, 0.0)
            add([(iw(i, j), 1.0), (i, -1.0), (mt + j, -1.0)], -1.0, np.inf)
    for l in range(m):
        e = mt + n + mt * n + l
        add([(e, 1.0)] + [(i, -Bt[i, l]) for i in range(mt)], 0.0, np.inf)
        add([(e, 1.0)] + [(i, Bt[i, l]) for i in range(mt)], 0.0, np.inf)
    integrality = np.zeros(nv)
    integrality[mt : mt + n] = 1
    upper = np.r_[np.ones(mt + n + mt * n), np.full(m, np.inf)]
    res = milp(
        c=cost,
        constraints=LinearConstraint(np.array(rows), lo, hi),
        integrality=integrality,
        bounds=Bounds(np.zeros(nv), upper),
    )
    if res.status != 0:
        raise RuntimeError(f"Slater margin program failed: {res.message}")
    return float(res.fun)


def mfcq_constant(inst: QuadraticInstance, theta: float = MFCQ_THETA, grid: int = 41) -> float:
    """Estimate of the robust MFCQ constant of ``Ahat x <= bhat`` on the box.

    For weights ``mu`` on the near-active constraints the constant is
    ``min_mu min_x ||P_T(x)(-Ahat' mu)||``, where ``T(x)`` is the box tangent
    cone. The inner minimum over ``x`` is computed exactly (for the polyhedral
    relaxation ``[c(x)]_+ <= theta``) by a mixed-integer program choosing which
    coordinates sit at the bound that blocks the direction. The outer minimum
    over ``mu`` is taken on a grid of the simplex, so the result is an estimate.
    """
    Ahat, bhat = inst.Ahat, inst.bhat
    nt, n = Ahat.shape
    best = math.inf
    subsets = [s for s in range(1, 2**nt)] if nt <= 8 else [2**nt - 1]
    for mask in subsets:
        S = [i for i in range(nt) if mask >> i & 1]
        for mu in _simplex_grid(len(S), grid):
            w = -(Ahat[S].T @ mu)
            nrm2 = float(w @ w)
            killed = _max_blocked_weight(Ahat, bhat, S, w, theta)
            if killed is None:
                continue
            best = min(best, math.sqrt(max(nrm2 - killed, 0.0)))
    return best


def _simplex_grid(k, grid):
    if k == 1:
        return [np.ones(1)]
    if k == 2:
        return [np.array([t, 1 - t]) for t in np.linspace(0, 1, grid)]
    rng = np.random.Generator(np.random.PCG64(k))
    pts = [np.eye(k)[i] for i in range(k)] + [np.full(k, 1 / k)]
    pts += list(rng.dirichlet(np.ones(k), size=grid * k))
    return pts


def _max_blocked_weight(Ahat, bhat, S, w, theta):
    """Largest ``sum_j w_j^2`` over coordinates pinned at a blocking bound."""
    nt, n = Ahat.shape
    s = np.sign(w)
    # variables: x (n), k (n binary). k_j = 1 forces s_j x_j <= -1.
    cons = []
    # s_j x_j + 2 k_j <= 1
    cons.append(LinearConstraint(np.c_[np.diag(s), 2 * np.eye(n)], -np.inf, np.ones(n)))
    # near-active constraints in S: Ahat_i x - bhat_i >= -theta
    cons.append(LinearConstraint(np.c_[Ahat[S], np.zeros((len(S), n))], bhat[S] - theta, np.inf))
    # near feasibility: Ahat x - bhat <= theta (componentwise relaxation)
    cons.append(LinearConstraint(np.c_[Ahat, np.zeros((nt, n))], -np.inf, bhat + theta))
    weights = np.where(s != 0, w**2, 0.0)
    res = milp(
        c=np.r_[np.zeros(n), -weights],
        constraints=cons,
        integrality=np.r_[np.zeros(n), np.ones(n)],
        bounds=Bounds(np.r_[-np.ones(n), np.zeros(n)], np.r_[np.ones(n), np.ones(n)]),
    )
    if res.status != 0:
        return None
    return float(-res.fun)


def derive_constants(inst: QuadraticInstance) -> dict:
    """Smoothness, concavity and bound constants used by solvers and budgets."""
    A, B, C = inst.A, inst.B, inst.C
    n, m = inst.n, inst.m
    H = np.block([[2 * A, B], [B.T, 2 * C]])
    L = float(np.max(np.abs(np.linalg.eigvalsh(H))))
    eig_c = np.linalg.eigvalsh(C)
    sigma = float(2 * np.min(np.abs(eig_c)))
    f_abs = float(
        np.abs(A).sum() + np.abs(B).sum() + np.abs(C).sum() + np.abs(inst.c).sum() + np.abs(inst.d).sum()
    )
    grad_x_bound = 2 * np.abs(A).sum(axis=1) + np.abs(B).sum(axis=1) + np.abs(inst.c)
    k = {
        "L_grad_f": L * (1 + 1e-12),
        "sigma": sigma * (1 - 1e-12),
        "L_y": float(2 * np.max(np.abs(eig_c))),
        "D_x": 2 * math.sqrt(n),
        "D_y": 2 * math.sqrt(m),
        "F_abs": f_abs,
        "Delta": 2 * f_abs,
        "L_F": float(np.linalg.norm(grad_x_bound)),
    }
    if inst.kind == "scsc":
        k["sigma_x"] = float(2 * np.min(np.linalg.eigvalsh(A))) * (1 - 1e-12)
    if inst.constrained:
        k.update(
            L_c=float(np.linalg.norm(inst.Ahat, 2)),
            L_grad_c=0.0,
            c_hi=float(np.linalg.norm(_row_abs_bound(inst.Ahat, offset=inst.bhat))),
            L_d=float(np.linalg.norm(np.c_[inst.Atil, inst.Btil], 2)),
            L_grad_d=0.0,
            d_hi=float(np.linalg.norm(_row_abs_bound(inst.Atil, inst.Btil, offset=inst.btil))),
            theta=MFCQ_THETA,
            delta_d=slater_constant(inst),
            delta_c=mfcq_constant(inst),
        )
    return k


# hyper-objective -----------------------------------------------------------


class HyperObjectiveError(RuntimeError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


def _apg_max(grad, y0, L, mu, tol, max_iter):
    """Accelerated projected gradient ascent on a strongly concave function over the unit box.

    Stops when the gradient mapping norm is at most ``tol``.
    """
    q = math.sqrt(mu / L)
    mom = (1 - q) / (1 + q)
    y = np.clip(y0, -1, 1)
    v = y.copy()
    gmap = math.inf
    for _ in range(max_iter):
        y_new = np.clip(v + grad(v) / L, -1, 1)
        gy = grad(y_new)
        gmap = L * np.linalg.norm(np.clip(y_new + gy / L, -1, 1) - y_new)
        if gmap <= tol:
            return y_new, gmap
        v = y_new + mom * (y_new - y)
        y = y_new
    raise HyperObjectiveError("projected gradient ascent did not converge", achieved=gmap)


def hyper_objective(inst: QuadraticInstance, x, tol: float = 1e-8, max_iter: int = 100000) -> float:
    """``Phi(x) = max_y F(x, y)`` over the feasible y-set, to absolute accuracy ``tol``.

    Returns ``-inf`` when no ``y`` in the box satisfies the coupled constraint.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.abs(x) <= 1 + 1e-12):
        raise ContractError("x must lie in [-1, 1]^n")
    C = inst.C
    g = inst.B.T @ x + inst.d
    base = float(x @ inst.A @ x + inst.c @ x)
    k = inst.constants
    L, mu = k["L_y"], k["sigma"]

    def phi(y):
        return float(y @ C @ y + g @ y)

    # value error is at most ||G||^2 / (2 mu) for gradient mapping G
    gtol = min(tol * mu / 2, math.sqrt(tol * mu))
    if not inst.constrained:
        y, _ = _apg_max(lambda y: 2 * C @ y + g, np.zeros(inst.m), L, mu, gtol, max_iter)
        return base + phi(y)

    G = inst.Btil
    h = inst.btil - inst.Atil @ x
    feas = linprog(np.zeros(inst.m), A_ub=G, b_ub=h, bounds=[(-1, 1)] * inst.m, method="highs")
    if feas.status == 2:
        return -math.inf
    lam = np.zeros(inst.mt)
    rho = 10.0
    y = np.zeros(inst.m)
    GtG = float(np.linalg.norm(G, 2) ** 2)
    prev_viol = math.inf
    for _ in range(60):
        def grad(v, lam=lam, rho=rho):
            return 2 * C @ v + g - G.T @ np.maximum(lam + rho * (G @ v - h), 0.0)

        y, _ = _apg_max(grad, y, L + rho * GtG, mu, gtol, max_iter)
        r = G @ y - h
        lam = np.maximum(lam + rho * r, 0.0)
        viol = float(np.linalg.norm(np.maximum(r, 0.0)))
        comp = abs(float(lam @ r))
        if viol <= tol and comp <= tol:
            return base + phi(y)
        if viol > 0.25 * prev_viol:
            rho *= 10.0
        prev_viol = viol
    raise HyperObjectiveError("constrained hyper-objective did not converge", achieved=(viol, comp))


# persistence -----------------------------------------------------------------


def instance_to_dict(inst: QuadraticInstance) -> dict:
    doc = {
        "version": FORMAT_VERSION,
        "kind": inst.kind,
        "c_sign": C_SIGN,
        "n": inst.n,
        "m": inst.m,
        "nt": inst.nt,
        "mt": inst.mt,
        "seed": inst.seed,
    }
    for key in _MATRIX_KEYS + _VECTOR_KEYS:
        val = getattr(inst, key)
        doc[key] = None if val is None else val.tolist()
    doc["constants"] = dict(inst.constants)
    return doc


def dumps_instance(inst: QuadraticInstance) -> str:
    return json.dumps(instance_to_dict(inst), separators=(",", ":"))


def save_instance(inst: QuadraticInstance, path) -> Path:
    path = Path(path)
    path.write_text(dumps_instance(inst) + "\n")
    return path


def _shape_check(doc, key, shape):
    arr = doc.get(key)
    if arr is None:
        if shape is None:
            return None
        raise InstanceFormatError(f"missing array {key!r}")
    try:
        out = np.asarray(arr, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"array {key!r} is not numeric: {exc}") from None
    if shape is not None and out.shape != shape:
        raise InstanceFormatError(f"array {key!r} has shape {out.shape}, expected {shape}")
    return out


def instance_from_dict(doc: dict) -> QuadraticInstance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format version {doc.get('version')!r}")
    try:
        kind, n, m, nt, mt, seed = (doc[k] for k in ("kind", "n", "m", "nt", "mt", "seed"))
    except KeyError as exc:
        raise InstanceFormatError(f"missing key {exc.args[0]!r}") from None
    if kind not in KINDS:
        raise InstanceFormatError(f"unknown kind {kind!r}")
    con = kind == "constrained"
    shapes = {
        "A": (n, n), "B": (n, m), "C": (m, m), "c": (n,), "d": (m,),
        "Ahat": (nt, n) if con else None, "bhat": (nt,) if con else None,
        "Atil": (mt, n) if con else None, "Btil": (mt, m) if con else None,
        "btil": (mt,) if con else None, "x_nf": (n,) if con else None,
    }
    arrays = {key: _shape_check(doc, key, shape) for key, shape in shapes.items()}
    inst = QuadraticInstance(kind, int(seed), **arrays, constants=dict(doc.get("constants", {})))
    for key in ("L_grad_f", "sigma", "L_y"):
        if key not in inst.constants:
            raise InstanceFormatError(f"missing constant {key!r}")
    if con:
        viol = float(np.linalg.norm(np.maximum(inst.c_value(inst.x_nf), 0.0)))
        if abs(viol - NEAR_FEASIBILITY) > 1e-6:
            warnings.warn(
                f"{inst.instance_id}: x_nf violation {viol:.3g} differs from {NEAR_FEASIBILITY}",
                stacklevel=2,
            )
    return inst


def load_instance(path) -> QuadraticInstance:
    path = Path(path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    return instance_from_dict(doc)
