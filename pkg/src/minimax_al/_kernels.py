"""Compiled inner loop of the saddle solver for affine-plus-hinge gradients.

Falls back to plain Python execution of the same code when numba is missing.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn

    HAVE_NUMBA = False
else:
    HAVE_NUMBA = True


@njit(cache=True)
def _grad_into(Ht, o, P, Qt, r, w, g, u):
    # g = H w + o + P'[Q w + r]_+, with H passed transposed so that the
    # column sweep streams contiguous memory; four columns per sweep
    N = w.shape[0]
    for i in range(N):
        g[i] = o[i]
    j = 0
    while j + 4 <= N:
        a0, a1, a2, a3 = w[j], w[j + 1], w[j + 2], w[j + 3]
        for i in range(N):
            g[i] += Ht[j, i] * a0 + Ht[j + 1, i] * a1 + Ht[j + 2, i] * a2 + Ht[j + 3, i] * a3
        j += 4
    while j < N:
        a0 = w[j]
        for i in range(N):
            g[i] += Ht[j, i] * a0
        j += 1
    R = r.shape[0]
    if R == 0:
        return
    # hinge rows advance together: R independent sums instead of one long chain
    for k in range(R):
        u[k] = r[k]
    for i in range(N):
        wi = w[i]
        for k in range(R):
            u[k] += Qt[i, k] * wi
    for k in range(R):
        uk = u[k]
        if uk > 0.0:
            for i in range(N):
                g[i] += P[k, i] * uk


@njit(cache=True)
def inner_kernel(Ht, o, P, Qt, r, n, sx, z_g, y_g, s, gam, lo, hi, max_trips):
    """Anchored extragradient loop on stacked ``w = (x, y)``.

    Step sizes (``s = zeta * gamma``) and weights ``gam`` are equal across
    blocks. Returns ``(status, w, b, trips, n_grad, n_prox, g_exit)`` where
    status 0 means the exit test passed and 1 that ``max_trips`` was hit.
    """
    N = Ht.shape[0]
    # a(w) = sgn * g + coef * w + off, rows split at n
    sgn = np.empty(N)
    coef = np.empty(N)
    off = np.empty(N)
    w_start = np.empty(N)
    for i in range(n):
        sgn[i] = 1.0
        coef[i] = -0.5 * sx
        off[i] = -0.5 * z_g[i]
        w_start[i] = -z_g[i] / sx
    for i in range(n, N):
        sgn[i] = -1.0
        coef[i] = 0.125 * sx
        off[i] = -0.125 * sx * y_g[i - n]
        w_start[i] = y_g[i - n]
    g = np.empty(N)
    w0 = np.empty(N)
    w = np.empty(N)
    b = np.empty(N)
    rr = np.empty(N)
    anc = np.empty(N)
    wh = np.empty(N)
    u = np.empty(r.shape[0])

    _grad_into(Ht, o, P, Qt, r, w_start, g, u)
    n_grad = 1
    for i in range(N):
        v = w_start[i] - s * (sgn[i] * g[i] + coef[i] * w_start[i] + off[i])
        w0[i] = min(max(v, lo[i]), hi[i])
        b[i] = (v - w0[i]) / s
        w[i] = w0[i]
    n_prox = 1

    t = 0
    while True:
        _grad_into(Ht, o, P, Qt, r, w, g, u)
        n_grad += 1
        lhs = 0.0
        rhs = 0.0
        for i in range(N):
            rr[i] = sgn[i] * g[i] + coef[i] * w[i] + off[i] + b[i]
            lhs += rr[i] * rr[i]
            d = w[i] - w_start[i]
            rhs += d * d
        if gam * lhs <= rhs / gam:
            return 0, w, b, t, n_grad, n_prox, g
        if t >= max_trips:
            return 1, w, b, t, n_grad, n_prox, g
        beta = 2.0 / (t + 3)
        for i in range(N):
            anc[i] = w[i] + beta * (w0[i] - w[i])
            wh[i] = anc[i] - s * rr[i]
        _grad_into(Ht, o, P, Qt, r, wh, g, u)
        n_grad += 1
        for i in range(N):
            v = anc[i] - s * (sgn[i] * g[i] + coef[i] * wh[i] + off[i])
            w[i] = min(max(v, lo[i]), hi[i])
            b[i] = (v - w[i]) / s
        n_prox += 1
        t += 1
