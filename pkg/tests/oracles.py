"""Brute-force reference computations shared by unit and acceptance tests."""

import numpy as np


def cone_distance_grid(g, x, lower, upper, step=1e-3, radius_factor=10.0):
    """``min ||g + s||`` over normal-cone elements ``s`` on a grid.

    The normal cone of a box is a product of per-coordinate cones, so the
    search runs over a 1-D grid per coordinate: ``{0}`` inside, ``s <= 0`` at
    the lower bound, ``s >= 0`` at the upper bound and the whole line when
    both bounds coincide.
    """
    g = np.asarray(g, float)
    R = max(radius_factor * np.linalg.norm(g), step)
    grid = np.arange(-R, R + step / 2, step)
    total = 0.0
    for gi, xi, lo, hi in zip(g, x, lower, upper):
        cand = grid
        if xi == lo and xi == hi:
            pass
        elif xi == lo:
            cand = grid[grid <= 0]
        elif xi == hi:
            cand = grid[grid >= 0]
        else:
            cand = np.zeros(1)
        total += np.min(np.abs(gi + cand)) ** 2
    return float(np.sqrt(total))


def hyper_objective_grid(a, b, c_, c, d, x, step=1e-4):
    """``max_y a x^2 + b x y + c_ y^2 + c x + d y`` over ``y in [-1, 1]`` on a grid."""
    y = np.arange(-1.0, 1.0 + step / 2, step)
    return float(np.max(a * x * x + b * x * y + c_ * y * y + c * x + d * y))


def random_box_triple(rng, dim=3):
    lower = rng.uniform(-2, 0, dim)
    upper = lower + rng.choice([0.0, 1.0, 2.0], size=dim, p=[0.1, 0.45, 0.45])
    x = rng.uniform(lower, upper)
    pick = rng.integers(0, 3, dim)
    x = np.where(pick == 0, lower, np.where(pick == 1, upper, x))
    g = rng.normal(0, 1, dim)
    return g, x, lower, upper
