"""Certified saddle point of a small strongly-convex-strongly-concave quadratic."""

import argparse

import numpy as np

from minimax_al.foam import solve_sccsc
from minimax_al.instances import gen_scsc
from minimax_al.kkt import dist_subdiff_box


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", type=float, default=1e-6)
    args = ap.parse_args()

    inst = gen_scsc(args.n, args.m, args.seed)
    sub = inst.to_saddle_subproblem()
    cert, counters = solve_sccsc(sub, args.eps, np.zeros(args.n), np.zeros(args.m))
    gx, gy = sub.grad(cert.x, cert.y)
    xs, ys = inst.analytic_saddle()
    print(f"instance          {inst.instance_id}")
    print(f"outer iterations  {cert.outer_iterations}, max inner trips {max(cert.inner_trips)}")
    print(f"gradient calls    {counters.grad_f}")
    print(f"witness residual  {cert.residual:.3e}")
    print(f"x-side distance   {dist_subdiff_box(gx, cert.x, sub.p.domain):.3e}")
    print(f"y-side distance   {dist_subdiff_box(-gy, cert.y, sub.q.domain):.3e}")
    print(f"to true saddle    {np.linalg.norm(np.r_[cert.x - xs, cert.y - ys]):.3e}")


if __name__ == "__main__":
    main()
