"""Outer-loop trace of the augmented Lagrangian method on a linearly constrained instance."""

import argparse

import numpy as np

from minimax_al.alm import solve_constrained
from minimax_al.instances import gen_constrained, hyper_objective


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs=4, default=[4, 12, 2, 3], metavar=("N", "M", "NT", "MT"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", type=float, default=1e-2)
    ap.add_argument("--tau", type=float, default=0.5)
    ap.add_argument("--lambda-cap", type=float, default=10.0)
    args = ap.parse_args()

    inst = gen_constrained(*args.dims, args.seed)
    sol = solve_constrained(inst.to_constrained_problem(), args.eps, args.tau, args.lambda_cap, x_nf=inst.x_nf)
    print(" k      rho   init  ppa_outer  grad_f(cum)  |lam_x|   |lam_y|")
    for it, st in zip(sol.iterations, sol.states):
        print(f"{it.k:2d} {st.rho_k:8.1f} {it.init:>6} {it.ppa_outer:10d} {it.counters['grad_f']:12d}"
              f" {np.linalg.norm(st.lam_x):9.4f} {np.linalg.norm(st.lam_y):9.4f}")
    r = sol.report
    print(f"\nstationarity  x {r.stat_x:.2e}  y {r.stat_y:.2e}")
    print(f"feasibility   c {r.feas_c:.2e}  d {r.feas_d:.2e}")
    print(f"complementary c {r.comp_c:.2e}  d {r.comp_d:.2e}")
    fired = [m for m in sol.monitors if not m["ok"]]
    print(f"monitors      {len(sol.monitors)} checked, {len(fired)} fired")
    print(f"Phi           {hyper_objective(inst, np.zeros(inst.n)):.4f} -> {hyper_objective(inst, sol.x):.4f}")
    for note in sol.warnings:
        print("note:", note)


if __name__ == "__main__":
    main()
