#!/usr/bin/env python3
"""Tabulate the three Green's-function evaluators along the reflected ridge.

For a fixed source y0 and time t, sample x near the reflected wave front
x + y0 = c t and print the (1,1) and (2,2) entries from the closed-form
leading kernel, the contour-inversion oracle, and the narrow-pulse solver.
"""

import argparse

import numpy as np

from hsgreen.core import Grid1D, ModelParams
from hsgreen.kernels import green_leading
from hsgreen.solver import SolverConfig, green_column
from hsgreen.transforms import invert_laplace_green


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--y0", type=float, default=6.0)
    ap.add_argument("--t", type=float, default=8.0)
    ap.add_argument("--n", type=int, default=9)
    args = ap.parse_args()

    params = ModelParams()
    ridge = params.c * args.t - args.y0
    xs = np.linspace(max(0.5, ridge - 6.0), ridge + 6.0, args.n)
    xs = xs[np.abs(xs - args.y0) > 0.3]

    grid = Grid1D(L=30.0, nx=1200)
    cfg = SolverConfig(grid=grid, t_end=args.t)
    cols = green_column(args.y0, params, cfg, width=0.1,
                        output_times=np.array([0.0, args.t]))
    lap = invert_laplace_green(xs, np.full_like(xs, args.y0), args.t, params)

    print(f"y0={args.y0}, t={args.t}, reflected ridge at x ~ {ridge:.2f}")
    print(f"{'x':>7} | {'lead_11':>10} {'lap_11':>10} {'pde_11':>10} | "
          f"{'lead_22':>10} {'lap_22':>10} {'pde_22':>10}")
    for i, x in enumerate(xs):
        lead = green_leading(float(x), args.y0, args.t, params).smooth
        pde = cols.matrix_at(float(x), args.t)
        print(f"{x:7.3f} | {lead[0, 0]:10.6f} {lap[i, 0, 0]:10.6f} {pde[0, 0]:10.6f} | "
              f"{lead[1, 1]:10.6f} {lap[i, 1, 1]:10.6f} {pde[1, 1]:10.6f}")


if __name__ == "__main__":
    main()
