#!/usr/bin/env python3
"""Sweep the boundary-coefficient plane and tabulate class + growth rate.

Writes stability_map.csv (a1, a2, class, pole) and prints a coarse text map.
"""

import argparse

import numpy as np

from hsgreen.core import ModelParams, classify_boundary
from hsgreen.spectral import find_boundary_pole

GLYPH = {
    "dirichlet": "D",
    "neumann": "N",
    "mixed_stable": ".",
    "mixed_unstable": "X",
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=21)
    ap.add_argument("--span", type=float, default=2.0)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--nu", type=float, default=1.0)
    ap.add_argument("--out", default="stability_map.csv")
    args = ap.parse_args()

    grid = np.linspace(-args.span, args.span, args.n)
    with open(args.out, "w") as fh:
        fh.write("a1,a2,class,pole\n")
        for a2 in grid[::-1]:
            row = []
            for a1 in grid:
                if a1 == 0.0 and a2 == 0.0:
                    fh.write("0,0,invalid,\n")
                    row.append("?")
                    continue
                cls = classify_boundary(a1, a2)
                pole = find_boundary_pole(ModelParams(c=args.c, nu=args.nu, a1=a1, a2=a2))
                fh.write(
                    f"{a1:.17g},{a2:.17g},{cls.value}," +
                    (f"{pole:.17g}" if pole is not None else "") + "\n"
                )
                row.append(GLYPH[cls.value])
            print("".join(row))
    print(f"\nwrote {args.out}  (X = exponential growth, . = stable mixed)")


if __name__ == "__main__":
    main()
