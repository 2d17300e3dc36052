#!/usr/bin/env python3
"""Pole-set cardinalities for hypercubes and unit-volume balls.

Prints, per set, the simplex pole count, the 2n pole count, tightened
pole-set sizes for a few caps, and the exact vertex count where it exists.
"""

import argparse

import numpy as np

from mrco import polegen
from mrco.benchmarks import unit_volume_ball
from mrco.core import Box


def row(label, target, n, seed, caps):
    basis = polegen.random_affine_basis(n, seed)
    simplex = polegen.circumscribe(basis, target).poles
    cross = polegen.enclosing_cross_poles(target)
    sizes = []
    trajectory = polegen.tighten(cross, target, max_poles=max(caps))
    for cap in caps:
        best = max((len(om) for om in trajectory if len(om) <= cap), default=len(cross))
        sizes.append(best)
    ext = 2 ** n if isinstance(target, Box) else float("inf")
    cells = [label, len(simplex), len(cross), *sizes,
             ext if np.isfinite(ext) else "inf"]
    print(("{:<8}" + "{:>10}" * (len(cells) - 1)).format(*map(str, cells)))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, nargs="+", default=[3, 4, 5, 6])
    parser.add_argument("--caps", type=int, nargs="+", default=[20, 40, 80])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    header = ["set", "simplex", "2n", *[f"<= {c}" for c in args.caps], "#ext"]
    print(("{:<8}" + "{:>10}" * (len(header) - 1)).format(*header))
    for n in args.dims:
        row(f"H_{n}", Box.hypercube(n), n, args.seed, args.caps)
    for n in args.dims:
        row(f"B_{n}", unit_volume_ball(n), n, args.seed, args.caps)


if __name__ == "__main__":
    main()
