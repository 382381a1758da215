#!/usr/bin/env python3
"""Grid refinement study for the mapped wavefunctions.

Halves dx and dt together and reports the residuals of the R-mapped TQ
trajectory against the TM equation, the retimed TM trajectory against the
TO equation, the TQ self-residual and the TQ/TM L2 discrepancy.  Second-order
schemes should show ratios near 4 between rows.
"""
import argparse
import math

import numpy as np

from qxform.examples import Example1Params, example1_systems
from qxform.propagate import SpatialGrid, apply_r_trajectory, gaussian, propagate, residual, retime_trajectory


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--upsilon", type=float, default=0.5)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--n0", type=int, default=256)
    ap.add_argument("--steps0", type=int, default=100)
    args = ap.parse_args()

    ex = example1_systems(Example1Params(args.upsilon, 1.0))
    print(f"{'n':>6} {'steps':>6} {'R.TQ vs TM':>11} {'TM vs TO':>10} {'TQ self':>10} {'L2':>10}")
    prev = None
    for lvl in range(args.levels):
        n, steps = args.n0 << lvl, args.steps0 << lvl
        grid = SpatialGrid.box(-12.0, 12.0, n)
        psi0 = gaussian(grid, 0.5, 0.3)
        tq = propagate(ex.tq, psi0, 1.0, steps)
        tm = propagate(ex.tm, psi0, 1.0, steps)
        theta = apply_r_trajectory(tq, ex.gauge)
        row = np.array([
            residual(ex.tm, theta).value,
            residual(ex.to, retime_trajectory(tm, ex.map)).value,
            residual(ex.tq, tq).value,
            max(math.sqrt(float(np.sum(np.abs(a.amps - b.amps) ** 2)) * grid.dx)
                for a, b in zip(theta.states, tm.states)),
        ])
        print(f"{n:6d} {steps:6d} " + " ".join(f"{v:10.2e}" for v in row))
        if prev is not None:
            print(f"{'ratio':>13} " + " ".join(f"{v:10.2f}" for v in prev / row))
        prev = row


if __name__ == "__main__":
    main()
