"""
Rank one against an ODE reference
=================================

For a single root the problem is a two-point boundary value problem with
a nonlocal source ``f(-x)``.  ``oracle_1d`` solves it on two grids and
extrapolates, which gives a reference far more accurate than either solver.
"""

import numpy as np

from dunklsolve import Box, builtin, oracle_1d, solve_direct, solve_reduction

f = lambda x: x[:, 0] ** 2
x_ref, u_ref = oracle_1d(1.0, (1.0, 2.0), f, 8192)

for n in (64, 128, 256, 512):
    ref = u_ref[:: 8192 // n][1:-1]
    for solver in (solve_reduction, solve_direct):
        sol = solver(Box([1.0], [2.0]), builtin("A1", k=1), f, 1 / n)
        order = np.argsort(sol.grid.interior_points[:, 0])
        err = np.abs(sol.interior[order] - ref).max() / np.abs(ref).max()
        print(f"n = {n:4d}  {solver.__name__:16s} relative error {err:.2e}")
