"""
Two independent solvers
=======================

The reduction solver conjugates by ``sqrt(w)`` and solves two Schrodinger
problems.  The direct solver discretizes the Dunkl Laplacian as is, drift
and reflections included.  Their sup-difference shrinks like ``h^2``.
"""

import numpy as np

from dunklsolve import Box, builtin, solve_direct, solve_reduction
from dunklsolve.convergence import empirical_orders

D = Box([2.0, 0.5], [3.0, 1.0])  # inside the chamber x1 > x2 > 0
rs = builtin("B2", k=(1, 1))
f = "x1^2*x2"

diffs = []
for h in (1 / 16, 1 / 32, 1 / 64):
    a = solve_reduction(D, rs, f, h)
    b = solve_direct(D, rs, f, h)
    diffs.append(np.abs(a.interior - b.interior).max())
    print(f"h = 1/{round(1 / h):<3d} nodes {a.grid.interior.size:5d}  |red - dir| = {diffs[-1]:.3e}")
print("observed orders:", empirical_orders(diffs))

# h is not f inside D: the values of f on the reflected copies of D pull on it
sol = solve_reduction(D, rs, f, 1 / 32)
x = np.array([2.5, 0.75])
print("h(x) =", sol.at(x), "  f(x) =", x[0] ** 2 * x[1])
