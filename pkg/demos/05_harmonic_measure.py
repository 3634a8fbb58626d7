"""
The harmonic measure and where it lives
=======================================

The value of the solution at ``x`` is an average of ``f`` against a
probability measure.  Part of it sits on the boundary; the rest sits on
the reflected copies of the domain.
"""

import numpy as np

from dunklsolve import Box, builtin, harmonic_measure, parse, solve_reduction

D = Box([2.0, 0.5], [3.0, 1.0])
rs = builtin("B2", k=(0.5, 1.5))
x = [2.5, 0.75]

for h in (1 / 16, 1 / 32, 1 / 64):
    m = harmonic_measure(D, rs, x, h)
    print(
        f"h = 1/{round(1 / h):<3d} total {m.total_mass:.10f}  boundary {m.boundary_mass:.4f}  "
        f"per copy {np.round(m.reflected_mass, 4)}  decomposition residual {m.decomposition_residual(rs):.2e}"
    )

# the measure reproduces the solver
f = parse("x1^3 - x2^4 + x1*x2", 2)
m = harmonic_measure(D, rs, x, 1 / 32)
print("pairing", m.pair(f), " solve", solve_reduction(D, rs, f, 1 / 32).at(x))

# the short root e2 reflects D to x2 < 0, which is where its mass goes
j = 1
print("images of the e2 copy lie in x2 <", m.images[:, j, 1].max())
