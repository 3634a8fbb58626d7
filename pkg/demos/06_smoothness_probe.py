"""
How data on the reflected copies shapes the solution
====================================================

Put a kink in ``f`` on one reflected copy of ``D`` and compare how
quickly the solution and its second differences settle under refinement.
The output is descriptive: there is no threshold to pass.

A kink is Lipschitz, hence Holder, so the solution stays twice
differentiable inside ``D``.  Expect at most a mild dip in the observed
orders.  With ``k = 0`` the reflected copies are invisible, and the two
reports coincide.
"""

import json

import numpy as np

from dunklsolve import Box, builtin, smoothness_probe
from dunklsolve.convergence import ladder

D = Box([2.0, 0.5], [3.0, 1.0])
smooth = lambda x: x[:, 0] ** 2 + x[:, 1]
# a kink along x2 = -0.71; its mirror image x2 = 0.71 cuts through D off the grid lines
kinked = lambda x: smooth(x) + np.where(x[:, 1] < 0, np.abs(x[:, 1] + 0.71), 0.0)

for rs in (builtin("A1^n", k=(0.5, 1.5), n=2), builtin("A1^n", k=0, n=2)):
    report = smoothness_probe(D, rs, smooth, kinked, ladder(1 / 8, 4))
    print(rs.name, rs.multiplicities)
    print(json.dumps({k: report[k] for k in ("smooth", "kinked")}, indent=1))
