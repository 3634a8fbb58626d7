"""
The Dunkl Laplacian at a point
==============================

``apply_dunkl_laplacian`` uses analytic derivatives of a field when they are
given and central differences otherwise.  Linear functions are annihilated,
and ``|x|^2`` maps to ``2 d + 4 sum k``.
"""

import numpy as np

from dunklsolve import ScalarField, apply_N, apply_dunkl_laplacian, builtin, conjugation_residual

rs = builtin("A1^n", k=1, n=2)
x = np.array([2.0, 3.0])

linear = ScalarField.linear([1.0, 1.0])
print("D_k <(1,1), x>      =", apply_dunkl_laplacian(rs, linear, x))
print("N <(1,1), x> at x   =", apply_N(rs, linear, x), "(5/36 =", 5 / 36, ")")

norm2 = ScalarField.from_expression("x1^2 + x2^2", 2)
print("D_k |x|^2 (FD)      =", apply_dunkl_laplacian(rs, norm2, x), "(expected 12)")

# conjugating by sqrt(w) turns D_k into a Schrodinger operator plus N
b2 = builtin("B2", k=(1, 1))
phi = ScalarField.from_expression("x1^2*x2 - 3*x2^2 + x1 + 1", 2)
pts = np.array([[2.5, 0.75], [-1.2, 0.4], [0.3, -1.7]])
print("conjugation residuals:", conjugation_residual(b2, phi, pts, step=1e-3))
