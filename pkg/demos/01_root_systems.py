"""
Root systems, weights and the potential
=======================================

A root system is a finite set of reflections.  The multiplicity ``k`` must
be constant on orbits, and the weight, the potential ``q`` and the
reflection part ``N`` are all built from the pairings ``<x, alpha>``.
"""

import numpy as np

from dunklsolve import RootSystem, builtin

# B2 has short roots e1, e2 and long roots e1 - e2, e1 + e2; k is given per orbit
b2 = builtin("B2", k=(1.0, 2.0))
print(b2.positive_roots, b2.multiplicities)

x = np.array([2.5, 0.75])
print("weight       ", b2.weight(x))
print("sqrt weight  ", b2.sqrt_weight(x))
print("potential q  ", b2.potential_q(x))
print("distance to the nearest hyperplane", b2.hyperplane_distance(x))

# reflecting twice is the identity, and the weight does not see reflections
y = b2.reflect(2, x)
print("sigma x =", y, " back:", b2.reflect(2, y))
print("w(sigma x) / w(x) =", b2.weight(y) / b2.weight(x))

# the identity that makes the reduction work needs an orbit-invariant k
pts = np.random.default_rng(0).uniform(-2, 2, (200, 2))
pts = pts[b2.hyperplane_distance(pts) > 0.1]
print("lemma residual, invariant k:", np.abs(b2.dunkl_lemma_residual(pts)).max())

broken = RootSystem(b2.positive_roots, [1.0, 2.0, 1.0, 1.0])
print("lemma residual, broken k:   ", np.abs(broken.dunkl_lemma_residual(pts)).max())
print(broken.validate())

# dihedral groups: I2(4) is B2 in disguise
print(builtin("I2", m=4, k=1).validate().ok, builtin("I2", m=5, k=0.5).validate().ok)
