"""
Grids, ghost nodes and stencils
===============================

A rod of length ``l`` is sampled on ``N`` nodes.  Free ends put a node on
both endpoints, a periodic rod does not.  Every finite difference reads
two virtual nodes beyond each end, filled according to the boundary mode.
"""

import numpy as np

from nhrod import BC, Grid, GhostKind, diff1_central, diff2, diff4, ghost_value
from nhrod.core import extend

free = Grid(32, 4.0)
ring = Grid(32, 4.0, BC.PERIODIC)
print("free spacing", free.spacing, "periodic spacing", ring.spacing)

###############################################################################
# Free ends extend the centerline linearly (zero curvature and zero shear
# force at the end) and mirror the twist angle (zero torque).

f = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
print("centerline ghosts", extend(f, GhostKind.CENTERLINE_FREE))
theta = np.array([0.0, 0.3, 0.1, 0.2, 0.5, 0.4])
print("twist ghosts     ", extend(theta, GhostKind.TORSION_FREE))
print("periodic ghost at -2:", ghost_value(theta, -2, free, GhostKind.PERIODIC))

###############################################################################
# The centred first difference and the second and fourth differences are
# second order accurate.  Halving ``k`` divides the error by four.

for n in (33, 65, 129):
    g = Grid(n, 4.0)
    u = np.cos(np.pi * g.s / 4)
    exact = (np.pi / 4) ** 4 * u
    err = max(abs(diff4(u, i, g) - exact[i]) for i in range(2, n - 2))
    print(f"N={n:4d}  max interior error of the fourth difference {err:.3e}")

print("second difference of s^2:", diff2(free.s**2, 10, free))
print("first difference of s:  ", diff1_central(free.s, 0, free))
