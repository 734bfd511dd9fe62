"""
The discrete variational oracle
===============================

The closed-form step can be checked against a brute-force route: build the
discrete Lagrangian on a six-point cell, sum its partial derivatives over
the six cells around a node and solve the resulting nonholonomic equations
with Newton's method.
"""

import numpy as np

from nhrod import REFERENCE_PARAMETERS, FieldLevel, Grid, StatePair
from nhrod.oracle import (
    cell_partials,
    chetaev_oneform,
    discrete_lagrangian,
    numeric_cell_partials,
    verify_step_equivalence,
)

params = REFERENCE_PARAMETERS
k = 4 / 31
h = k**2 / 8

eps = 1e-2
cell = np.zeros((6, 3))
cell[1, 0] = cell[4, 0] = eps
print("L_d of a single bump:", discrete_lagrangian(cell, params, h, k), "=", -2 * params.bend_k * eps**2 / k**4)

###############################################################################
# Gradient check of the analytic cell partials.

rng = np.random.default_rng(0)
cell = rng.standard_normal((6, 3))
ga = cell_partials(cell, params, h, k)
gn = numeric_cell_partials(cell, params, h, k)
print("relative mismatch:", np.abs(ga - gn).max() / np.abs(ga).max())

###############################################################################
# The reaction forces are generated by two covectors per node.  For a
# straight rod along x they are ``(1, 0, 0)`` and ``(0, 1, -R)``.

print(chetaev_oneform(np.array([[-k, 0, 0], [k, 0, 0]]), params, k))

###############################################################################
# Newton oracle against the closed-form stepper on random 7-node states.

grid = Grid.for_rod(params, 7)
h7 = grid.spacing**2 / 8
worst = 0.0
for _ in range(5):
    base = np.stack([grid.s, np.zeros(7), np.zeros(7)])
    prev = base + 0.05 * rng.standard_normal(base.shape)
    curr = prev + 0.01 * rng.standard_normal(base.shape)
    state = StatePair(FieldLevel.from_array(0, prev), FieldLevel.from_array(1, curr), h7)
    worst = max(worst, verify_step_equivalence(state, params, grid))
print("largest deviation:", worst)
