"""
Conservation laws
=================

A free periodic rod is invariant under translations of x, y and theta, so
the scheme keeps the three discrete momenta constant to roundoff.  With the
rolling constraints on and free ends, the energy oscillates without drift.
"""

import numpy as np

from nhrod import BC, REFERENCE_PARAMETERS, Grid, InitialData
from nhrod.diagnostics import make_record
from nhrod.presets import paper
from nhrod.simulate import integrate

params = REFERENCE_PARAMETERS
ring = Grid.for_rod(params, 24, BC.PERIODIC)
h = ring.spacing**2 / 8
phase = 2 * np.pi * ring.s / params.length
data = InitialData(
    0.6 * np.cos(phase),
    0.6 * np.sin(phase),
    0.4 * np.sin(phase),
    vx0=0.3 + 0.1 * np.sin(phase),
    vy0=np.full(24, -0.2),
    vtheta0=0.5 + 0.4 * np.cos(phase),
)
rows = np.array(
    [make_record(j, p, c, h, params, ring, a, b).values()[3:6] for j, p, c, a, b in integrate(params, ring, data, h, 1000, False)]
)
print("momenta at start:", rows[0])
print("largest relative drift:", (np.abs(rows - rows[0]).max(axis=0) / np.abs(rows[0])))

###############################################################################
# Energy of the constrained rod over ten time units.

grid = Grid.for_rod(params, 32)
h = grid.spacing**2 / 8
energy = np.array(
    [make_record(j, p, c, h, params, grid, a, b).energy for j, p, c, a, b in integrate(params, grid, paper(params, grid), h, int(10 / h))]
)
print(f"E(0) = {energy[0]:.6f}, relative band {np.ptp(energy) / energy[0]:.2e}")
