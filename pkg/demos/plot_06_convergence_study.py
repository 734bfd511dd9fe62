"""
Convergence study
=================

With ``R = 0`` the twist decouples and obeys a wave equation with the exact
standing-wave solution ``cos(pi s / l) cos(omega t)``.  Refining the grid
with ``h / k**2`` fixed shows second order convergence in ``k``.
"""

from nhrod import REFERENCE_PARAMETERS, RunConfig, convergence

cfg = RunConfig(params=REFERENCE_PARAMETERS.with_(radius=0.0), preset="theta_wave", t_end=1.0)
print("n_nodes,dt,error,order")
for row in convergence(cfg, [17, 33, 65, 129]):
    order = "" if row.order is None else f"{row.order:.3f}"
    print(f"{row.n_nodes},{row.dt:.3e},{row.error:.3e},{order}")

###############################################################################
# The same study with bending switched off, and for the unconstrained rod
# with unit radius: the twist wave never sees the centerline.

for params, constrained in ((REFERENCE_PARAMETERS.with_(radius=0.0, bend_k=0.0), True), (REFERENCE_PARAMETERS, False)):
    rows = convergence(RunConfig(params=params, preset="theta_wave", t_end=1.0, constrained=constrained), [17, 33, 65])
    print([round(r.order, 3) for r in rows[1:]])
