"""Discrete field-theory machinery used as a brute-force check of the stepper.

A *cell* is the 6 x 3 array of field values at the mesh points

    (n, i-1), (n, i), (n, i+1), (n+1, i-1), (n+1, i), (n+1, i+1)

(rows, in this order) for the fields x, y, theta (columns).  The discrete
Euler-Lagrange residual at a node is assembled from the partial derivatives
of the discrete Lagrangian on the six cells that contain it, and the
nonholonomic step is recovered by a Newton solve of that residual together
with the discrete rolling constraints.  Nothing here calls into the
closed-form stepper except :func:`verify_step_equivalence`, which compares
against it.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .core import Grid, RodParameters, StatePair, extend, NGHOST
from .stepper import constrained_step

__all__ = [
    "OracleFailure",
    "discrete_lagrangian",
    "cell_partials",
    "numeric_cell_partials",
    "patch_cell",
    "discrete_el_residual",
    "semi_discrete_constraints",
    "chetaev_forms",
    "chetaev_oneform",
    "solve_node",
    "verify_step_equivalence",
]

X, Y, TH = 0, 1, 2


class OracleFailure(RuntimeError):
    pass


def _as_cell(cell) -> np.ndarray:
    c = np.asarray(cell, dtype=float)
    if c.shape != (6, 3):
        raise ValueError(f"a cell is a (6, 3) array of node values, got shape {c.shape}")
    return c


def discrete_lagrangian(cell, params: RodParameters, h: float, k: float) -> float:
    """Discrete Lagrangian of one cell.

    Kinetic terms use the time difference at the centre column, the twist
    term the forward spatial difference on the lower row and the bending
    terms the second difference on the lower row.
    """
    c = _as_cell(cell)
    lower, upper = c[:3], c[3:]
    vel = upper[1] - lower[1]
    dtheta = lower[2, TH] - lower[1, TH]
    curv = lower[0, :2] - 2.0 * lower[1, :2] + lower[2, :2]
    return float(
        params.rho / (2 * h**2) * (vel[X] ** 2 + vel[Y] ** 2)
        + params.alpha / (2 * h**2) * vel[TH] ** 2
        - params.beta / (2 * k**2) * dtheta**2
        - params.bend_k / (2 * k**4) * (curv[0] ** 2 + curv[1] ** 2)
    )


def cell_partials(cell, params: RodParameters, h: float, k: float) -> np.ndarray:
    """Analytic gradient of :func:`discrete_lagrangian`, shape ``(6, 3)``.

    Row ``j`` is the partial ``D_{j+1} L_d`` with respect to the values at
    the ``j``-th cell point.
    """
    c = _as_cell(cell)
    g = np.zeros((6, 3))
    vel = c[4] - c[1]
    mass = np.array([params.rho, params.rho, params.alpha]) / h**2
    g[4] += mass * vel
    g[1] -= mass * vel
    twist = params.beta / k**2 * (c[2, TH] - c[1, TH])
    g[2, TH] -= twist
    g[1, TH] += twist
    curv = c[0, :2] - 2.0 * c[1, :2] + c[2, :2]
    bend = params.bend_k / k**4 * curv
    g[0, :2] -= bend
    g[1, :2] += 2.0 * bend
    g[2, :2] -= bend
    return g


def numeric_cell_partials(
    cell, params: RodParameters, h: float, k: float, rel_step: float = 1e-6
) -> np.ndarray:
    """Central-difference gradient of the discrete Lagrangian."""
    c = _as_cell(cell)
    g = np.empty((6, 3))
    for j in range(6):
        for a in range(3):
            step = rel_step * max(1.0, abs(c[j, a]))
            cp = c.copy()
            cm = c.copy()
            cp[j, a] += step
            cm[j, a] -= step
            g[j, a] = (
                discrete_lagrangian(cp, params, h, k) - discrete_lagrangian(cm, params, h, k)
            ) / (2 * step)
    return g


def patch_cell(patch: np.ndarray, row: int, col: int) -> np.ndarray:
    """Cell whose lower row is ``row`` and whose centre column is ``col``."""
    return np.concatenate([patch[row, col - 1 : col + 2], patch[row + 1, col - 1 : col + 2]])


def discrete_el_residual(
    patch, params: RodParameters, h: float, k: float, partials: str = "analytic"
) -> np.ndarray:
    """Discrete Euler-Lagrange residual at the centre of a ``(3, 5, 3)`` patch.

    The patch holds time rows ``n-1, n, n+1``, spatial columns ``i-2 .. i+2``
    and fields x, y, theta.  The sum of the six cell partials is multiplied
    by ``-h^2``, so that for the x field the result reads

        rho (x[n+1] - 2 x[n] + x[n-1]) + (h^2 K / k^4) Delta4 x[n]

    and vanishes exactly on solutions of the free leapfrog update.
    """
    p = np.asarray(patch, dtype=float)
    if p.shape != (3, 5, 3):
        raise ValueError(f"patch must have shape (3, 5, 3), got {p.shape}")
    grad = cell_partials if partials == "analytic" else numeric_cell_partials
    n, i = 1, 2
    total = (
        grad(patch_cell(p, n, i + 1), params, h, k)[0]
        + grad(patch_cell(p, n, i), params, h, k)[1]
        + grad(patch_cell(p, n, i - 1), params, h, k)[2]
        + grad(patch_cell(p, n - 1, i + 1), params, h, k)[3]
        + grad(patch_cell(p, n - 1, i), params, h, k)[4]
        + grad(patch_cell(p, n - 1, i - 1), params, h, k)[5]
    )
    return -h**2 * total


def semi_discrete_constraints(neighbours, velocity, params: RodParameters, k: float) -> np.ndarray:
    """Rolling constraints with spatial slopes discretised, velocities kept.

    ``neighbours`` is the ``(2, 3)`` array of level values at ``i-1`` and
    ``i+1``; ``velocity`` is ``(vx, vy, vtheta)`` at node ``i``.
    """
    nb = np.asarray(neighbours, dtype=float)
    v = np.asarray(velocity, dtype=float)
    xs = (nb[1, X] - nb[0, X]) / (2 * k)
    ys = (nb[1, Y] - nb[0, Y]) / (2 * k)
    r = params.radius
    return np.array([v[X] + r * v[TH] * ys, v[Y] - r * v[TH] * xs])


def chetaev_forms(
    constraint: Callable[[np.ndarray], np.ndarray], n_fields: int, velocity=None, step: float = 1e-6
) -> np.ndarray:
    """Reaction one-forms of a semi-discretised constraint.

    Differentiates ``constraint(v)`` in the velocity slot only (the vertical
    endomorphism applied to its differential).  Returns an array of shape
    ``(n_constraints, n_fields)`` whose rows are the covectors.
    """
    v0 = np.zeros(n_fields) if velocity is None else np.asarray(velocity, dtype=float)
    cols = []
    for a in range(n_fields):
        dv = np.zeros(n_fields)
        dv[a] = step * max(1.0, abs(v0[a]))
        cols.append((np.atleast_1d(constraint(v0 + dv)) - np.atleast_1d(constraint(v0 - dv))) / (2 * dv[a]))
    return np.stack(cols, axis=-1)


def chetaev_oneform(neighbours, params: RodParameters, k: float) -> np.ndarray:
    """``(2, 3)`` covectors on ``(dx, dy, dtheta)`` generating the reaction forces."""
    nb = np.asarray(neighbours, dtype=float)
    r = params.radius / (2 * k)
    return np.array(
        [
            [1.0, 0.0, r * (nb[1, Y] - nb[0, Y])],
            [0.0, 1.0, -r * (nb[1, X] - nb[0, X])],
        ]
    )


def _node_patch(state: StatePair, grid: Grid, i: int) -> np.ndarray:
    """Rows n-1, n, n+1 (the last a placeholder copy of row n) around node ``i``."""
    rows = []
    for level in (state.prev, state.curr):
        ext = np.stack(
            [
                extend(level.x, grid.centerline_kind()),
                extend(level.y, grid.centerline_kind()),
                extend(level.theta, grid.torsion_kind()),
            ],
            axis=-1,
        )
        rows.append(ext[i : i + 2 * NGHOST + 1])
    rows.append(rows[1].copy())
    return np.stack(rows)


def solve_node(
    state: StatePair,
    params: RodParameters,
    grid: Grid,
    i: int,
    tol: float = 1e-12,
    max_iter: int = 100,
    partials: str = "analytic",
):
    """Solve the discrete nonholonomic equations at node ``i`` by Newton's method.

    Unknowns are the new values ``(x, y, theta)`` at ``(n+1, i)`` and the
    scaled multipliers ``h^2 lam``, ``h^2 mu``.  The equations are the
    discrete Euler-Lagrange residual balanced against the Chetaev forms,
    plus the constraints evaluated with centred time differences.

    Returns ``(q_next, h2_lam, h2_mu)``.
    """
    if not 0 <= i < grid.n_nodes:
        raise IndexError(f"node {i} outside the grid")
    h, k = state.dt, grid.spacing
    patch = _node_patch(state, grid, i)
    nb = patch[1, [1, 3]]
    forms = chetaev_oneform(nb, params, k)
    q_prev = patch[0, 2]

    def equations(z):
        p = patch.copy()
        p[2, 2] = z[:3]
        res = discrete_el_residual(p, params, h, k, partials) - z[3:] @ forms
        vel = (z[:3] - q_prev) / (2 * h)
        con = 2 * h * semi_discrete_constraints(nb, vel, params, k)
        return np.concatenate([res, con])

    z = np.concatenate([patch[1, 2], np.zeros(2)])
    scale = max(1.0, float(np.max(np.abs(patch))))
    f = equations(z)
    for _ in range(max_iter):
        if np.max(np.abs(f)) <= tol * scale:
            return z[:3], z[3], z[4]
        jac = np.empty((5, 5))
        for j in range(5):
            dz = np.zeros(5)
            dz[j] = 1e-6 * max(1.0, abs(z[j]))
            jac[:, j] = (equations(z + dz) - equations(z - dz)) / (2 * dz[j])
        delta = np.linalg.solve(jac, -f)
        damping = 1.0
        while True:
            trial = z + damping * delta
            f_trial = equations(trial)
            if np.max(np.abs(f_trial)) < np.max(np.abs(f)) or damping < 1e-4:
                break
            damping *= 0.5
        z, f = trial, f_trial
    if np.max(np.abs(f)) <= tol * scale:
        return z[:3], z[3], z[4]
    raise OracleFailure(f"Newton solve at node {i} did not converge; |F| = {np.max(np.abs(f)):.3e}")


def verify_step_equivalence(
    state: StatePair, params: RodParameters, grid: Grid, i: int | None = None
) -> float:
    """Largest deviation between the closed-form step and the Newton oracle.

    Compares the new field values and the scaled multipliers ``h^2 lam``,
    ``h^2 mu`` at node ``i`` (every node when ``i`` is None).
    """
    step = constrained_step(state, params, grid)
    h2 = state.dt**2
    nodes = range(grid.n_nodes) if i is None else [i]
    worst = 0.0
    for j in nodes:
        q, l1, l2 = solve_node(state, params, grid, j)
        closed = np.array(
            [
                step.next.x[j],
                step.next.y[j],
                step.next.theta[j],
                h2 * step.multipliers.lam[j],
                h2 * step.multipliers.mu[j],
            ]
        )
        worst = max(worst, float(np.max(np.abs(np.concatenate([q, [l1, l2]]) - closed))))
    return worst
