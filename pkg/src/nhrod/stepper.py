"""Explicit leapfrog steppers for the rolling rod.

The constrained step is a free leapfrog predictor followed by a node-local
correction along the reaction directions ``(1, 0, R y')`` and
``(0, 1, -R x')``.  The discrete rolling constraints only involve the new
level at the same node, so the multipliers follow from an independent
2x2 symmetric positive definite solve per node.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    FieldLevel,
    Grid,
    InitialData,
    RodParameters,
    StatePair,
    d1_central,
    delta2,
    delta4,
    extend,
)

__all__ = [
    "ConstraintViolation",
    "Multipliers",
    "ConstraintCoefficients",
    "StepResult",
    "Kernel",
    "free_predictor",
    "constraint_coefficients",
    "solve_multipliers",
    "constrained_step",
    "free_step",
    "stability_limit",
    "project_velocity",
    "virtual_level",
    "build_initial_pair",
    "RESIDUAL_RTOL",
]

#: Residual bound of the discrete constraints, relative to max(1, |fields|).
RESIDUAL_RTOL = 1e-10


class ConstraintViolation(RuntimeError):
    """The constrained step left a constraint residual above tolerance."""


@dataclass(frozen=True)
class Multipliers:
    lam: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        for name in ("lam", "mu"):
            v = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite multiplier {name}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class ConstraintCoefficients:
    """``a = R y'`` and ``b = R x'`` at every node, from centred differences."""

    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class StepResult:
    next: FieldLevel
    multipliers: Multipliers
    constraint_residual_max: float


class Kernel:
    """Array-level stepping for one set of parameters, grid and time step.

    Works on ``(3, N)`` arrays ordered x, y, theta.  The dataclass-level
    functions below are thin wrappers; long runs call the kernel directly.
    """

    def __init__(self, params: RodParameters, grid: Grid, dt: float):
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt!r}")
        if params.length != grid.length:
            raise ValueError("grid length differs from the rod length")
        self.params = params
        self.grid = grid
        self.dt = float(dt)
        k = grid.spacing
        h2 = self.dt**2
        self.c_bend = h2 * params.bend_k / (params.rho * k**4)
        self.c_twist = h2 * params.beta / (params.alpha * k**2)
        self.mass_ratio = params.rho / params.alpha
        self.coef_scale = params.radius / (2.0 * k)
        self.kind_xy = grid.centerline_kind()
        self.kind_theta = grid.torsion_kind()

    # free dynamics

    def elastic_increment(self, curr: np.ndarray) -> np.ndarray:
        """``h^2`` times the elastic acceleration at every node."""
        out = np.empty_like(curr)
        out[:2] = -self.c_bend * delta4(extend(curr[:2], self.kind_xy))
        out[2] = self.c_twist * delta2(extend(curr[2], self.kind_theta))
        return out

    def predict(self, prev: np.ndarray, curr: np.ndarray) -> np.ndarray:
        return 2.0 * curr - prev + self.elastic_increment(curr)

    def coefficients(self, curr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        slopes = self.coef_scale * d1_central(extend(curr[:2], self.kind_xy))
        return slopes[1], slopes[0]

    # constraint projection

    def correct(self, d: np.ndarray, a: np.ndarray, b: np.ndarray):
        """Make the increment ``d`` admissible by a reaction along the Chetaev forms.

        Returns the corrected increment and the displacement corrections
        ``u = h^2 lam / rho`` and ``w = h^2 mu / rho``.
        """
        c = self.mass_ratio
        r1 = -(d[0] + a * d[2])
        r2 = -(d[1] - b * d[2])
        cab = c * a * b
        det = 1.0 + c * (a * a + b * b)
        u = ((1.0 + c * b * b) * r1 + cab * r2) / det
        w = (cab * r1 + (1.0 + c * a * a) * r2) / det
        out = np.empty_like(d)
        out[0] = d[0] + u
        out[1] = d[1] + w
        out[2] = d[2] + c * (a * u - b * w)
        return out, u, w

    def constrained(self, prev: np.ndarray, curr: np.ndarray):
        """One constrained step; returns ``(next, u, w, c1, c2)``."""
        a, b = self.coefficients(curr)
        d = self.predict(prev, curr) - prev
        d, u, w = self.correct(d, a, b)
        nxt = prev + d
        c1, c2 = self.residuals(prev, curr, nxt, a, b)
        return nxt, u, w, c1, c2

    def residuals(self, prev, curr, nxt, a=None, b=None):
        """Per-node residuals of both discrete rolling constraints."""
        if a is None:
            a, b = self.coefficients(curr)
        dtheta = nxt[2] - prev[2]
        c1 = nxt[0] - prev[0] + a * dtheta
        c2 = nxt[1] - prev[1] - b * dtheta
        return c1, c2

    def to_multipliers(self, u, w) -> Multipliers:
        f = self.params.rho / self.dt**2
        return Multipliers(f * u, f * w)


def _kernel(state_or_dt, params: RodParameters, grid: Grid) -> Kernel:
    dt = state_or_dt.dt if isinstance(state_or_dt, StatePair) else state_or_dt
    return Kernel(params, grid, dt)


def _check_size(level: FieldLevel, grid: Grid):
    if level.n_nodes != grid.n_nodes:
        raise ValueError(f"level has {level.n_nodes} nodes, grid has {grid.n_nodes}")


def free_predictor(state: StatePair, params: RodParameters, grid: Grid) -> FieldLevel:
    """Leapfrog update of the unconstrained rod (all multipliers zero)."""
    _check_size(state.curr, grid)
    kern = _kernel(state, params, grid)
    nxt = kern.predict(state.prev.as_array(), state.curr.as_array())
    return FieldLevel.from_array(state.curr.time_index + 1, nxt)


def constraint_coefficients(
    level: FieldLevel, params: RodParameters, grid: Grid
) -> ConstraintCoefficients:
    _check_size(level, grid)
    k = grid.spacing
    slopes = d1_central(extend(level.as_array()[:2], grid.centerline_kind()))
    scale = params.radius / (2.0 * k)
    return ConstraintCoefficients(a=scale * slopes[1], b=scale * slopes[0])


def solve_multipliers(
    predictor: FieldLevel,
    state: StatePair,
    coeffs: ConstraintCoefficients,
    params: RodParameters,
) -> Multipliers:
    """Per-node multipliers that make the predicted level admissible.

    Solves ``M_i (lam_i, mu_i) = r_i`` with

        M_i = [[h2/rho + h2/alpha a^2, -h2/alpha a b],
               [-h2/alpha a b,          h2/rho + h2/alpha b^2]]

    where ``r_i`` is minus the constraint defect of the predictor.
    """
    pred = predictor.as_array()
    prev = state.prev.as_array()
    if not np.all(np.isfinite(pred)):
        raise ValueError("predictor contains non-finite values")
    h2 = state.dt**2
    c = params.rho / params.alpha
    a, b = coeffs.a, coeffs.b
    d = pred - prev
    r1 = -(d[0] + a * d[2])
    r2 = -(d[1] - b * d[2])
    det = 1.0 + c * (a * a + b * b)
    u = ((1.0 + c * b * b) * r1 + c * a * b * r2) / det
    w = (c * a * b * r1 + (1.0 + c * a * a) * r2) / det
    f = params.rho / h2
    return Multipliers(f * u, f * w)


def _scale(*arrays) -> float:
    return max(1.0, max(float(np.max(np.abs(a))) for a in arrays))


def constrained_step(state: StatePair, params: RodParameters, grid: Grid) -> StepResult:
    """Advance one time step with both rolling constraints enforced exactly.

    Raises
    ------
    ConstraintViolation
        If the constraint residual exceeds ``RESIDUAL_RTOL * max(1, |fields|)``;
        this means the solve itself is broken.
    """
    _check_size(state.curr, grid)
    kern = _kernel(state, params, grid)
    prev, curr = state.prev.as_array(), state.curr.as_array()
    nxt, u, w, c1, c2 = kern.constrained(prev, curr)
    if not np.all(np.isfinite(nxt)):
        raise FloatingPointError(f"non-finite field values at step {state.curr.time_index + 1}")
    resid = float(max(np.max(np.abs(c1)), np.max(np.abs(c2))))
    if resid > RESIDUAL_RTOL * _scale(prev, nxt):
        raise ConstraintViolation(
            f"constraint residual {resid:.3e} at step {state.curr.time_index + 1}"
        )
    return StepResult(
        next=FieldLevel.from_array(state.curr.time_index + 1, nxt),
        multipliers=kern.to_multipliers(u, w),
        constraint_residual_max=resid,
    )


def free_step(state: StatePair, params: RodParameters, grid: Grid) -> FieldLevel:
    return free_predictor(state, params, grid)


def stability_limit(params: RodParameters, grid: Grid) -> float:
    """Explicit Euler-Bernoulli beam bound ``k^2 sqrt(rho/K) / 2``.

    Returns ``inf`` for a rod without bending stiffness.
    """
    if params.bend_k == 0:
        return float("inf")
    return grid.spacing**2 * np.sqrt(params.rho / params.bend_k) / 2.0


def project_velocity(
    positions: np.ndarray, velocities: np.ndarray, params: RodParameters, grid: Grid
) -> np.ndarray:
    """Mass-orthogonal projection of node velocities onto the rolling constraints."""
    kern = Kernel(params, grid, 1.0)
    a, b = kern.coefficients(np.asarray(positions, dtype=float))
    v, _, _ = kern.correct(np.asarray(velocities, dtype=float), a, b)
    return v


def virtual_level(kern: Kernel, q0: np.ndarray, v0: np.ndarray, constrained: bool) -> np.ndarray:
    """Level ``-1`` seeding the leapfrog: ``q0 - h v0 + h^2/2 a_free``.

    For the constrained rod ``v0`` is projected onto the constraints first.
    """
    if constrained:
        v0 = project_velocity(q0, v0, kern.params, kern.grid)
    return q0 - kern.dt * v0 + 0.5 * kern.elastic_increment(q0)


def build_initial_pair(
    data: InitialData,
    params: RodParameters,
    grid: Grid,
    dt: float,
    constrained: bool = True,
) -> StatePair:
    """Levels 0 and 1 from positions and velocities at ``t = 0``.

    Level 1 is ``phi0 + h v0 + h^2/2 a0``.  For the constrained rod the
    initial velocity is first projected onto the rolling constraints and
    level 1 comes from a constrained step taken from the virtual level
    ``phi0 - h v0 + h^2/2 a_free``, so the pair is admissible by construction.
    """
    if data.n_nodes != grid.n_nodes:
        raise ValueError(f"initial data has {data.n_nodes} nodes, grid has {grid.n_nodes}")
    kern = Kernel(params, grid, dt)
    q0 = data.positions()
    virtual = virtual_level(kern, q0, data.velocities(), constrained)
    if constrained:
        q1 = kern.constrained(virtual, q0)[0]
    else:
        q1 = kern.predict(virtual, q0)
    return StatePair(FieldLevel.from_array(0, q0), FieldLevel.from_array(1, q1), float(dt))
