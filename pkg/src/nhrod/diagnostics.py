"""Conservation-law and constraint monitors.

All quantities are evaluated on a pair of consecutive levels.  Velocities
are the scheme's native half-step differences ``(curr - prev) / h``;
potential terms are averaged over the two levels so that every quantity is
centred at the same half step.  Spatial integrals use trapezoidal weights
for free ends and the rectangle rule on a periodic grid.
"""
from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import Callable

import numpy as np

from .core import Grid, RodParameters, StatePair, FieldLevel, d1_central, d1_forward, delta2, extend
from .stepper import Kernel

__all__ = [
    "DiagnosticsRecord",
    "Jet",
    "total_energy",
    "energy_density",
    "linear_momentum",
    "angular_momentum",
    "torsional_momentum",
    "constraint_residuals",
    "stretch_extrema",
    "continuum_nh_residual",
    "make_record",
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    step: int
    t: float
    energy: float
    px: float
    py: float
    ptheta: float
    jz: float
    c1_max: float
    c2_max: float
    stretch_min: float
    stretch_max: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> tuple:
        return astuple(self)


def _arrays(state: StatePair):
    return state.prev.as_array(), state.curr.as_array(), state.dt


def energy_density(prev: np.ndarray, curr: np.ndarray, dt: float, params: RodParameters, grid: Grid) -> np.ndarray:
    """Per-node energy density for ``(3, N)`` arrays at levels ``n`` and ``n+1``."""
    k = grid.spacing
    vel = (curr - prev) / dt
    kinetic = 0.5 * (params.rho * (vel[0] ** 2 + vel[1] ** 2) + params.alpha * vel[2] ** 2)
    potential = 0.0
    for q in (prev, curr):
        curv = delta2(extend(q[:2], grid.centerline_kind())) / k**2
        twist = d1_forward(extend(q[2], grid.torsion_kind())) / k
        potential = potential + 0.25 * (
            params.bend_k * (curv[0] ** 2 + curv[1] ** 2) + params.beta * twist**2
        )
    return kinetic + potential


def total_energy(state: StatePair, params: RodParameters, grid: Grid) -> float:
    prev, curr, dt = _arrays(state)
    return float(grid.weights @ energy_density(prev, curr, dt, params, grid))


def linear_momentum(state: StatePair, params: RodParameters, grid: Grid) -> tuple[float, float]:
    prev, curr, dt = _arrays(state)
    p = params.rho * (grid.weights @ ((curr[:2] - prev[:2]).T)) / dt
    return float(p[0]), float(p[1])


def angular_momentum(state: StatePair, params: RodParameters, grid: Grid) -> float:
    """``int rho (x y' - y x') ds`` at the half step (midpoint positions)."""
    prev, curr, dt = _arrays(state)
    mid = 0.5 * (prev + curr)
    vel = (curr - prev) / dt
    return float(params.rho * (grid.weights @ (mid[0] * vel[1] - mid[1] * vel[0])))


def torsional_momentum(state: StatePair, params: RodParameters, grid: Grid) -> float:
    prev, curr, dt = _arrays(state)
    return float(params.alpha * (grid.weights @ (curr[2] - prev[2])) / dt)


def constraint_residuals(
    state: StatePair, nxt: FieldLevel, params: RodParameters, grid: Grid
) -> tuple[float, float]:
    """Largest absolute defects of the two discrete rolling constraints.

    The constraints are centred on ``state.curr`` and involve
    ``state.prev`` and ``nxt``.
    """
    kern = Kernel(params, grid, state.dt)
    c1, c2 = kern.residuals(state.prev.as_array(), state.curr.as_array(), nxt.as_array())
    return float(np.max(np.abs(c1))), float(np.max(np.abs(c2)))


def stretch_extrema(level: FieldLevel, grid: Grid) -> tuple[float, float]:
    """Extrema over nodes of ``sqrt(x'^2 + y'^2)`` from centred differences."""
    q = level.as_array() if isinstance(level, FieldLevel) else np.asarray(level)
    slopes = d1_central(extend(q[:2], grid.centerline_kind())) / (2 * grid.spacing)
    stretch = np.hypot(slopes[0], slopes[1])
    return float(stretch.min()), float(stretch.max())


def make_record(
    step: int,
    prev: np.ndarray,
    curr: np.ndarray,
    dt: float,
    params: RodParameters,
    grid: Grid,
    c1_max: float,
    c2_max: float,
) -> DiagnosticsRecord:
    """Diagnostics row for the pair ``(prev, curr)``; ``curr`` has index ``step``."""
    w = grid.weights
    vel = (curr - prev) / dt
    mid = 0.5 * (prev + curr)
    smin, smax = stretch_extrema(curr, grid)
    return DiagnosticsRecord(
        step=int(step),
        t=step * dt,
        energy=float(w @ energy_density(prev, curr, dt, params, grid)),
        px=float(params.rho * (w @ vel[0])),
        py=float(params.rho * (w @ vel[1])),
        ptheta=float(params.alpha * (w @ vel[2])),
        jz=float(params.rho * (w @ (mid[0] * vel[1] - mid[1] * vel[0]))),
        c1_max=float(c1_max),
        c2_max=float(c2_max),
        stretch_min=smin,
        stretch_max=smax,
    )


@dataclass(frozen=True)
class Jet:
    """Derivatives of a smooth field configuration at one point ``(t, s)``.

    Subscripts: ``t`` time, ``s`` arclength; ``x_ssss`` is the fourth
    arclength derivative of x, and so on.
    """

    x_t: float = 0.0
    y_t: float = 0.0
    theta_t: float = 0.0
    x_s: float = 0.0
    y_s: float = 0.0
    x_tt: float = 0.0
    y_tt: float = 0.0
    theta_tt: float = 0.0
    theta_ss: float = 0.0
    x_ssss: float = 0.0
    y_ssss: float = 0.0


def continuum_nh_residual(
    sampler: Callable[[float, float], Jet],
    params: RodParameters,
    point: tuple[float, float],
    lam: float | Callable[[float, float], float] = 0.0,
    mu: float | Callable[[float, float], float] = 0.0,
) -> np.ndarray:
    """Residuals of the continuum rolling-rod equations at ``point = (t, s)``.

    Returns the five values

        rho x_tt + K x_ssss - lam
        rho y_tt + K y_ssss - mu
        alpha theta_tt - beta theta_ss - R (lam y_s - mu x_s)
        x_t + R theta_t y_s
        y_t - R theta_t x_s

    for the jet supplied by ``sampler(t, s)``.
    """
    t, s = point
    j = sampler(t, s)
    lam_v = lam(t, s) if callable(lam) else lam
    mu_v = mu(t, s) if callable(mu) else mu
    r, K = params.radius, params.bend_k
    return np.array(
        [
            params.rho * j.x_tt + K * j.x_ssss - lam_v,
            params.rho * j.y_tt + K * j.y_ssss - mu_v,
            params.alpha * j.theta_tt - params.beta * j.theta_ss - r * (lam_v * j.y_s - mu_v * j.x_s),
            j.x_t + r * j.theta_t * j.y_s,
            j.y_t - r * j.theta_t * j.x_s,
        ]
    )
