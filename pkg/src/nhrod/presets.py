"""Initial data presets and node-value files."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import BC, Grid, InitialData, RodParameters

PRESETS = ("paper", "straight_rest", "theta_wave", "custom")
INITIAL_COLUMNS = ("x", "y", "theta", "vx", "vy", "vtheta")


def paper(params: RodParameters, grid: Grid) -> InitialData:
    """Straight rod along the x axis, twisted by ``-pi/2 cos(pi s / l)``, at rest."""
    s = grid.s
    return InitialData(s, np.zeros_like(s), -0.5 * np.pi * np.cos(np.pi * s / params.length))


def straight_rest(params: RodParameters, grid: Grid) -> InitialData:
    s = grid.s
    return InitialData(s, np.zeros_like(s), np.zeros_like(s))


def theta_wave_wavenumber(params: RodParameters, grid: Grid) -> float:
    # the lowest mode compatible with the boundary condition
    n = 2 if grid.bc is BC.PERIODIC else 1
    return n * np.pi / params.length


def theta_wave_solution(params: RodParameters, grid: Grid, t: float) -> np.ndarray:
    """Standing torsion wave ``cos(q s) cos(omega t)`` with ``omega = q sqrt(beta/alpha)``.

    Exact for the uncoupled twist equation: straight rod, ``R = 0`` or
    no rolling constraint.
    """
    q = theta_wave_wavenumber(params, grid)
    omega = q * np.sqrt(params.beta / params.alpha)
    return np.cos(q * grid.s) * np.cos(omega * t)


def theta_wave(params: RodParameters, grid: Grid) -> InitialData:
    s = grid.s
    return InitialData(s, np.zeros_like(s), theta_wave_solution(params, grid, 0.0))


def load_initial_file(path, grid: Grid) -> InitialData:
    """Read node values from a CSV with header ``x,y,theta,vx,vy,vtheta``.

    The velocity columns may be omitted (zero velocity).
    """
    table = np.genfromtxt(Path(path), delimiter=",", names=True, dtype=float)
    names = table.dtype.names or ()
    for col in INITIAL_COLUMNS[:3]:
        if col not in names:
            raise ValueError(f"{path}: missing column {col!r}")
    table = np.atleast_1d(table)
    if table.shape[0] != grid.n_nodes:
        raise ValueError(f"{path}: {table.shape[0]} rows, expected {grid.n_nodes}")
    cols = {c: (table[c] if c in names else None) for c in INITIAL_COLUMNS}
    return InitialData(
        cols["x"], cols["y"], cols["theta"], cols["vx"], cols["vy"], cols["vtheta"]
    )


def make_initial(name: str, params: RodParameters, grid: Grid, initial_file=None) -> InitialData:
    if name == "custom":
        if initial_file is None:
            raise ValueError("preset 'custom' needs an initial_file")
        return load_initial_file(initial_file, grid)
    builders = {"paper": paper, "straight_rest": straight_rest, "theta_wave": theta_wave}
    if name not in builders:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return builders[name](params, grid)
