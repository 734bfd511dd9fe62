"""Time integration loops, output files and refinement studies."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator

import numpy as np

from .config import ConfigError, RunConfig
from .core import Grid, InitialData, RodParameters
from .diagnostics import DiagnosticsRecord, make_record
from .presets import make_initial, theta_wave_solution
from .stepper import Kernel, stability_limit, virtual_level

FIELDS = ("x", "y", "theta")


class NumericalAbort(RuntimeError):
    def __init__(self, step: int, field: str):
        super().__init__(f"non-finite {field} at step {step}")
        self.step = step
        self.field = field


class StabilityWarning(UserWarning):
    pass


def n_steps_for(t_end: float, dt: float) -> int:
    # guard against t_end/dt landing a hair above an integer
    return max(1, math.ceil(t_end / dt - 1e-9))


def integrate(
    params: RodParameters,
    grid: Grid,
    data: InitialData,
    dt: float,
    n_steps: int,
    constrained: bool = True,
) -> Iterator[tuple[int, np.ndarray, np.ndarray, float, float]]:
    """Yield ``(j, prev, curr, c1_max, c2_max)`` for ``j = 1 .. n_steps``.

    ``prev`` and ``curr`` are the ``(3, N)`` levels ``j-1`` and ``j``.  The
    first item comes from the bootstrap; the constraint residuals of the
    free stepper are reported as well, which makes the two steppers
    distinguishable in the output.
    """
    kern = Kernel(params, grid, dt)
    q0 = data.positions()
    prev, curr = virtual_level(kern, q0, data.velocities(), constrained), q0
    for j in range(1, n_steps + 1):
        # blow-up is reported below as NumericalAbort
        with np.errstate(over="ignore", invalid="ignore"):
            if constrained:
                nxt, _, _, c1, c2 = kern.constrained(prev, curr)
            else:
                nxt = kern.predict(prev, curr)
                c1, c2 = kern.residuals(prev, curr, nxt)
        bad = ~np.isfinite(nxt)
        if bad.any():
            raise NumericalAbort(j, FIELDS[int(np.argmax(bad.any(axis=1)))])
        prev, curr = curr, nxt
        yield j, prev, curr, float(np.max(np.abs(c1))), float(np.max(np.abs(c2)))


def simulate(config: RunConfig, keep_levels: bool = False):
    """Run ``config`` in memory; returns ``(records, levels)``.

    ``levels`` maps step index to the ``(3, N)`` field array and holds the
    snapshot steps (every level when ``keep_levels``).
    """
    records: list[DiagnosticsRecord] = []
    levels: dict[int, np.ndarray] = {}
    for rec, j, curr in _run_iter(config):
        if rec is not None:
            records.append(rec)
        if keep_levels or j % config.snap_every == 0:
            levels[j] = curr
    return records, levels


def _run_iter(config: RunConfig):
    params, grid = config.params, config.grid
    dt = config.time_step(grid)
    if dt > stability_limit(params, grid):
        warnings.warn(
            f"dt = {dt:.6g} exceeds the explicit beam limit {stability_limit(params, grid):.6g}",
            StabilityWarning,
            stacklevel=3,
        )
    try:
        data = make_initial(config.preset, params, grid, config.initial_file)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"initial data: {exc}") from None
    n_steps = n_steps_for(config.t_end, dt)
    yield None, 0, data.positions()
    for j, prev, curr, c1, c2 in integrate(params, grid, data, dt, n_steps, config.constrained):
        yield make_record(j, prev, curr, dt, params, grid, c1, c2), j, curr


def _fmt(v) -> str:
    return str(v) if isinstance(v, (int, np.integer)) else f"{v:.17g}"


def write_snapshot(fh, step: int, t: float, q: np.ndarray, grid: Grid, first: bool):
    if not first:
        fh.write("\n")
    fh.write(f"step,t\n{step},{_fmt(t)}\ni,s,x,y,theta\n")
    for i, s in enumerate(grid.s):
        fh.write(f"{i},{_fmt(s)},{_fmt(q[0, i])},{_fmt(q[1, i])},{_fmt(q[2, i])}\n")


@dataclass
class RunSummary:
    n_steps: int
    n_snapshots: int
    last: DiagnosticsRecord


def run(config: RunConfig) -> RunSummary:
    """Execute a run and stream diagnostics and snapshots to the configured files.

    Diagnostics get one row per step (``ceil(t_end / h)`` rows).  Snapshots
    are written for level 0 and every ``snap_every`` steps after it.
    """
    grid = config.grid
    dt = config.time_step(grid)
    diag = open(config.diag_path, "w", newline="") if config.diag_path else None
    snap = open(config.snap_path, "w", newline="") if config.snap_path else None
    n_snap = 0
    last = None
    try:
        if diag:
            diag.write(",".join(DiagnosticsRecord.columns()) + "\n")
        for rec, j, curr in _run_iter(config):
            if rec is not None:
                last = rec
                if diag:
                    diag.write(",".join(_fmt(v) for v in rec.values()) + "\n")
            if j % config.snap_every == 0:
                if snap:
                    write_snapshot(snap, j, j * dt, curr, grid, first=n_snap == 0)
                n_snap += 1
    finally:
        for fh in (diag, snap):
            if fh:
                fh.close()
    return RunSummary(n_steps=last.step, n_snapshots=n_snap, last=last)


def read_diagnostics(path) -> np.ndarray:
    """Structured array with the diagnostics columns."""
    return np.genfromtxt(Path(path), delimiter=",", names=True, dtype=float)


def read_snapshots(path) -> list[tuple[int, float, np.ndarray]]:
    """List of ``(step, t, table)`` with ``table`` columns ``i, s, x, y, theta``."""
    out = []
    for block in Path(path).read_text().strip().split("\n\n"):
        lines = block.strip().splitlines()
        step, t = lines[1].split(",")
        table = np.array([[float(v) for v in ln.split(",")] for ln in lines[3:]])
        out.append((int(step), float(t), table))
    return out


@dataclass(frozen=True)
class ConvergenceRow:
    n_nodes: int
    dt: float
    error: float
    order: float | None


def convergence(config: RunConfig, levels) -> list[ConvergenceRow]:
    """Refinement study of the ``theta_wave`` preset against its exact solution.

    Each level keeps ``h / k**2`` fixed.  The error is the L-infinity norm
    of the twist angle at the first step on or after ``t_end``; the order is
    ``log(e_prev / e) / log(k_prev / k)``.
    """
    if config.preset != "theta_wave":
        raise ConfigError(f"preset: convergence needs an exact solution; {config.preset!r} has none")
    if config.constrained and config.params.radius != 0:
        raise ConfigError("radius: the standing wave is exact only for R = 0 or an unconstrained rod")
    levels = [int(n) for n in levels]
    if not levels:
        raise ConfigError("levels: need at least one refinement level")
    base = config.grid
    ratio = config.time_step(base) / base.spacing**2
    rows: list[ConvergenceRow] = []
    prev_err = prev_k = None
    for n in levels:
        cfg = replace(config, n_nodes=n, dt=None, dt_factor=ratio)
        grid = cfg.grid
        dt = cfg.time_step(grid)
        data = make_initial("theta_wave", cfg.params, grid)
        n_steps = n_steps_for(cfg.t_end, dt)
        for j, _, curr, _, _ in integrate(cfg.params, grid, data, dt, n_steps, cfg.constrained):
            pass
        exact = theta_wave_solution(cfg.params, grid, j * dt)
        err = float(np.max(np.abs(curr[2] - exact)))
        order = None
        if prev_err is not None:
            order = math.log(prev_err / err) / math.log(prev_k / grid.spacing)
        rows.append(ConvergenceRow(n, dt, err, order))
        prev_err, prev_k = err, grid.spacing
    return rows
