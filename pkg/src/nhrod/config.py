"""Run configuration: a flat ``key = value`` text file.

Blank lines and ``#`` comments are ignored.  Relative paths are resolved
against the directory of the configuration file.  Example::

    # reproduction run
    preset = paper
    n_nodes = 32
    bc = free
    dt_factor = 0.125      # h = dt_factor * k**2
    t_end = 150
    constrained = true
    diag_path = reference_diag.csv
    snap_path = reference_snap.csv
    snap_every = 2162
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import BC, Grid, RodParameters
from .presets import PRESETS

KEYS = (
    "rho", "alpha", "beta", "bend_k", "radius", "length",
    "n_nodes", "bc", "dt", "dt_factor", "t_end", "preset", "initial_file",
    "constrained", "diag_path", "snap_path", "snap_every",
)


class ConfigError(ValueError):
    """Unparseable or inconsistent configuration."""


@dataclass(frozen=True)
class RunConfig:
    params: RodParameters
    n_nodes: int = 32
    bc: BC = BC.FREE
    t_end: float = 1.0
    dt: float | None = None
    dt_factor: float | None = 0.125
    preset: str = "paper"
    initial_file: Path | None = None
    constrained: bool = True
    diag_path: Path | None = None
    snap_path: Path | None = None
    snap_every: int = 100

    def __post_init__(self):
        if not self.t_end > 0:
            raise ConfigError("t_end: must be positive")
        if self.snap_every < 1:
            raise ConfigError("snap_every: must be at least 1")
        if self.preset not in PRESETS:
            raise ConfigError(f"preset: unknown preset {self.preset!r}")
        if (self.dt is None) == (self.dt_factor is None):
            raise ConfigError("dt / dt_factor: give exactly one of them")
        step = self.dt if self.dt is not None else self.dt_factor
        if not step > 0:
            raise ConfigError("dt / dt_factor: must be positive")
        if self.preset == "custom" and self.initial_file is None:
            raise ConfigError("initial_file: required by preset 'custom'")

    @property
    def grid(self) -> Grid:
        return Grid.for_rod(self.params, self.n_nodes, self.bc)

    def time_step(self, grid: Grid | None = None) -> float:
        grid = grid or self.grid
        if self.dt is not None:
            return float(self.dt)
        return self.dt_factor * grid.spacing**2


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


_FLOAT = {"rho", "alpha", "beta", "bend_k", "radius", "length", "dt", "dt_factor", "t_end"}
_INT = {"n_nodes", "snap_every"}
_PATH = {"initial_file", "diag_path", "snap_path"}


def parse_config(text: str, base_dir: Path | str = ".") -> RunConfig:
    base_dir = Path(base_dir)
    values: dict = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _FLOAT:
                values[key] = float(val)
            elif key in _INT:
                values[key] = int(val)
            elif key in _PATH:
                values[key] = base_dir / val
            elif key == "constrained":
                values[key] = _bool(val)
            elif key == "bc":
                values[key] = BC(val.lower())
            else:
                values[key] = val
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: field {key}: {exc}") from None
        lines[key] = lineno

    param_keys = ("rho", "alpha", "beta", "bend_k", "radius", "length")
    try:
        params = RodParameters(**{k: values.pop(k) for k in param_keys if k in values})
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "t_end" not in values:
        raise ConfigError("t_end: required")
    if "dt" in values and "dt_factor" not in values:
        values["dt_factor"] = None
    try:
        return RunConfig(params=params, **values)
    except ConfigError as exc:
        field = str(exc).split(":", 1)[0]
        where = f"line {lines[field]}: " if field in lines else ""
        raise ConfigError(f"{where}{exc}") from None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, path.parent)
