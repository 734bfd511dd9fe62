"""Rod parameters, grids, field storage and finite-difference stencils.

Every stencil works on a ghost-extended copy of the node values: two
virtual nodes are appended on each side according to the boundary mode,
so the same interior formula applies at every node.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "BC",
    "GhostKind",
    "RodParameters",
    "Grid",
    "FieldLevel",
    "StatePair",
    "InitialData",
    "REFERENCE_PARAMETERS",
    "ghost_value",
    "extend",
    "diff1_central",
    "diff1_forward",
    "diff2",
    "diff4",
    "d1_central",
    "d1_forward",
    "delta2",
    "delta4",
]

NGHOST = 2


class BC(enum.Enum):
    FREE = "free"
    PERIODIC = "periodic"


class GhostKind(enum.Enum):
    """How virtual nodes outside ``0..N-1`` are filled."""

    CENTERLINE_FREE = "centerline_free"
    TORSION_FREE = "torsion_free"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class RodParameters:
    rho: float = 1.0
    alpha: float = 1.0
    beta: float = 0.8
    bend_k: float = 0.7
    radius: float = 1.0
    length: float = 4.0

    def __post_init__(self):
        for name in ("rho", "alpha", "length"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v!r}")
        for name in ("beta", "bend_k", "radius"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be non-negative, got {v!r}")

    def with_(self, **changes) -> RodParameters:
        return replace(self, **changes)


#: alpha=1, beta=0.8, rho=1, K=0.7, l=4, R=1
REFERENCE_PARAMETERS = RodParameters()


@dataclass(frozen=True)
class Grid:
    """Uniform spatial mesh on ``[0, length]``.

    Free ends place nodes on both endpoints (``k = l/(N-1)``); a periodic
    rod has ``N`` distinct nodes with ``k = l/N``.
    """

    n_nodes: int
    length: float
    bc: BC = BC.FREE

    def __post_init__(self):
        object.__setattr__(self, "bc", BC(self.bc))
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 5:
            raise ValueError(f"n_nodes must be an integer >= 5, got {self.n_nodes!r}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length!r}")

    @classmethod
    def for_rod(cls, params: RodParameters, n_nodes: int, bc: BC | str = BC.FREE) -> Grid:
        return cls(int(n_nodes), params.length, BC(bc))

    @property
    def spacing(self) -> float:
        if self.bc is BC.PERIODIC:
            return self.length / self.n_nodes
        return self.length / (self.n_nodes - 1)

    k = spacing

    @property
    def s(self) -> np.ndarray:
        """Arclength coordinate of every node."""
        return np.arange(self.n_nodes) * self.spacing

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights: trapezoidal for free ends, rectangle for periodic."""
        w = np.full(self.n_nodes, self.spacing)
        if self.bc is BC.FREE:
            w[0] *= 0.5
            w[-1] *= 0.5
        return w

    def centerline_kind(self) -> GhostKind:
        return GhostKind.PERIODIC if self.bc is BC.PERIODIC else GhostKind.CENTERLINE_FREE

    def torsion_kind(self) -> GhostKind:
        return GhostKind.PERIODIC if self.bc is BC.PERIODIC else GhostKind.TORSION_FREE


def _as_nodes(values, name: str, n: int | None = None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has {arr.shape[0]} entries, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FieldLevel:
    """The fields ``x``, ``y`` and ``theta`` at all nodes at one time index."""

    time_index: int
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        x = _as_nodes(self.x, "x")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", _as_nodes(self.y, "y", x.size))
        object.__setattr__(self, "theta", _as_nodes(self.theta, "theta", x.size))

    @property
    def n_nodes(self) -> int:
        return self.x.size

    def as_array(self) -> np.ndarray:
        """Stack as a ``(3, N)`` array in the order x, y, theta."""
        return np.stack([self.x, self.y, self.theta])

    @classmethod
    def from_array(cls, time_index: int, arr) -> FieldLevel:
        return cls(time_index, arr[0], arr[1], arr[2])

    def same_values(self, other: FieldLevel) -> bool:
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.theta, other.theta)
        )


@dataclass(frozen=True)
class StatePair:
    """Two consecutive levels ``n-1`` and ``n``: the full state of the scheme."""

    prev: FieldLevel
    curr: FieldLevel
    dt: float

    def __post_init__(self):
        if self.prev.time_index + 1 != self.curr.time_index:
            raise ValueError("levels of a StatePair must be consecutive")
        if self.prev.n_nodes != self.curr.n_nodes:
            raise ValueError("levels of a StatePair must have the same size")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")

    @property
    def time(self) -> float:
        return self.curr.time_index * self.dt

    def advance(self, nxt: FieldLevel) -> StatePair:
        return StatePair(self.curr, nxt, self.dt)


@dataclass(frozen=True)
class InitialData:
    x0: np.ndarray
    y0: np.ndarray
    theta0: np.ndarray
    vx0: np.ndarray = field(default=None)
    vy0: np.ndarray = field(default=None)
    vtheta0: np.ndarray = field(default=None)

    def __post_init__(self):
        x0 = _as_nodes(self.x0, "x0")
        n = x0.size
        object.__setattr__(self, "x0", x0)
        for name in ("y0", "theta0"):
            object.__setattr__(self, name, _as_nodes(getattr(self, name), name, n))
        for name in ("vx0", "vy0", "vtheta0"):
            v = getattr(self, name)
            object.__setattr__(self, name, _as_nodes(np.zeros(n) if v is None else v, name, n))

    @property
    def n_nodes(self) -> int:
        return self.x0.size

    def positions(self) -> np.ndarray:
        return np.stack([self.x0, self.y0, self.theta0])

    def velocities(self) -> np.ndarray:
        return np.stack([self.vx0, self.vy0, self.vtheta0])


# ---------------------------------------------------------------- ghosts


def ghost_value(f, virtual_index: int, grid: Grid, kind: GhostKind) -> float:
    """Value of ``f`` at a virtual node just outside the grid.

    ``virtual_index`` must be one of ``-2, -1, N, N+1``.
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    if virtual_index not in (-2, -1, n, n + 1):
        raise IndexError(f"virtual_index must be -2, -1, {n} or {n + 1}; got {virtual_index}")
    return extend(f, GhostKind(kind))[..., virtual_index + NGHOST]


def extend(f, kind: GhostKind) -> np.ndarray:
    """Append two ghost nodes on each side of the last axis of ``f``.

    ``CENTERLINE_FREE`` imposes ``f'' = 0`` and a vanishing centred ``f'''``
    at both ends; ``TORSION_FREE`` reflects about the end node (``f' = 0``).
    """
    f = np.asarray(f, dtype=float)
    if kind is GhostKind.PERIODIC:
        return np.concatenate([f[..., -2:], f, f[..., :2]], axis=-1)
    out = np.empty(f.shape[:-1] + (f.shape[-1] + 2 * NGHOST,))
    out[..., NGHOST:-NGHOST] = f
    if kind is GhostKind.CENTERLINE_FREE:
        f0, f1, f2 = f[..., 0], f[..., 1], f[..., 2]
        g0, g1, g2 = f[..., -1], f[..., -2], f[..., -3]
        # 2 f0 - f1 and f2 - 4 f1 + 4 f0, written to be exact on constants
        out[..., 1] = f0 + (f0 - f1)
        out[..., 0] = f2 + 4.0 * (f0 - f1)
        out[..., -2] = g0 + (g0 - g1)
        out[..., -1] = g2 + 4.0 * (g0 - g1)
    elif kind is GhostKind.TORSION_FREE:
        out[..., 1] = f[..., 1]
        out[..., 0] = f[..., 2]
        out[..., -2] = f[..., -2]
        out[..., -1] = f[..., -3]
    else:
        raise ValueError(f"unknown ghost kind {kind!r}")
    return out


# ---------------------------------------------------------------- stencils
# Whole-array forms take the ghost-extended array and return N values.


def d1_central(ext: np.ndarray) -> np.ndarray:
    """``f[i+1] - f[i-1]`` at every node (not divided by ``2k``)."""
    return ext[..., 3:-1] - ext[..., 1:-3]


def d1_forward(ext: np.ndarray) -> np.ndarray:
    return ext[..., 3:-1] - ext[..., 2:-2]


def delta2(ext: np.ndarray) -> np.ndarray:
    # iterated differences: exactly zero on constant data
    return np.diff(ext[..., 1:-1], n=2, axis=-1)


def delta4(ext: np.ndarray) -> np.ndarray:
    """``f[i+2] - 4 f[i+1] + 6 f[i] - 4 f[i-1] + f[i-2]`` as a fourth difference."""
    return np.diff(ext, n=4, axis=-1)


def _pointwise(stencil, f, i, grid, kind):
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    if not 0 <= i < n:
        raise IndexError(f"node index {i} outside 0..{n - 1}")
    if kind is None:
        kind = grid.centerline_kind()
    return float(stencil(extend(f, GhostKind(kind)))[i])


def diff1_central(f, i: int, grid: Grid, kind: GhostKind | None = None) -> float:
    """Centred first derivative ``(f[i+1] - f[i-1]) / 2k``."""
    return _pointwise(d1_central, f, i, grid, kind) / (2.0 * grid.spacing)


def diff1_forward(f, i: int, grid: Grid, kind: GhostKind | None = None) -> float:
    """Forward first derivative ``(f[i+1] - f[i]) / k``; used for ``theta'``."""
    if kind is None:
        kind = grid.torsion_kind()
    return _pointwise(d1_forward, f, i, grid, kind) / grid.spacing


def diff2(f, i: int, grid: Grid, kind: GhostKind | None = None) -> float:
    return _pointwise(delta2, f, i, grid, kind) / grid.spacing**2


def diff4(f, i: int, grid: Grid, kind: GhostKind | None = None) -> float:
    return _pointwise(delta4, f, i, grid, kind) / grid.spacing**4
