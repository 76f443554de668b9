"""Spatial grid and solution containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import ModelManifold, Shell, area_factor, shell_volume

__all__ = ["RadialGrid", "Field", "Trace"]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class RadialGrid:
    """Uniform cell-centred grid on ``[r_inner, r_outer]`` of a model manifold.

    Cell measures include the unit-sphere factor, so ``measures.sum()`` is
    the Riemannian volume of the annulus ``r_inner <= r_x < r_outer``.
    """

    def __init__(self, manifold: ModelManifold, r_outer: float, cells: int, r_inner: float | None = None):
        if r_inner is None:
            r_inner = manifold.r0
        if cells < 16:
            raise DomainError(f"need at least 16 cells, got {cells}")
        if not r_outer > r_inner >= 0:
            raise DomainError(f"need 0 <= r_inner < r_outer, got {r_inner}, {r_outer}")
        if r_inner < manifold.r0:
            raise DomainError(f"r_inner = {r_inner} lies inside the excluded ball r < {manifold.r0}")
        self.manifold = manifold
        self.r_inner = float(r_inner)
        self.r_outer = float(r_outer)
        self.cells = int(cells)
        faces = np.linspace(self.r_inner, self.r_outer, self.cells + 1)
        self.faces = _frozen(faces)
        self.dr = (self.r_outer - self.r_inner) / self.cells
        self.centers = _frozen(0.5 * (faces[1:] + faces[:-1]))
        self.measures = _frozen(np.asarray(shell_volume(manifold, faces[:-1], faces[1:]), dtype=float))
        # omega * S at interior faces; boundary faces carry no flux
        self.face_areas = _frozen(manifold.omega * np.asarray(area_factor(manifold, faces[1:-1]), dtype=float))
        if np.any(self.measures <= 0):
            raise DomainError("non-positive cell measure")

    def __repr__(self):
        return (f"RadialGrid({self.manifold!r}, r_inner={self.r_inner}, "
                f"r_outer={self.r_outer}, cells={self.cells})")

    @property
    def total_measure(self) -> float:
        return float(self.measures.sum())

    def overlap_fractions(self, shell: Shell) -> np.ndarray:
        """Fraction of each cell's measure lying inside ``shell``."""
        lo = np.clip(shell.lo, self.faces[:-1], self.faces[1:])
        hi = np.clip(shell.hi, self.faces[:-1], self.faces[1:])
        part = np.where(hi > lo, shell_volume(self.manifold, lo, hi), 0.0)
        return np.clip(part / self.measures, 0.0, 1.0)

    def cells_in(self, lo: float, hi: float) -> np.ndarray:
        """Indices of cells whose centres lie in the closed interval ``[lo, hi]``."""
        return np.flatnonzero((self.centers >= lo) & (self.centers <= hi))


@dataclass(frozen=True)
class Field:
    """Cell values of ``u`` at one time."""

    values: np.ndarray
    t: float

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise DomainError("field values must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise DomainError("field values must be finite")
        if np.any(v < 0):
            raise DomainError("field values must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "t", float(self.t))


@dataclass
class Trace:
    """Snapshots ``values[k]`` of ``u`` at ``times[k]`` on a fixed grid.

    ``meta`` holds solver bookkeeping: cfl factor, step count, clip count,
    time-step history and abort status.
    """

    grid: RadialGrid
    times: np.ndarray
    values: np.ndarray
    p: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.times.size, self.grid.cells):
            raise DomainError(f"values shape {self.values.shape} does not match "
                              f"({self.times.size}, {self.grid.cells})")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("snapshot times must be strictly increasing")

    def __len__(self):
        return self.times.size

    @property
    def aborted(self) -> bool:
        return bool(self.meta.get("aborted", False))

    @property
    def t_initial(self) -> float:
        return float(self.times[0])

    def index(self, t: float) -> int:
        """Index of the snapshot at time ``t`` (relative tolerance 1e-12)."""
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 1e-12 * max(1.0, abs(t)):
            raise DomainError(f"no snapshot at t = {t}")
        return k

    def field(self, k: int) -> Field:
        return Field(self.values[k], self.times[k])

    def at(self, t: float) -> np.ndarray:
        return self.values[self.index(t)]

    def select(self, t_lo: float = -np.inf, t_hi: float = np.inf) -> np.ndarray:
        """Indices of snapshots with ``t_lo <= t <= t_hi``."""
        return np.flatnonzero((self.times >= t_lo) & (self.times <= t_hi))
