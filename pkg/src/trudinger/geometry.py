"""Rotationally symmetric model manifolds.

A model manifold is ``(0, inf) x S^{n-1}`` with metric ``dr^2 + psi(r)^2 dtheta^2``.
Everything radial only needs the area factor ``S(r) = psi(r)^{n-1}``; the
Riemannian measure of a radial shell is ``omega_{n-1} * int S(r) dr`` where
``omega_{n-1}`` is the area of the unit sphere ``S^{n-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedOperation

__all__ = [
    "ModelManifold",
    "Region",
    "Shell",
    "sphere_area",
    "area_factor",
    "shell_volume",
    "ball_volume_at_pole",
    "off_pole_ball_volume_euclidean",
    "ball_volume",
    "doubling_ratio",
]


def sphere_area(n: int) -> float:
    """Area of the unit sphere ``S^{n-1}`` in ``R^n``: ``2 pi^{n/2} / Gamma(n/2)``.

    ``n = 1`` gives 2 (the two endpoints of ``[-1, 1]``), so radial integrals
    on the half line reproduce integrals over the whole real line.
    """
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True, eq=False)
class ModelManifold:
    """Model manifold given by its dimension and area factor.

    Use the constructors :meth:`euclidean`, :meth:`polynomial` and
    :meth:`custom` rather than the raw initialiser.
    """

    n: int
    kind: str = "euclidean"
    C: float = 1.0
    alpha: float | None = None
    r0: float = 0.0
    table_r: np.ndarray | None = field(default=None, repr=False)
    table_S: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.n}")
        if self.kind == "euclidean":
            object.__setattr__(self, "alpha", float(self.n))
        elif self.kind == "polynomial":
            if self.alpha is None or not (0.0 < self.alpha <= self.n):
                raise DomainError(f"polynomial profile needs 0 < alpha <= n, got alpha={self.alpha}")
            if self.C <= 0:
                raise DomainError(f"polynomial profile needs C > 0, got {self.C}")
            if self.r0 < 0:
                raise DomainError(f"inner radius must be >= 0, got {self.r0}")
        elif self.kind == "custom":
            r = np.asarray(self.table_r, dtype=float)
            S = np.asarray(self.table_S, dtype=float)
            if r.ndim != 1 or r.shape != S.shape or r.size < 2:
                raise DomainError("custom profile needs matching 1-d tables with >= 2 nodes")
            if np.any(np.diff(r) <= 0):
                raise DomainError("custom profile radii must be strictly increasing")
            if r[0] < 0 or np.any(S[r > 0] <= 0) or np.any(S < 0):
                raise DomainError("custom profile must have S(r) > 0 for r > 0")
            r.setflags(write=False)
            S.setflags(write=False)
            object.__setattr__(self, "table_r", r)
            object.__setattr__(self, "table_S", S)
            object.__setattr__(self, "r0", float(r[0]))
        else:
            raise DomainError(f"unknown profile kind {self.kind!r}")

    @classmethod
    def euclidean(cls, n: int) -> "ModelManifold":
        return cls(n=n, kind="euclidean")

    @classmethod
    def polynomial(cls, n: int, alpha: float, C: float = 1.0, r0: float = 0.0) -> "ModelManifold":
        """Profile ``S(r) = C r^{alpha-1}`` for ``r > r0``."""
        return cls(n=n, kind="polynomial", C=float(C), alpha=float(alpha), r0=float(r0))

    @classmethod
    def custom(cls, n: int, r, S) -> "ModelManifold":
        """Tabulated profile, linearly interpolated between nodes."""
        return cls(n=n, kind="custom", table_r=np.array(r, dtype=float), table_S=np.array(S, dtype=float))

    @property
    def omega(self) -> float:
        return sphere_area(self.n)

    @property
    def is_euclidean(self) -> bool:
        return self.kind == "euclidean"

    @property
    def volume_exponent(self) -> float:
        """Growth exponent of pole-centred ball volumes (``n`` or ``alpha``)."""
        if self.kind == "custom":
            raise UnsupportedOperation("custom profiles have no volume growth exponent")
        return float(self.alpha)

    def radial_extent(self) -> tuple[float, float]:
        """Range of radii on which the profile is defined."""
        if self.kind == "custom":
            return float(self.table_r[0]), float(self.table_r[-1])
        return self.r0, math.inf


def area_factor(m: ModelManifold, r):
    """Area factor ``S(r)``; accepts scalars or arrays."""
    r_arr = np.asarray(r, dtype=float)
    if m.kind == "euclidean":
        if np.any(r_arr < 0):
            raise DomainError("radius must be non-negative")
        out = r_arr ** (m.n - 1) if m.n > 1 else np.ones_like(r_arr)
    elif m.kind == "polynomial":
        if np.any(r_arr <= m.r0):
            raise DomainError(f"polynomial profile is defined for r > r0 = {m.r0}")
        out = m.C * r_arr ** (m.alpha - 1.0)
    else:
        lo, hi = m.radial_extent()
        if np.any(r_arr < lo) or np.any(r_arr > hi):
            raise DomainError(f"radius outside tabulated range [{lo}, {hi}]")
        out = np.interp(r_arr, m.table_r, m.table_S)
    return float(out) if np.ndim(out) == 0 else out


def _profile_primitive(m: ModelManifold, r):
    """``int_{base}^r S`` with base 0 for closed-form profiles, first node for tables."""
    r_arr = np.asarray(r, dtype=float)
    if m.kind == "euclidean":
        if np.any(r_arr < 0):
            raise DomainError("radius must be non-negative")
        return r_arr ** m.n / m.n
    if m.kind == "polynomial":
        # the power law is continued down to the pole for volume bookkeeping
        if np.any(r_arr < 0):
            raise DomainError("radius must be non-negative")
        return m.C * r_arr ** m.alpha / m.alpha
    # piecewise-linear S integrates exactly with the trapezoid rule on its nodes
    tr, tS = m.table_r, m.table_S
    if np.any(r_arr < tr[0]) or np.any(r_arr > tr[-1]):
        raise DomainError(f"radius outside tabulated range [{tr[0]}, {tr[-1]}]")
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (tS[1:] + tS[:-1]) * np.diff(tr))))
    idx = np.clip(np.searchsorted(tr, r_arr, side="right") - 1, 0, tr.size - 2)
    h = r_arr - tr[idx]
    slope = (tS[idx + 1] - tS[idx]) / (tr[idx + 1] - tr[idx])
    return cum[idx] + tS[idx] * h + 0.5 * slope * h * h


def shell_volume(m: ModelManifold, r_lo, r_hi):
    """Measure of ``{r_lo <= r_x < r_hi}`` (vectorised)."""
    out = m.omega * (_profile_primitive(m, r_hi) - _profile_primitive(m, r_lo))
    return float(out) if np.ndim(out) == 0 else out


def ball_volume_at_pole(m: ModelManifold, r: float) -> float:
    """``mu(B(o, r))`` for the pole ``o``."""
    if r <= 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    return float(m.omega * _profile_primitive(m, r))


def off_pole_ball_volume_euclidean(m, center_radius: float, r: float) -> float:
    """Exact Euclidean ball volume ``omega_{n-1} r^n / n``, any centre.

    ``m`` is either a dimension or a :class:`ModelManifold`; non-Euclidean
    models are rejected because off-pole geodesic balls have no closed form there.
    """
    if isinstance(m, ModelManifold):
        if not m.is_euclidean:
            raise UnsupportedOperation("off-pole ball volumes are only available on Euclidean models")
        n = m.n
    else:
        n = int(m)
    if center_radius < 0:
        raise DomainError("centre radius must be non-negative")
    if r <= 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    return sphere_area(n) * r**n / n


def ball_volume(m: ModelManifold, center_radius: float, r: float) -> float:
    """Ball volume for pole-centred balls on any model, or any ball on ``R^n``."""
    if m.is_euclidean:
        return off_pole_ball_volume_euclidean(m, center_radius, r)
    if center_radius != 0:
        raise UnsupportedOperation("off-pole balls are only supported on Euclidean models")
    return ball_volume_at_pole(m, r)


def doubling_ratio(m: ModelManifold, r_small: float, r_big: float) -> float:
    """``mu(B(o, r_big)) / mu(B(o, r_small))``."""
    if not (0 < r_small <= r_big):
        raise DomainError(f"need 0 < r_small <= r_big, got {r_small}, {r_big}")
    if r_small == r_big:
        return 1.0
    return ball_volume_at_pole(m, r_big) / ball_volume_at_pole(m, r_small)


class Shell(tuple):
    """Radial set ``{lo <= r_x < hi}``; ``hi`` may be ``inf``."""

    __slots__ = ()

    def __new__(cls, lo: float, hi: float = math.inf):
        if hi < lo:
            raise DomainError(f"empty shell [{lo}, {hi})")
        return super().__new__(cls, (float(lo), float(hi)))

    @property
    def lo(self) -> float:
        return self[0]

    @property
    def hi(self) -> float:
        return self[1]

    def __repr__(self):
        return f"Shell({self.lo!r}, {self.hi!r})"


@dataclass(frozen=True)
class Region:
    """Centred ball ``A = B(o, a)`` together with a neighbourhood width ``rho``.

    ``A_rho = {d(x, A) < rho} = B(o, a + rho)`` and its complement is
    ``{r_x >= a + rho}``.
    """

    a: float
    rho: float = 0.0

    def __post_init__(self):
        if self.a < 0 or self.rho < 0:
            raise DomainError(f"need a >= 0 and rho >= 0, got a={self.a}, rho={self.rho}")

    def with_rho(self, rho: float) -> "Region":
        return Region(self.a, rho)

    @property
    def inner(self) -> Shell:
        return Shell(0.0, self.a)

    @property
    def complement(self) -> Shell:
        return Shell(self.a)

    @property
    def neighborhood(self) -> Shell:
        return Shell(0.0, self.a + self.rho)

    @property
    def neighborhood_complement(self) -> Shell:
        return Shell(self.a + self.rho)

    def dist_to_set(self, r):
        """``d(x, A)`` for points at polar radius ``r``."""
        return np.maximum(0.0, np.asarray(r, dtype=float) - self.a)

    def dist_to_neighborhood_complement(self, r):
        """``d(x, A_rho^c) = max(0, a + rho - r_x)``."""
        return np.maximum(0.0, self.a + self.rho - np.asarray(r, dtype=float))
