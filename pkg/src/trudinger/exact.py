"""Self-similar reference solutions.

On ``R^n`` the Barenblatt solution

    u(r, t) = t^{-n/p} exp(-zeta (r / t^{1/p})^{p/(p-1)}),   zeta = (p-1)^2 p^{-p/(p-1)}

solves ``u_t = Delta_p(u^{1/(p-1)})``. The same formula with ``n`` replaced by
``alpha`` solves the radial equation on a model manifold with profile
``S(r) = C r^{alpha-1}``. Both are represented by :class:`ExactSolution`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import zeta_barenblatt
from .errors import DomainError
from .fields import Field, RadialGrid, Trace
from .geometry import ModelManifold, area_factor

__all__ = [
    "ExactSolution",
    "self_similar_profile_ode_residual",
    "pde_residual",
    "residual_order",
    "weighted_mass",
    "lambda_integral",
    "lambda_norm_log_derivative",
    "sample",
    "sample_trace",
    "tail_radius",
]


@dataclass(frozen=True)
class ExactSolution:
    """``u(r, t) = t^{-alpha/p} f(r t^{-1/p})`` with ``f(s) = exp(-zeta s^{p/(p-1)})``."""

    p: float
    alpha: float
    n: int
    kind: str = "barenblatt"

    def __post_init__(self):
        if not self.p > 1:
            raise DomainError(f"p must be > 1, got {self.p}")
        if not (0 < self.alpha <= self.n):
            raise DomainError(f"need 0 < alpha <= n, got alpha={self.alpha}, n={self.n}")

    @classmethod
    def barenblatt(cls, p: float, n: int) -> "ExactSolution":
        return cls(p=float(p), alpha=float(n), n=int(n), kind="barenblatt")

    @classmethod
    def polynomial_model(cls, p: float, alpha: float, n: int | None = None) -> "ExactSolution":
        if n is None:
            n = max(1, math.ceil(alpha))
        return cls(p=float(p), alpha=float(alpha), n=int(n), kind="polynomial")

    @property
    def zeta(self) -> float:
        return zeta_barenblatt(self.p)

    @property
    def beta(self) -> float:
        """Exponent ``p/(p-1)`` of the similarity variable inside the exponential."""
        return self.p / (self.p - 1.0)

    @property
    def time_exponent(self) -> float:
        """``a`` in ``u = t^{-a} f(r t^{b})``."""
        return self.alpha / self.p

    @property
    def space_exponent(self) -> float:
        """``b`` in ``u = t^{-a} f(r t^{b})``."""
        return -1.0 / self.p

    def manifold(self, C: float = 1.0, r0: float = 0.0) -> ModelManifold:
        if self.kind == "barenblatt":
            return ModelManifold.euclidean(self.n)
        return ModelManifold.polynomial(self.n, self.alpha, C=C, r0=r0)

    def profile(self, s, zeta: float | None = None):
        z = self.zeta if zeta is None else zeta
        return np.exp(-z * np.asarray(s, dtype=float) ** self.beta)

    def log_profile_derivative(self, s, zeta: float | None = None):
        """``f'(s) / f(s)``, analytically."""
        z = self.zeta if zeta is None else zeta
        return -z * self.beta * np.asarray(s, dtype=float) ** (1.0 / (self.p - 1.0))

    def evaluate(self, r, t):
        """``u(r, t)``; vectorised over ``r`` (and ``t`` by broadcasting)."""
        t_arr = np.asarray(t, dtype=float)
        r_arr = np.asarray(r, dtype=float)
        if np.any(t_arr <= 0):
            raise DomainError("exact solutions are defined for t > 0")
        if np.any(r_arr < 0):
            raise DomainError("radius must be non-negative")
        s = r_arr * t_arr ** (-1.0 / self.p)
        out = t_arr ** (-self.alpha / self.p) * np.exp(-self.zeta * s**self.beta)
        return float(out) if np.ndim(out) == 0 else out

    __call__ = evaluate


def self_similar_profile_ode_residual(sol: ExactSolution, s: float, zeta: float | None = None) -> float:
    """``f'/f + (p-1)(s/p)^{1/(p-1)}`` for the profile (optionally with a different zeta)."""
    if s <= 0:
        raise DomainError(f"s must be positive, got {s}")
    p = sol.p
    return float(sol.log_profile_derivative(s, zeta) + (p - 1.0) * (s / p) ** (1.0 / (p - 1.0)))


def pde_residual(sol: ExactSolution, m: ModelManifold, r: float, t: float, h: float | None = None) -> float:
    """Centred finite-difference residual of the radial equation.

    Evaluates ``u_t + (1/S) d_r(S (-d_r w)^{p-1})`` with ``w = u^{1/(p-1)}``,
    using step ``h`` in both ``r`` and ``t``. It is ``O(h^2)`` when ``sol``
    solves the equation on ``m``.
    """
    if h is None:
        h = 1e-4 * max(1.0, r)
    if r - 2 * h <= m.r0:
        raise DomainError(f"r = {r} is not interior to (r0 + 2h, inf) with h = {h}")
    if t - h <= 0:
        raise DomainError(f"t = {t} too small for step h = {h}")
    p = sol.p
    q = 1.0 / (p - 1.0)

    def w(rr):
        return sol.evaluate(rr, t) ** q

    def flux(rr):
        dw = (w(rr + h) - w(rr - h)) / (2.0 * h)
        return area_factor(m, rr) * (-dw) ** (p - 1.0)

    u_t = (sol.evaluate(r, t + h) - sol.evaluate(r, t - h)) / (2.0 * h)
    div = (flux(r + h) - flux(r - h)) / (2.0 * h) / area_factor(m, r)
    return float(u_t + div)


def residual_order(sol: ExactSolution, m: ModelManifold, r: float, t: float, h0: float) -> tuple[float, list[float]]:
    """Observed order of :func:`pde_residual` from steps ``h0, h0/2, h0/4``.

    Returns ``(order, residuals)``; the order is ``log2`` of the ratio of
    the last two residual magnitudes.
    """
    res = [pde_residual(sol, m, r, t, h0 / 2**k) for k in range(3)]
    order = math.log2(abs(res[1]) / abs(res[2]))
    return order, res


def tail_radius(p: float, t: float, rel: float = 1e-12) -> float:
    """Radius where the self-similar profile drops to ``rel`` times its peak at time ``t``."""
    z = zeta_barenblatt(p)
    s = (math.log(1.0 / rel) / z) ** ((p - 1.0) / p)
    return s * t ** (1.0 / p)


def weighted_mass(sol: ExactSolution, m: ModelManifold, t: float, r_max: float | None = None) -> float:
    """``omega int_{r0}^{r_max} S u(., t)`` by adaptive quadrature."""
    if r_max is None:
        r_max = tail_radius(sol.p, t, 1e-14)
    lo = m.r0
    val, _ = integrate.quad(
        lambda r: area_factor(m, r) * sol.evaluate(r, t) if r > lo else 0.0,
        lo, r_max, limit=200, epsabs=0.0, epsrel=1e-12,
    )
    return m.omega * val


def lambda_integral(sol: ExactSolution, lam: float, t: float, C: float = 1.0) -> float:
    """Closed form of ``int u^lam dmu`` over the whole model (``r0 = 0``).

    Uses ``int_0^inf s^{alpha-1} exp(-c s^beta) ds = Gamma(alpha/beta) / (beta c^{alpha/beta})``.
    """
    if t <= 0 or lam <= 0:
        raise DomainError("need t > 0 and lam > 0")
    a, beta = sol.alpha, sol.beta
    c = lam * sol.zeta
    radial = math.gamma(a / beta) / (beta * c ** (a / beta))
    omega = ModelManifold.euclidean(sol.n).omega
    return omega * C * radial * t ** (-(lam - 1.0) * a / sol.p)


def lambda_norm_log_derivative(sol: ExactSolution, lam: float, t: float) -> float:
    """``d/dt log ||u(., t)||_lam``; non-positive for every ``lam >= 1``."""
    if t <= 0:
        raise DomainError("t must be positive")
    if math.isinf(lam):
        return -sol.alpha / (sol.p * t)
    return -(lam - 1.0) * sol.alpha / (sol.p * lam * t)


def sample(sol: ExactSolution, grid: RadialGrid, t: float) -> Field:
    """Point values of ``sol`` at the cell centres."""
    return Field(sol.evaluate(grid.centers, t), float(t))


def sample_trace(sol: ExactSolution, grid: RadialGrid, times) -> Trace:
    times = np.asarray(times, dtype=float)
    values = np.stack([sol.evaluate(grid.centers, t) for t in times])
    return Trace(grid=grid, times=times, values=values, p=sol.p, meta={"source": f"exact:{sol.kind}"})
