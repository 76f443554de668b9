"""Evaluate both sides of the estimate chain along traces and exact solutions.

Every check returns :class:`CheckResult` records. Checks whose constants
are only known to exist fit the smallest admissible constant over a sweep
and then test that it is stable, which turns "there is a C" into a
falsifiable statement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .constants import (
    check_lambda,
    epsilon_iteration,
    maximum_principle_coefficient,
    zeta_barenblatt,
    zeta_davies_gaffney,
)
from .errors import ConfigError, DomainError, InsufficientData, PreconditionError, UnsupportedOperation
from .exact import ExactSolution, tail_radius
from .fields import Trace
from .geometry import ModelManifold, Region, Shell, area_factor, ball_volume, shell_volume

__all__ = [
    "CheckResult",
    "WeightFunction",
    "CallableWeight",
    "RegularFunctionSpec",
    "weighted_lp",
    "lambda_norm",
    "check_integral_max_principle",
    "check_norm_monotonicity",
    "davies_gaffney_rhs",
    "check_davies_gaffney",
    "NeighborhoodDecayReport",
    "check_neighborhood_decay",
    "neighborhood_decay_stability",
    "check_lambda_decay",
    "sup_over_ball",
    "EnvelopeReport",
    "check_subgaussian_envelope",
    "sharpness_fit",
    "check_mean_value_scaleinv",
    "mean_value_band",
    "corollary_rho",
]

MONOTONE_TOL = 1e-6
INEQUALITY_TOL = 1e-6
AUDIT_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    """One evaluated inequality ``lhs <= rhs (1 + tol)``."""

    name: str
    t: float
    lhs: float
    rhs: float
    tol: float = INEQUALITY_TOL
    context: dict = field(default_factory=dict, compare=False)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return bool(self.lhs <= self.rhs * (1.0 + self.tol))

    def context_str(self) -> str:
        return ";".join(f"{k}={_fmt(v)}" for k, v in sorted(self.context.items()))

    def sort_key(self):
        return (self.name, self.t, self.context_str())


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


# weights -----------------------------------------------------------------

@dataclass(frozen=True)
class WeightFunction:
    """``xi(r, tau) = -zeta (d(r, A_rho^c) / (s - tau)^{1/p})^{p/(p-1)}`` for ``tau < s``.

    ``region`` is the centred ball ``A`` together with the width ``r`` of
    the neighbourhood (stored as ``region.rho``).
    """

    zeta: float
    region: Region
    s: float
    p: float

    @classmethod
    def davies_gaffney(cls, p: float, lam: float, region: Region, s: float) -> "WeightFunction":
        return cls(zeta_davies_gaffney(p, lam), region, float(s), float(p))

    def evaluate(self, r, tau):
        tau = np.asarray(tau)
        if np.any(np.real(tau) >= self.s):
            raise DomainError(f"weight is defined for tau < s = {self.s}")
        r = np.asarray(r)
        d = self.region.a + self.region.rho - r
        beta = self.p / (self.p - 1.0)
        inside = np.real(d) > 0
        # complex inputs pass through so the derivative audit can use complex steps
        d_safe = np.where(inside, d, 1.0)
        val = -self.zeta * d_safe**beta * (self.s - tau) ** (-1.0 / (self.p - 1.0))
        return np.where(inside, val, 0.0)

    __call__ = evaluate


@dataclass(frozen=True)
class CallableWeight:
    """Arbitrary weight ``fn(r, tau)``; must accept complex arguments for the audit."""

    fn: object

    def evaluate(self, r, tau):
        return self.fn(np.asarray(r), np.asarray(tau))

    __call__ = evaluate


def _complex_step(fn, r, tau, wrt: str, h: float = 1e-30):
    r = np.asarray(r, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    if wrt == "r":
        return np.imag(fn(r + 1j * h, tau)) / h
    return np.imag(fn(r, tau + 1j * h)) / h


def audit_weight(xi, r, times, p: float, lam: float, tol: float = AUDIT_TOL) -> float:
    """Raise :class:`ConfigError` unless ``xi <= 0`` and the Hamilton-Jacobi condition holds.

    The condition is ``d_tau xi + c2 2^{p-1} p^{-p} |d_r xi|^p <= tol`` at
    every node; derivatives use complex steps. Returns the worst residual.
    """
    coef = maximum_principle_coefficient(p, lam)
    worst = -math.inf
    for tau in times:
        vals = np.real(np.asarray(xi.evaluate(np.asarray(r, dtype=float), float(tau)), dtype=complex))
        vals = np.broadcast_to(vals, np.shape(r))
        if np.any(vals > 0) or not np.all(np.isfinite(vals)):
            raise ConfigError(f"weight is positive or non-finite at tau = {tau}")
        dt = _complex_step(xi.evaluate, r, tau, "tau")
        dr = _complex_step(xi.evaluate, r, tau, "r")
        res = dt + coef * np.abs(dr) ** p
        worst = max(worst, float(np.max(res)))
        if worst > tol:
            raise ConfigError(f"weight violates d_tau xi + c |grad xi|^p <= 0 at tau = {tau} "
                              f"(residual {worst:.3g})")
    return worst


@dataclass(frozen=True)
class RegularFunctionSpec:
    """``gamma(t) = t^e / C_gamma`` with growth certificate ``gamma(theta t) <= Theta gamma(t)``."""

    exponent: float
    theta: float = 2.0
    C_gamma: float = 1.0

    def __post_init__(self):
        if not self.theta > 1:
            raise PreconditionError(f"theta must be > 1, got {self.theta}")
        if not self.C_gamma > 0:
            raise PreconditionError(f"C_gamma must be positive, got {self.C_gamma}")

    @property
    def Theta(self) -> float:
        return self.theta**self.exponent

    def __call__(self, t):
        return np.asarray(t, dtype=float) ** self.exponent / self.C_gamma

    def with_constant(self, C_gamma: float) -> "RegularFunctionSpec":
        return RegularFunctionSpec(self.exponent, self.theta, C_gamma)

    def certify(self, decades=(-3.0, 3.0), samples: int = 61) -> bool:
        """Non-decreasing and of polynomial growth on sampled ``t`` over six decades."""
        if self.exponent < 0:
            return False
        t = np.logspace(decades[0], decades[1], samples)
        g = self(t)
        increasing = bool(np.all(np.diff(g) >= 0))
        growth = bool(np.all(self(self.theta * t) <= self.Theta * g * (1 + 1e-12)))
        return increasing and growth


# integrals ---------------------------------------------------------------

def _as_shell(region) -> Shell | None:
    if region is None or isinstance(region, Shell):
        return region
    if isinstance(region, tuple) and len(region) == 2:
        return Shell(*region)
    raise DomainError(f"region must be a Shell, got {region!r}")


def _trace_integral(trace: Trace, values: np.ndarray, lam: float, shell: Shell | None) -> float:
    grid = trace.grid
    weights = grid.measures if shell is None else grid.measures * grid.overlap_fractions(shell)
    if math.isinf(lam):
        mask = weights > 0
        return float(values[mask].max()) if mask.any() else 0.0
    return float(np.dot(weights, values**lam))


def weighted_lp(source, lam: float, region=None, t: float | None = None, manifold: ModelManifold | None = None) -> float:
    """``int_region u^lam dmu`` (``sup`` for ``lam = inf``).

    ``source`` is a :class:`Trace` (cells straddling the region boundary
    contribute in proportion to the overlapping measure) or an
    :class:`ExactSolution` (adaptive quadrature).
    """
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    shell = _as_shell(region)
    if isinstance(source, Trace):
        values = source.values[0] if t is None else source.at(t)
        return _trace_integral(source, values, lam, shell)
    if isinstance(source, ExactSolution):
        if t is None:
            raise DomainError("exact sources need a time")
        m = manifold or source.manifold()
        lo = max(m.r0, 0.0 if shell is None else shell.lo)
        hi = math.inf if shell is None else shell.hi
        if math.isinf(lam):
            return float(source.evaluate(lo, t)) if hi > lo else 0.0
        # beyond this radius u^lam is below 1e-300 of its peak
        cut = tail_radius(source.p, t, 1e-300 ** (1.0 / lam))
        hi = min(hi, cut)
        if hi <= lo:
            return 0.0
        val, _ = integrate.quad(
            lambda r: area_factor(m, r) * source.evaluate(r, t) ** lam if r > m.r0 else 0.0,
            lo, hi, limit=400, epsabs=0.0, epsrel=1e-12,
        )
        return m.omega * val
    raise DomainError(f"unsupported source type {type(source).__name__}")


def lambda_norm(source, lam: float, region=None, t: float | None = None) -> float:
    v = weighted_lp(source, lam, region, t)
    return v if math.isinf(lam) else v ** (1.0 / lam)


# monotonicity ------------------------------------------------------------

def check_norm_monotonicity(trace: Trace, lams, tol: float = MONOTONE_TOL) -> list[CheckResult]:
    """``||u(t_{k+1})||_lam <= ||u(t_k)||_lam (1 + tol)`` for each ``lam``."""
    out = []
    for lam in lams:
        norms = [lambda_norm(trace, lam, t=t) for t in trace.times]
        for k in range(1, len(norms)):
            out.append(CheckResult("lambda_monotone", float(trace.times[k]), norms[k], norms[k - 1], tol,
                                   {"lambda": lam}))
    return out


def check_integral_max_principle(trace: Trace, lam: float, xi, times=None, tol: float = MONOTONE_TOL) -> list[CheckResult]:
    """``J(t) = int u^lam e^xi`` is non-increasing along the trace.

    The weight is audited on the cell centres at every used snapshot first;
    a violation raises :class:`ConfigError` and no check is run.
    """
    check_lambda(trace.p, lam)
    idx = np.arange(len(trace)) if times is None else np.array([trace.index(t) for t in times])
    r = trace.grid.centers
    audit_weight(xi, r, trace.times[idx], trace.p, lam)
    J = []
    for k in idx:
        w = np.real(np.asarray(xi.evaluate(r, float(trace.times[k])), dtype=complex))
        J.append(float(np.dot(trace.grid.measures, trace.values[k] ** lam * np.exp(w))))
    return [
        CheckResult("integral_max_principle", float(trace.times[idx[j]]), J[j], J[j - 1], tol, {"lambda": lam})
        for j in range(1, len(idx))
    ]


# Davies-Gaffney ----------------------------------------------------------

def _elapsed(trace: Trace, t: float) -> float:
    return t - trace.t_initial


def davies_gaffney_rhs(trace: Trace, lam: float, A: Region, r, t: float):
    """``int_{A^c} u0^lam + exp(-zeta (r / t^{1/p})^{p/(p-1)}) int_A u0^lam`` (vectorised in ``r``)."""
    p = trace.p
    zeta = zeta_davies_gaffney(p, lam)
    outside = weighted_lp(trace, lam, A.complement, trace.t_initial)
    inside = weighted_lp(trace, lam, A.inner, trace.t_initial)
    r = np.asarray(r, dtype=float)
    if t <= 0:
        factor = np.where(r > 0, 0.0, 1.0)
    else:
        factor = np.exp(-zeta * (r / t ** (1.0 / p)) ** (p / (p - 1.0)))
    out = outside + factor * inside
    return float(out) if out.ndim == 0 else out


def check_davies_gaffney(
    trace: Trace,
    lam: float,
    A: Region,
    r: float | None = None,
    *,
    ratio: float | None = None,
    times=None,
    tol: float = INEQUALITY_TOL,
) -> list[CheckResult]:
    """``int_{A_r^c} u^lam(t) <= RHS`` with ``t`` measured from the first snapshot.

    Give either a fixed width ``r`` or ``ratio`` so that ``r = ratio t^{1/p}``.
    """
    check_lambda(trace.p, lam)
    if (r is None) == (ratio is None):
        raise DomainError("give exactly one of r and ratio")
    idx = range(len(trace)) if times is None else [trace.index(t) for t in times]
    out = []
    for k in idx:
        t = _elapsed(trace, float(trace.times[k]))
        width = r if r is not None else ratio * t ** (1.0 / trace.p)
        lhs = weighted_lp(trace, lam, A.with_rho(width).neighborhood_complement, float(trace.times[k]))
        rhs = davies_gaffney_rhs(trace, lam, A, width, t)
        ctx = {"lambda": lam, "a": A.a}
        ctx.update({"r": r} if r is not None else {"ratio": ratio})
        out.append(CheckResult("davies_gaffney", float(trace.times[k]), lhs, rhs, tol, ctx))
    return out


# neighbourhood decay -----------------------------------------------------

@dataclass
class NeighborhoodDecayReport:
    rho: float
    epsilon: float
    C_gamma: float
    C_fit: float
    C_theory: float
    results: list = field(default_factory=list)
    out_of_regime: list = field(default_factory=list)
    skipped: str = ""


def check_neighborhood_decay(
    trace: Trace,
    lam: float,
    rho: float,
    gamma: RegularFunctionSpec,
    A: Region,
    times=None,
    fit_gamma: bool = True,
) -> NeighborhoodDecayReport:
    """Tail bound ``int_{A_rho^c} u^lam <= (C/gamma(t)) exp(-eps (rho/t^{1/p})^{p/(p-1)})``.

    The hypothesis ``int_{A_rho} u^lam <= 1/gamma(t)`` is certified first;
    with ``fit_gamma`` the constant ``C_gamma`` is the smallest one making it
    hold at every sampled time. Only times with ``t^{1/p} <= rho`` are
    tested; the others are listed in ``out_of_regime``. ``C_theory`` is
    ``Theta / (exp(eps) - 1)``, the constant produced by summing the
    iteration in the regime.
    """
    p = trace.p
    check_lambda(p, lam)
    eps = epsilon_iteration(gamma.theta, p, lam)
    beta = p / (p - 1.0)
    C_theory = gamma.Theta / math.expm1(eps)
    idx = range(len(trace)) if times is None else [trace.index(t) for t in times]
    region = A.with_rho(rho)
    samples = []
    for k in idx:
        t = _elapsed(trace, float(trace.times[k]))
        if t <= 0:
            continue
        inner = weighted_lp(trace, lam, region.neighborhood, float(trace.times[k]))
        outer = weighted_lp(trace, lam, region.neighborhood_complement, float(trace.times[k]))
        samples.append((float(trace.times[k]), t, inner, outer))
    report = NeighborhoodDecayReport(rho, eps, math.nan, math.nan, C_theory)
    if not samples:
        report.skipped = "no snapshots with t > 0"
        return report
    if not gamma.certify():
        report.skipped = "gamma is not a regular function"
        return report
    if fit_gamma:
        C_gamma = max(t**gamma.exponent * inner for _, t, inner, _ in samples)
        if not (math.isfinite(C_gamma) and C_gamma > 0):
            report.skipped = f"hypothesis certificate failed (C_gamma = {C_gamma})"
            return report
        gamma = gamma.with_constant(C_gamma)
    elif any(inner > 1.0 / float(gamma(t)) * (1 + INEQUALITY_TOL) for _, t, inner, _ in samples):
        report.skipped = "hypothesis int_{A_rho} u^lam <= 1/gamma(t) fails"
        return report
    report.C_gamma = gamma.C_gamma
    shapes = []
    for tt, t, _, outer in samples:
        if t ** (1.0 / p) > rho:
            report.out_of_regime.append(tt)
            continue
        shape = math.exp(-eps * (rho / t ** (1.0 / p)) ** beta) / float(gamma(t))
        shapes.append((tt, outer, shape))
    if not shapes:
        report.skipped = f"no snapshots with t^(1/p) <= rho = {rho}"
        return report
    report.C_fit = max(outer / shape for _, outer, shape in shapes)
    ctx = {"lambda": lam, "rho": rho, "a": A.a, "epsilon": eps}
    report.results = [
        CheckResult("neighborhood_decay", tt, outer, report.C_fit * shape, INEQUALITY_TOL, ctx)
        for tt, outer, shape in shapes
    ]
    return report


def neighborhood_decay_stability(trace: Trace, lam: float, rho: float, gamma: RegularFunctionSpec, A: Region):
    """Fit at ``rho`` and at ``2^{1/p} rho`` (twice the regime window ``t <= rho^p``).

    Returns ``(first, second, ratio)`` with ``ratio = max/min`` of the two ``C_fit``.
    Raises :class:`InsufficientData` unless the trace covers the doubled window.
    """
    window = 2.0 * rho**trace.p
    if _elapsed(trace, float(trace.times[-1])) < window * (1 - 1e-12):
        raise InsufficientData(f"window doubling needs elapsed time >= 2 rho^p = {window:.6g}, "
                               f"trace ends at {float(trace.times[-1]):.6g}")
    first = check_neighborhood_decay(trace, lam, rho, gamma, A)
    second = check_neighborhood_decay(trace, lam, rho * 2.0 ** (1.0 / trace.p), gamma, A)
    if first.skipped or second.skipped:
        return first, second, math.nan
    hi, lo = max(first.C_fit, second.C_fit), min(first.C_fit, second.C_fit)
    return first, second, (hi / lo if lo > 0 else math.inf)


def corollary_rho(d: float, R: float, c: float = 0.5, C: float = 2.0) -> float:
    """``rho = c max(d(x, A), C R)``, after checking the containment its use needs.

    For ``d <= C R`` the ball ``B(x, R)`` must lie in ``A_rho`` (``d + R <= rho``);
    otherwise ``B`` must lie in ``A_rho^c`` (``c d <= d - R``).
    """
    if d < 0 or R <= 0 or c <= 0 or C <= 0:
        raise DomainError("need d >= 0 and positive R, c, C")
    if d <= C * R:
        rho = c * C * R
        if d + R > rho * (1 + 1e-15):
            raise PreconditionError(f"B(x, R) is not inside A_rho: d + R = {d + R} > rho = {rho}")
    else:
        rho = c * d
        if rho > d - R:
            raise PreconditionError(f"B(x, R) is not inside the complement of A_rho: c d = {rho} > d - R = {d - R}")
    return rho


# decay exponent ----------------------------------------------------------

def check_lambda_decay(source, lam: float, n: int, p: float, times=None, slack: float = 0.03):
    """Least-squares slope of ``log int u^lam`` against ``log t`` over the last decade.

    ``t`` is measured from the first snapshot for traces and is absolute for
    exact solutions (which then need ``times``). Passes iff the slope is at
    most ``-(lam-1) n/p (1 - slack)``.
    """
    if isinstance(source, Trace):
        if not source.grid.manifold.is_euclidean:
            raise UnsupportedOperation("decay exponent check needs a Euclidean run")
        t_abs = source.times if times is None else np.asarray(times, dtype=float)
        t = t_abs - source.t_initial
        vals_fn = lambda k: weighted_lp(source, lam, t=float(t_abs[k]))
    else:
        if times is None:
            raise InsufficientData("exact sources need explicit times")
        t_abs = t = np.asarray(times, dtype=float)
        vals_fn = lambda k: weighted_lp(source, lam, t=float(t_abs[k]))
    sel = np.flatnonzero((t > 0) & (t >= t.max() / 10.0))
    if sel.size < 5:
        raise InsufficientData(f"need >= 5 snapshots in the last decade, have {sel.size}")
    x = np.log(t[sel])
    y = np.log([vals_fn(k) for k in sel])
    slope = float(np.polyfit(x, y, 1)[0])
    predicted = -(lam - 1.0) * n / p
    # the absolute 1e-12 only matters for lam = 1, where the prediction is 0
    result = CheckResult("lambda_decay", float(t_abs[sel[-1]]), slope, predicted * (1.0 - slack) + 1e-12, 0.0,
                         {"lambda": lam, "n": n, "p": p, "predicted": predicted})
    return slope, result


# envelope ----------------------------------------------------------------

def sup_over_ball(source, center_radius: float, radius: float, t: float) -> float:
    """``max u(., t)`` over the radial section ``[x - R, x + R]`` of ``B(x, R)``.

    Traces use cells whose centres lie in the section; exact solutions are
    radially decreasing, so the value at the innermost radius is returned.
    """
    lo = max(0.0, center_radius - radius)
    hi = center_radius + radius
    if isinstance(source, ExactSolution):
        return float(source.evaluate(lo, t))
    idx = source.grid.cells_in(lo, hi)
    if idx.size == 0:
        raise DomainError(f"ball [{lo}, {hi}] contains no cell centre")
    return float(source.at(t)[idx].max())


@dataclass
class EnvelopeReport:
    c_exp: float
    mode: str
    C_report: float
    window_ratio: float
    growth: float
    points: list = field(default_factory=list)
    results: list = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return math.isfinite(self.C_report) and self.window_ratio < 2.0


def check_subgaussian_envelope(
    source,
    p: float,
    n: int,
    A: Region,
    c_exp: float | None = None,
    Ts=None,
    zs=None,
    *,
    mode: str = "fk",
    manifold: ModelManifold | None = None,
    t_offset: float = 0.0,
) -> EnvelopeReport:
    """Statistic ``N(x, T) = sup_{B(x, T^{1/p}/2)} u . V . exp(c (d(x, A)/T^{1/p})^{p/(p-1)})``.

    ``V`` is ``mu(B(x, T^{1/p}))`` (``mode="fk"``) or ``T^{n/p}``
    (``mode="sobolev"``). Centres are placed at ``d(x, A) = z T^{1/p}``.
    ``T`` is the elapsed time; the trace time is ``T + t_offset``.

    ``window_ratio`` compares the maxima of ``N`` over ``T in [T0, 2 T0]``
    and ``[2 T0, 4 T0]``; ``growth`` is the max over the upper third of
    ``z`` divided by the max over the lower third.
    """
    if c_exp is None:
        c_exp = zeta_barenblatt(p) / 2.0
    if mode not in ("fk", "sobolev"):
        raise ConfigError(f"unknown envelope mode {mode!r}")
    Ts = np.asarray([1.0, 1.5, 2.0, 3.0, 4.0] if Ts is None else Ts, dtype=float)
    zs = np.asarray(np.linspace(0.0, 4.0, 9) if zs is None else zs, dtype=float)
    if manifold is None:
        manifold = source.grid.manifold if isinstance(source, Trace) else source.manifold()
    beta = p / (p - 1.0)
    points = []
    for T in Ts:
        R = T ** (1.0 / p)
        for z in zs:
            x = A.a + z * R if z > 0 else 0.0
            d = max(0.0, x - A.a)
            sup = sup_over_ball(source, x, R / 2.0, T + t_offset)
            vol = ball_volume(manifold, x, R) if mode == "fk" else T ** (n / p)
            N = sup * vol * math.exp(c_exp * (d / R) ** beta)
            points.append((float(T), float(z), float(x), N))
    arr = np.array(points)
    C_report = float(arr[:, 3].max())
    T0 = Ts.min()
    w1 = arr[(arr[:, 0] >= T0) & (arr[:, 0] <= 2 * T0), 3]
    w2 = arr[(arr[:, 0] >= 2 * T0) & (arr[:, 0] <= 4 * T0), 3]
    window_ratio = math.nan
    if w1.size and w2.size:
        a, b = w1.max(), w2.max()
        window_ratio = max(a, b) / min(a, b)
    zmax = zs.max()
    lo = arr[arr[:, 1] <= zmax / 3.0, 3]
    hi = arr[arr[:, 1] >= 2.0 * zmax / 3.0, 3]
    growth = float(hi.max() / lo.max()) if lo.size and hi.size else math.nan
    ctx = {"c_exp": c_exp, "mode": mode}
    results = [
        CheckResult("envelope_window", float(2 * T0), window_ratio, 2.0, 0.0, ctx),
    ]
    return EnvelopeReport(c_exp, mode, C_report, window_ratio, growth, points, results)


# sharpness ---------------------------------------------------------------

def sharpness_fit(trace: Trace, p: float, n: int, t_window=None, u_floor: float | None = None, rel_tol: float = 0.05):
    """Fit ``-log(u t^{n/p}) = zeta x + b`` with ``x = (r/t^{1/p})^{p/(p-1)}``.

    Points from all snapshots in ``t_window`` with ``u > u_floor`` are pooled
    (default floor ``1e-12 max u``). Passes iff the slope is within
    ``rel_tol`` of the Barenblatt exponent.
    """
    if not trace.grid.manifold.is_euclidean:
        raise UnsupportedOperation("sharpness fit needs a Euclidean trace")
    lo, hi = (-math.inf, math.inf) if t_window is None else t_window
    idx = trace.select(lo, hi)
    idx = idx[trace.times[idx] > 0]
    beta = p / (p - 1.0)
    r = trace.grid.centers
    floor = 1e-12 * float(trace.values[idx].max()) if (u_floor is None and idx.size) else u_floor
    xs, ys = [], []
    for k in idx:
        t = float(trace.times[k])
        u = trace.values[k]
        mask = u > floor
        xs.append((r[mask] / t ** (1.0 / p)) ** beta)
        ys.append(-np.log(u[mask] * t ** (n / p)))
    x = np.concatenate(xs) if xs else np.empty(0)
    y = np.concatenate(ys) if ys else np.empty(0)
    if x.size < 3:
        raise InsufficientData(f"only {x.size} points above the floor")
    slope, intercept = np.polyfit(x, y, 1)
    zb = zeta_barenblatt(p)
    result = CheckResult("sharpness", float(trace.times[idx[-1]]), abs(slope - zb), rel_tol * zb, 0.0,
                         {"p": p, "n": n, "slope": float(slope)})
    return float(slope), float(intercept), result


# mean value --------------------------------------------------------------

def check_mean_value_scaleinv(
    trace: Trace,
    p: float,
    lam: float,
    T: float,
    center_radius: float = 0.0,
    t_base: float | None = None,
    min_snapshots: int = 5,
):
    """Scale-invariant ratio ``||u||_{L^inf(Q')} (T mu(B))^{1/lam} / ||u||_{L^lam(Q)}``.

    ``B = B(x, T^{1/p})``, ``Q = B x [t_b, t_b + T]`` and
    ``Q' = B/2 x [t_b + 2^{-p} T, t_b + T]``. ``mu(B)`` is the measure of
    ``B`` inside the computational domain, so a constant field gives ratio 1.
    The time integral uses the trapezoid rule over the snapshots.
    """
    if t_base is None:
        t_base = trace.t_initial
    R = T ** (1.0 / p)
    t_end = t_base + T
    if trace.times[0] > t_base * (1 + 1e-12) or trace.times[-1] < t_end * (1 - 1e-12):
        raise InsufficientData(f"trace window [{trace.times[0]}, {trace.times[-1]}] "
                               f"does not cover [{t_base}, {t_end}]")
    eps = 1e-12 * max(1.0, t_end)
    q_idx = trace.select(t_base - eps, t_end + eps)
    qp_idx = trace.select(t_base + 2.0 ** (-p) * T - eps, t_end + eps)
    if q_idx.size < min_snapshots or qp_idx.size < min_snapshots:
        raise InsufficientData(f"need >= {min_snapshots} snapshots in each cylinder")
    grid = trace.grid
    lo, hi = max(0.0, center_radius - R), center_radius + R
    shell = Shell(lo, hi)
    frac = grid.overlap_fractions(shell)
    mu_B = float(np.dot(grid.measures, frac))
    half = grid.cells_in(max(0.0, center_radius - R / 2), center_radius + R / 2)
    if half.size == 0 or mu_B <= 0:
        raise InsufficientData("ball contains no cells")
    sup_qp = float(trace.values[np.ix_(qp_idx, half)].max())
    times = trace.times[q_idx]
    if math.isinf(lam):
        mask = frac > 0
        norm_q = float(trace.values[np.ix_(q_idx, np.flatnonzero(mask))].max())
        ratio = sup_qp / norm_q
    else:
        inner = (trace.values[q_idx] ** lam) @ (grid.measures * frac)
        norm_q = float(integrate.trapezoid(inner, times)) ** (1.0 / lam)
        ratio = sup_qp * (T * mu_B) ** (1.0 / lam) / norm_q
    result = CheckResult("mean_value", float(t_end), ratio, math.inf, 0.0,
                         {"T": T, "lambda": lam, "cells": grid.cells, "x": center_radius})
    return float(ratio), result


def mean_value_band(ratios, band: float = 4.0) -> CheckResult:
    """``max/min`` of the mean-value ratios against the allowed band."""
    r = np.asarray(list(ratios), dtype=float)
    if r.size < 2:
        raise InsufficientData("need at least two ratios")
    return CheckResult("mean_value_band", 0.0, float(r.max() / r.min()), band, 0.0, {"count": int(r.size)})
