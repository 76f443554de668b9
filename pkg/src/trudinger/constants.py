"""Explicit constants of the sub-Gaussian estimate chain.

All functions are pure and work in double precision; powers that can
overflow (the iteration bound) are evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from .errors import DomainError, PreconditionError

__all__ = [
    "lambda_threshold",
    "check_lambda",
    "caccioppoli_constants",
    "caccioppoli_formula",
    "zeta_davies_gaffney",
    "zeta_barenblatt",
    "sobolev_exponents",
    "epsilon_iteration",
    "epsilon_iteration_term",
    "IterationParams",
    "log_iteration_bound",
    "iteration_bound",
    "iteration_bound_special",
    "remark_ratio_bounds",
    "c2_over_c1_closed_form",
    "maximum_principle_coefficient",
    "ConstantsTable",
    "constants_table",
    "DEFAULT_KAPPA",
]

DEFAULT_KAPPA = 2.0
EPSILON_SCAN_CAP = 10_000


def _check_p(p: float) -> None:
    if not p > 1:
        raise PreconditionError(f"p must be > 1, got {p}")


def lambda_threshold(p: float) -> float:
    """Smallest admissible exponent ``max(p, p/(p-1))`` (always >= 2)."""
    _check_p(p)
    return max(p, p / (p - 1.0))


def check_lambda(p: float, lam: float) -> None:
    thr = lambda_threshold(p)
    if lam < thr * (1 - 1e-15):
        raise PreconditionError(
            f"lambda = {lam} violates lambda >= max(p, p/(p-1)) = {thr} for p = {p}"
        )


def caccioppoli_constants(p: float, lam: float) -> tuple[float, float]:
    """Constants ``(c1, c2)`` of the Caccioppoli-type energy inequality.

    With ``alpha = lam / p``::

        c1 = lam (lam-1) / (2^p (p-1)^(p-1)) * alpha^(-p)
        c2 = lam (lam-1) / (2 (p-1)^(p-1)) * alpha^(-p)
             + lam 2^(p-1) p^p / ((lam-1)^(p-1) (p-1)^(p-1))
    """
    check_lambda(p, lam)
    return caccioppoli_formula(p, lam)


def caccioppoli_formula(p: float, lam: float) -> tuple[float, float]:
    """The closed forms of :func:`caccioppoli_constants` without the admissibility check.

    Only ``p > 1`` and ``lam > 1`` are required; used to test algebraic identities.
    """
    _check_p(p)
    if not lam > 1:
        raise DomainError(f"lambda must be > 1, got {lam}")
    alpha = lam / p
    pm1 = (p - 1.0) ** (p - 1.0)
    base = lam * (lam - 1.0) * alpha ** (-p) / pm1
    c1 = base / 2.0**p
    c2 = base / 2.0 + lam * 2.0 ** (p - 1.0) * p**p / ((lam - 1.0) ** (p - 1.0) * pm1)
    return c1, c2


def zeta_davies_gaffney(p: float, lam: float) -> float:
    """Exponent ``(p-1) / (2 c2^{1/(p-1)})`` of the Davies-Gaffney bound."""
    _, c2 = caccioppoli_constants(p, lam)
    return (p - 1.0) / (2.0 * c2 ** (1.0 / (p - 1.0)))


def zeta_barenblatt(p: float) -> float:
    """Barenblatt exponent ``(p-1)^2 p^{-p/(p-1)}``; equals 1/4 at p = 2."""
    _check_p(p)
    return (p - 1.0) ** 2 * p ** (-p / (p - 1.0))


def maximum_principle_coefficient(p: float, lam: float) -> float:
    """Coefficient ``c2 2^{p-1} p^{-p}`` in ``d_t xi + coef |grad xi|^p <= 0``."""
    _, c2 = caccioppoli_constants(p, lam)
    return c2 * 2.0 ** (p - 1.0) * p ** (-p)


def sobolev_exponents(n: int, p: float, kappa: float = DEFAULT_KAPPA) -> tuple[float, float]:
    """Sobolev exponent ``kappa`` and ``nu = 1 - 1/kappa``.

    For ``n > p`` these are ``n/(n-p)`` and ``p/n``; otherwise any
    ``kappa > 1`` is allowed and the caller's choice is used.
    """
    _check_p(p)
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    if n > p:
        return n / (n - p), p / n
    if not kappa > 1:
        raise PreconditionError(f"kappa must be > 1, got {kappa}")
    return float(kappa), 1.0 - 1.0 / kappa


def epsilon_iteration_term(k: int, theta: float, p: float, lam: float) -> float:
    """The ``k``-th term whose infimum over ``k >= 1`` defines epsilon."""
    zeta = zeta_davies_gaffney(p, lam)
    e = p / (p - 1.0)
    log_term = (
        math.log(zeta)
        + k * math.log(theta) / (p - 1.0)
        - e * math.log(k)
        - (e + 1.0) * math.log(k + 1.0)
        - math.log(theta - 1.0) / (p - 1.0)
    )
    return math.exp(log_term)


def epsilon_iteration(theta: float, p: float, lam: float, *, return_argmin: bool = False):
    """Infimum over ``k >= 1`` of the neighbourhood-iteration terms.

    The log of the term is convex in ``k``, so the scan stops at the first
    strict increase.
    """
    if not theta > 1:
        raise PreconditionError(f"theta must be > 1, got {theta}")
    best_k, best = 1, epsilon_iteration_term(1, theta, p, lam)
    for k in range(2, EPSILON_SCAN_CAP + 1):
        val = epsilon_iteration_term(k, theta, p, lam)
        if val > best:
            break
        best_k, best = k, val
    else:
        raise PreconditionError(f"epsilon scan did not reach its minimum within k <= {EPSILON_SCAN_CAP}")
    return (best, best_k) if return_argmin else best


@dataclass(frozen=True)
class IterationParams:
    """Parameters of the recursion ``J_{k+1} <= A^k / Theta * J_k^{1+omega}``."""

    A: float
    Theta: float
    omega: float
    J0: float

    def __post_init__(self):
        if not (self.A > 0 and self.Theta > 0 and self.omega > 0):
            raise PreconditionError(f"A, Theta, omega must be positive: {self}")
        if not self.J0 >= 0:
            raise PreconditionError(f"J0 must be non-negative, got {self.J0}")

    @property
    def special_case(self) -> bool:
        """Whether ``Theta >= A^{1/omega} J0^omega``."""
        if self.J0 == 0:
            return True
        lhs = math.log(self.Theta)
        rhs = math.log(self.A) / self.omega + self.omega * math.log(self.J0)
        return lhs >= rhs


def log_iteration_bound(params: IterationParams, k: int) -> float:
    """Natural log of the closed-form bound on ``J_k`` (``-inf`` when ``J0 = 0``).

    bound = (J0 / (A^{-1/w} Theta)^{1/w})^{(1+w)^k} * (A^{-k-1/w} Theta)^{1/w}
    """
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if params.J0 == 0:
        return -math.inf
    w = params.omega
    la, lt = math.log(params.A), math.log(params.Theta)
    bracket = math.log(params.J0) - (lt - la / w) / w
    tail = (lt - (k + 1.0 / w) * la) / w
    if bracket == 0.0:
        return tail
    try:
        growth = (1.0 + w) ** k
    except OverflowError:
        growth = math.inf
    head = growth * bracket
    return head + tail


def iteration_bound(params: IterationParams, k: int) -> float:
    """Closed-form bound on ``J_k``; ``inf`` if it exceeds the double range."""
    lb = log_iteration_bound(params, k)
    if lb > 709.0:
        return math.inf
    return math.exp(lb)


def iteration_bound_special(params: IterationParams, k: int) -> float | None:
    """``A^{-k/omega} J0`` when ``Theta >= A^{1/omega} J0^omega``, else ``None``."""
    if not params.special_case:
        return None
    if params.J0 == 0:
        return 0.0
    lb = -k * math.log(params.A) / params.omega + math.log(params.J0)
    return math.inf if lb > 709.0 else math.exp(lb)


def c2_over_c1_closed_form(p: float, lam: float) -> float:
    return 2.0 ** (p - 1.0) + 2.0 ** (2.0 * p - 1.0) * lam**p / (lam - 1.0) ** p


def remark_ratio_bounds(p: float, lam: float) -> tuple[float, float, float]:
    """``(p/c1, c2/c1, c2)`` for checking their growth in ``lam``."""
    _check_p(p)
    if lam < 2:
        raise PreconditionError(f"lambda must be >= 2, got {lam}")
    c1, c2 = caccioppoli_constants(p, lam)
    return p / c1, c2 / c1, c2


@dataclass(frozen=True)
class ConstantsTable:
    p: float
    q: float
    n: int
    lam: float
    alpha: float
    c1: float
    c2: float
    zeta_dg: float
    zeta_b: float
    kappa: float
    nu: float
    theta: float
    Theta: float
    epsilon: float
    epsilon_k: int
    max_principle_coef: float
    p_over_c1: float
    c2_over_c1: float

    def rows(self) -> list[tuple[str, float]]:
        return [(k, v) for k, v in asdict(self).items()]


def constants_table(
    p: float,
    n: int = 1,
    lam: float | None = None,
    theta: float = 2.0,
    kappa: float = DEFAULT_KAPPA,
    decay_exponent: float | None = None,
) -> ConstantsTable:
    """All constants for one parameter set.

    ``Theta`` is the growth factor ``theta^e`` of the regular function
    ``gamma(t) ~ t^e``; by default ``e = (lam - 1) n / p``, the Euclidean
    decay rate of ``int u^lam``.
    """
    if lam is None:
        lam = lambda_threshold(p)
    c1, c2 = caccioppoli_constants(p, lam)
    kap, nu = sobolev_exponents(n, p, kappa)
    eps, k_star = epsilon_iteration(theta, p, lam, return_argmin=True)
    e = (lam - 1.0) * n / p if decay_exponent is None else decay_exponent
    return ConstantsTable(
        p=float(p),
        q=1.0 / (p - 1.0),
        n=int(n),
        lam=float(lam),
        alpha=lam / p,
        c1=c1,
        c2=c2,
        zeta_dg=zeta_davies_gaffney(p, lam),
        zeta_b=zeta_barenblatt(p),
        kappa=kap,
        nu=nu,
        theta=float(theta),
        Theta=float(theta) ** e,
        epsilon=eps,
        epsilon_k=k_star,
        max_principle_coef=maximum_principle_coefficient(p, lam),
        p_over_c1=p / c1,
        c2_over_c1=c2 / c1,
    )
