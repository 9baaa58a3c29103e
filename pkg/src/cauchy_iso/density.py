"""Densities, CDFs and quantiles of the Cauchy-type family.

The family is ``f(x) = c / (1 + alpha**2 + x**2) ** ((n + 1) / 2)``, the
one-dimensional section at offset ``alpha`` of the isotropic ``n``-dimensional
Cauchy law.  ``(alpha, n) = (0, 1)`` is the standard Cauchy distribution.

With ``s = sqrt(1 + alpha**2)`` and ``t = s * tan(theta)`` every mass reduces
to an integral of ``cos(theta) ** (n - 1)``, so no quadrature is needed on the
fast path:

* near the centre the Wallis recurrence for ``int_0^theta cos^m`` is used
  (all of its terms are positive, so it is forward stable);
* in the tails the complementary angle ``psi = atan2(s, |x|)`` is used with the
  series ``int_0^psi sin^m = sum_k binom(2k, k) 4^-k S^(m+2k+1) / (m+2k+1)``,
  ``S = sin(psi)``, which keeps full relative accuracy for tiny tail masses;
* short intervals are integrated directly in the angle variable with a
  20-point Gauss-Legendre rule so that thin intervals do not lose digits to
  cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "NEG_INF",
    "DomainError",
    "Interval",
    "MeasureParams",
    "STANDARD",
    "as_extended",
    "cdf",
    "density",
    "interval_mass",
    "is_neg_inf",
    "mass_pair",
    "normalization",
    "quantile",
    "quantile_from_pair",
    "sf",
    "tail",
    "tail_inverse",
    "weight",
]

_QUARTER_PI = 0.25 * math.pi
_GL_NODES, _GL_WEIGHTS = (tuple(v.tolist()) for v in np.polynomial.legendre.leggauss(20))


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class _NegInf:
    """The extended-real value minus infinity.

    Used for half-line endpoints and for transfer values of empty intervals,
    so that minus infinity never enters floating-point arithmetic by accident.
    """

    _instance: "_NegInf | None" = None

    def __new__(cls) -> "_NegInf":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NEG_INF"

    def __str__(self) -> str:
        return "-inf"

    def __float__(self) -> float:
        return -math.inf

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()


def is_neg_inf(x) -> bool:
    return x is NEG_INF or (isinstance(x, float) and x == -math.inf)


def as_extended(x):
    """Map ``-inf`` (float or sentinel) to ``NEG_INF``; reject NaN and ``+inf``."""
    if is_neg_inf(x):
        return NEG_INF
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"expected a finite value or -inf, got {x!r}")
    return x


@dataclass(frozen=True)
class MeasureParams:
    """Parameters ``(alpha, n)`` of the density family."""

    alpha: float = 0.0
    n: int = 1

    def __post_init__(self) -> None:
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha < 0.0:
            raise DomainError(f"alpha must be finite and >= 0, got {self.alpha!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "n", int(self.n))

    @property
    def scale(self) -> float:
        """``sqrt(1 + alpha**2)``."""
        return math.hypot(1.0, self.alpha)

    @property
    def scale_sq(self) -> float:
        return 1.0 + self.alpha * self.alpha

    @property
    def is_standard(self) -> bool:
        return self.alpha == 0.0 and self.n == 1

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "n": self.n}


STANDARD = MeasureParams(0.0, 1)


@dataclass(frozen=True)
class Interval:
    """An interval ``(a, b)`` with ``a`` possibly ``NEG_INF`` and ``b`` finite.

    ``a == b`` is accepted and denotes the empty interval.
    """

    a: object
    b: float

    def __post_init__(self) -> None:
        a = as_extended(self.a)
        b = float(self.b)
        if not math.isfinite(b):
            raise DomainError(f"right endpoint must be finite, got {self.b!r}")
        if a is not NEG_INF and a > b:
            raise DomainError(f"need a <= b, got ({a!r}, {b!r})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def is_half_line(self) -> bool:
        return self.a is NEG_INF

    @property
    def is_empty(self) -> bool:
        return self.a is not NEG_INF and self.a == self.b


# -- Wallis integrals --------------------------------------------------------


@lru_cache(maxsize=None)
def _wallis(m: int) -> float:
    """``int_0^{pi/2} cos(t)**m dt`` by the Wallis recurrence."""
    value = 0.5 * math.pi if m % 2 == 0 else 1.0
    for k in range(2 if m % 2 == 0 else 3, m + 1, 2):
        value *= (k - 1) / k
    return value


def _cos_power_integral(m: int, theta: float) -> float:
    """``int_0^theta cos(t)**m dt`` for ``0 <= theta <= pi/2``."""
    if m == 0:
        return theta
    sin_t = math.sin(theta)
    if m == 1:
        return sin_t
    cos_t = math.cos(theta)
    if m % 2 == 0:
        value, k, cos_pow = theta, 2, cos_t
    else:
        value, k, cos_pow = sin_t, 3, cos_t * cos_t
    while k <= m:
        value = (sin_t * cos_pow + (k - 1) * value) / k
        cos_pow *= cos_t * cos_t
        k += 2
    return value


def _sin_power_integral(m: int, psi: float) -> float:
    """``int_0^psi sin(t)**m dt`` for ``0 <= psi <= pi/4``; relative accuracy."""
    if m == 0:
        return psi
    if m == 1:
        half = math.sin(0.5 * psi)
        return 2.0 * half * half
    s = math.sin(psi)
    s2 = s * s
    power = s ** (m + 1)
    if power == 0.0:
        return 0.0
    coef = 1.0
    total = 0.0
    k = 0
    while True:
        term = coef * power / (m + 1 + 2 * k)
        total += term
        if term <= 1e-17 * total:
            return total
        coef *= (2 * k + 1) / (2 * k + 2)
        power *= s2
        k += 1


@lru_cache(maxsize=None)
def _tail_at_scale(m: int) -> float:
    """Unnormalised tail angle integral at ``x = s`` (``psi = pi/4``)."""
    return _sin_power_integral(m, _QUARTER_PI)


# -- densities ----------------------------------------------------------------


def normalization(params: MeasureParams) -> float:
    """The constant ``c`` making ``c * (1 + alpha**2 + t**2) ** (-(n+1)/2)`` a
    probability density: ``s**n * Gamma((n+1)/2) / (sqrt(pi) * Gamma(n/2))``."""
    n = params.n
    log_c = (
        n * math.log(params.scale)
        + math.lgamma(0.5 * (n + 1))
        - math.lgamma(0.5 * n)
        - 0.5 * math.log(math.pi)
    )
    return math.exp(log_c)


def weight(params: MeasureParams, x: float) -> float:
    """Unnormalised density ``(1 + alpha**2 + x**2) ** (-(n+1)/2)``."""
    return math.hypot(params.scale, x) ** (-(params.n + 1))


def density(params: MeasureParams, x: float) -> float:
    return normalization(params) * weight(params, x)


# -- distribution function -----------------------------------------------------


def tail(params: MeasureParams, x: float) -> float:
    """Mass of ``(x, inf)`` for ``x >= 0``, accurate relative to its size."""
    if x < 0.0:
        raise DomainError("tail() expects x >= 0")
    if x == math.inf:
        return 0.0
    m = params.n - 1
    s = params.scale
    total = 2.0 * _wallis(m)
    psi = math.atan2(s, x)
    if psi <= _QUARTER_PI:
        return _sin_power_integral(m, psi) / total
    return 0.5 - _cos_power_integral(m, math.atan2(x, s)) / total


def cdf(params: MeasureParams, x) -> float:
    """Mass of ``(-inf, x]``; ``x`` may be ``NEG_INF`` or ``+-inf``."""
    if is_neg_inf(x):
        return 0.0
    x = float(x)
    if math.isnan(x):
        raise DomainError("cdf of NaN")
    if x < 0.0:
        return tail(params, -x)
    return 1.0 - tail(params, x)


def sf(params: MeasureParams, x) -> float:
    """Mass of ``(x, inf)``."""
    if is_neg_inf(x):
        return 1.0
    x = float(x)
    if x >= 0.0:
        return tail(params, x)
    return 1.0 - tail(params, -x)


def _gauss_legendre(fn, lo: float, width: float) -> float:
    half = 0.5 * width
    mid = lo + half
    return half * math.fsum(w * fn(mid + half * t) for t, w in zip(_GL_NODES, _GL_WEIGHTS))


def mass_pair(params: MeasureParams, a, b) -> tuple[float, float]:
    """Return ``(mass(a, b), 1 - mass(a, b))``.

    Whichever of the two is smaller is computed directly (not as ``1 - x``),
    so both tiny masses and masses close to one keep their relative accuracy.
    """
    a = as_extended(a)
    b = float(b)
    if a is NEG_INF:
        p = cdf(params, b)
        return (p, tail(params, b)) if b >= 0.0 else (p, 1.0 - p)
    if a > b:
        raise DomainError(f"need a <= b, got ({a!r}, {b!r})")
    if a == b:
        return 0.0, 1.0
    if b <= 0.0:
        return mass_pair(params, -b, -a)
    m = params.n - 1
    s = params.scale
    total = 2.0 * _wallis(m)
    # angular width of (a, b) seen from (0, -s); exact for every sign pattern
    width = math.atan2(s * (b - a), s * s + a * b)
    if width <= min(0.5, 4.0 / (m + 1)):
        if a >= 0.0:
            lo = math.atan2(s, b)
            p = _gauss_legendre(lambda u: math.sin(u) ** m, lo, width) / total
        else:
            lo = math.atan2(a, s)
            p = _gauss_legendre(lambda u: math.cos(u) ** m, lo, width) / total
        return p, 1.0 - p
    if a >= 0.0:
        p = tail(params, a) - tail(params, b)
        return p, 1.0 - p
    q = tail(params, -a) + tail(params, b)
    return 1.0 - q, q


def interval_mass(params: MeasureParams, interval: Interval) -> float:
    return mass_pair(params, interval.a, interval.b)[0]


# -- inverse -------------------------------------------------------------------


def _bracketed_newton(fn, dfn, lo: float, hi: float, x0: float, max_iter: int = 100) -> float:
    """Root of increasing ``fn`` on ``[lo, hi]``: Newton steps, bisection fallback."""
    x = min(max(x0, lo), hi)
    for _ in range(max_iter):
        fx = fn(x)
        if fx == 0.0:
            return x
        if fx > 0.0:
            hi = x
        else:
            lo = x
        d = dfn(x)
        step_ok = d > 0.0 and math.isfinite(d)
        nxt = x - fx / d if step_ok else 0.5 * (lo + hi)
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 4.0 * math.ulp(x) or hi - lo <= 4.0 * math.ulp(hi):
            return nxt
        x = nxt
    return x


def tail_inverse(params: MeasureParams, t: float) -> float:
    """The ``x >= 0`` with ``tail(params, x) == t`` for ``0 < t <= 1/2``."""
    if not 0.0 < t <= 0.5:
        raise DomainError(f"tail probability must lie in (0, 1/2], got {t!r}")
    if t == 0.5:
        return 0.0
    s = params.scale
    m = params.n - 1
    if m == 0:
        return s * math.sin(math.pi * (0.5 - t)) / math.sin(math.pi * t)
    if m == 1:
        return s * (1.0 - 2.0 * t) / (2.0 * math.sqrt(t * (1.0 - t)))
    total = 2.0 * _wallis(m)
    target = t * total
    if target <= _tail_at_scale(m):
        log_target = math.log(target)
        guess = math.asin(min(((m + 1) * target) ** (1.0 / (m + 1)), math.sin(_QUARTER_PI)))
        psi = _bracketed_newton(
            lambda u: math.log(_sin_power_integral(m, u)) - log_target if u > 0.0 else -math.inf,
            lambda u: math.sin(u) ** m / _sin_power_integral(m, u),
            0.0,
            _QUARTER_PI,
            guess,
        )
        return s * math.cos(psi) / math.sin(psi)
    centre = (0.5 - t) * total
    theta = _bracketed_newton(
        lambda u: _cos_power_integral(m, u) - centre,
        lambda u: math.cos(u) ** m,
        0.0,
        _QUARTER_PI,
        centre,
    )
    return s * math.tan(theta)


def quantile_from_pair(params: MeasureParams, p: float, q: float) -> float:
    """The ``x`` with ``cdf(x) = p``, where ``q = 1 - p`` is supplied separately."""
    if p <= 0.0 or q <= 0.0:
        raise DomainError("quantile needs 0 < p < 1")
    if p < q:
        return -tail_inverse(params, p)
    if q < p:
        return tail_inverse(params, q)
    return 0.0


def quantile(params: MeasureParams, p: float) -> float:
    """Inverse of :func:`cdf` on ``(0, 1)``."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile needs 0 < p < 1, got {p!r}")
    return quantile_from_pair(params, p, 1.0 - p)
