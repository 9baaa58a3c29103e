"""Perimeters, extremal intervals, Borell and Landau-Shepp type margins.

Every comparison is returned as a :class:`GapResult`.  ``passed`` says whether
the inequality holds numerically; ``hypothesis_met`` says whether the inputs
lie in the region where it is asserted to hold.  Margins that are differences
of large transfer values carry an allowance for rounding of a few ulps of the
terms involved, reported in ``extra["rounding"]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT, Tolerances
from .density import (
    NEG_INF,
    STANDARD,
    DomainError,
    Interval,
    MeasureParams,
    _bracketed_newton,
    _wallis,
    density,
    mass_pair,
    tail,
    weight,
)
from .oracle import central_gradient
from .transfer import g_general, g_standard, g_star_standard, h

__all__ = [
    "AuxiliaryRecord",
    "ExtremalCase",
    "ExtremalReport",
    "GapResult",
    "PerimeterKind",
    "PerimeterValue",
    "borell_differential_margin",
    "borell_gap_general",
    "borell_gap_standard",
    "borell_gap_strong_general",
    "borell_gap_strong_standard",
    "borell_identity_standard",
    "chi_half_point",
    "classify_extremal",
    "h_prime",
    "lambda_prime",
    "lambda_value",
    "landau_shepp_differential_margin",
    "landau_shepp_general",
    "landau_shepp_monotone",
    "landau_shepp_standard",
    "p1_threshold",
    "perimeter_interval",
    "perimeter_multiplicative",
    "phi",
    "proof_auxiliaries",
    "y_value",
    "z_value",
]

_EPS = float(np.finfo(float).eps)
_ROUND = 16.0 * _EPS


def _rounding(*terms: float) -> float:
    return _ROUND * sum(abs(t) for t in terms)


# -- records ---------------------------------------------------------------------


class PerimeterKind(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


@dataclass(frozen=True)
class PerimeterValue:
    kind: PerimeterKind
    value: float

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "value": self.value}


@dataclass(frozen=True)
class GapResult:
    """``lhs >= rhs`` evaluated numerically.

    ``passed`` is ``margin >= -(tol + extra["rounding"])``.
    """

    lhs: float
    rhs: float
    margin: float
    passed: bool
    hypothesis_met: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "passed": self.passed,
            "hypothesis_met": self.hypothesis_met,
            "extra": dict(self.extra),
        }


def _gap(lhs: float, rhs: float, tol: float, rounding: float = 0.0, hypothesis_met: bool = True, **extra) -> GapResult:
    margin = lhs - rhs
    extra["rounding"] = rounding
    return GapResult(lhs, rhs, margin, margin >= -(tol + rounding), hypothesis_met, extra)


def _finite_pair(a, b) -> tuple[float, float]:
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"need finite endpoints, got ({a!r}, {b!r})")
    if not a < b:
        raise DomainError(f"need a < b, got ({a!r}, {b!r})")
    return a, b


def _positive(r) -> float:
    r = float(r)
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"need a finite r > 0, got {r!r}")
    return r


def _value(params: MeasureParams, a, b) -> float:
    g = g_general(params, a, b).value
    if g is NEG_INF:
        raise DomainError(f"g({a!r}, {b!r}) is -inf")
    return g


# -- perimeters ------------------------------------------------------------------


def perimeter_interval(params: MeasureParams, interval: Interval) -> PerimeterValue:
    """Additive perimeter: ``f(a) + f(b)``, or ``f(b)`` for a half-line."""
    if interval.is_empty:
        return PerimeterValue(PerimeterKind.ADDITIVE, 0.0)
    value = density(params, interval.b)
    if not interval.is_half_line:
        value += density(params, interval.a)
    return PerimeterValue(PerimeterKind.ADDITIVE, value)


def perimeter_multiplicative(params: MeasureParams, interval: Interval, tol: float = 1e-12) -> PerimeterValue:
    """``lim (mu((1 + eps) A) - mu(A)) / eps = 2 p f(p)`` for ``A = (-p, p)``."""
    if interval.is_half_line or abs(interval.a + interval.b) > tol * max(1.0, abs(interval.b)):
        raise DomainError("the multiplicative perimeter is only defined for centred intervals")
    p = interval.b
    return PerimeterValue(PerimeterKind.MULTIPLICATIVE, 2.0 * p * density(params, p))


class ExtremalCase(str, Enum):
    ABOVE_HALF = "mass_gt_half"
    BELOW_HALF = "mass_lt_half"
    HALF = "mass_eq_half"


@dataclass(frozen=True)
class ExtremalReport:
    """The three perimeters compared by the extremal-interval classification.

    ``ordering_holds`` checks, for mass above one half,
    ``per(-g*, g*) <= per(a, b) < per(-inf, g)``; below one half the chain is
    reversed; at one half all three must equal ``1/pi``.  The first comparison
    is an equality exactly when ``(a, b)`` is itself centred, which is
    reported in ``centred``; otherwise it must be strict.
    """

    case: ExtremalCase
    mass: float
    g: float
    g_star: float
    per_symmetric: float
    per_interval: float
    per_half_line: float
    ordering_holds: bool
    centred: bool

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "mass": self.mass,
            "g": self.g,
            "g_star": self.g_star,
            "per_symmetric": self.per_symmetric,
            "per_interval": self.per_interval,
            "per_half_line": self.per_half_line,
            "ordering_holds": self.ordering_holds,
            "centred": self.centred,
        }


def classify_extremal(a, b, half_band: float = 1e-12, equal_band: float = 1e-9) -> ExtremalReport:
    """Compare ``per(-g*, g*)``, ``per(a, b)`` and ``per(-inf, g)`` for the standard law."""
    a, b = _finite_pair(a, b)
    params = STANDARD
    mass = mass_pair(params, a, b)[0]
    g = g_standard(a, b)
    gs = g_star_standard(a, b)
    per_sym = 2.0 * density(params, gs)
    per_ab = density(params, a) + density(params, b)
    per_half = density(params, g)
    centred = abs(a + b) <= 1e-12 * max(1.0, abs(b))
    if abs(mass - 0.5) <= half_band:
        case = ExtremalCase.HALF
        holds = all(abs(v - 1.0 / math.pi) <= equal_band for v in (per_sym, per_ab, per_half))
    else:
        case = ExtremalCase.ABOVE_HALF if mass > 0.5 else ExtremalCase.BELOW_HALF
        low, high = (per_sym, per_half) if mass > 0.5 else (per_half, per_sym)
        if centred:
            # per(-g*, g*) coincides with per(a, b) here
            first = abs(per_sym - per_ab) <= equal_band * per_ab
        else:
            first = (low < per_ab) if mass > 0.5 else (per_ab < high)
        second = (per_ab < high) if mass > 0.5 else (low < per_ab)
        holds = first and second
    return ExtremalReport(case, mass, g, gs, per_sym, per_ab, per_half, holds, centred)


# -- standard Cauchy --------------------------------------------------------------


def borell_identity_standard(a: float, b: float, r: float) -> float:
    """Closed form of ``g(a - r, b + r) - g(a, b)`` for the standard law."""
    return r * ((b + r) * b + (a - r) * a + 2.0) / ((b + r - a + r) * (b - a))


def borell_gap_standard(a, b, r, tol: Tolerances = DEFAULT) -> GapResult:
    """``g(a - r, b + r) - g(a, b) >= r / 2``.

    ``extra["identity"]`` is the same difference from its closed form and
    ``extra["identity_error"]`` the discrepancy between the two.
    """
    a, b = _finite_pair(a, b)
    r = _positive(r)
    outer, inner = g_standard(a - r, b + r), g_standard(a, b)
    lhs = outer - inner
    identity = borell_identity_standard(a, b, r)
    return _gap(
        lhs,
        0.5 * r,
        tol.gap,
        _rounding(outer, inner),
        identity=identity,
        identity_error=abs(identity - lhs),
    )


def borell_gap_strong_standard(a, b, r, tol: Tolerances = DEFAULT) -> GapResult:
    """``g(a - r, b + r) - g(a, b) >= r``, asserted when ``g(a, b) <= -r / 2``."""
    a, b = _finite_pair(a, b)
    r = _positive(r)
    outer, inner = g_standard(a - r, b + r), g_standard(a, b)
    return _gap(outer - inner, r, tol.gap, _rounding(outer, inner), hypothesis_met=inner <= -0.5 * r, g=inner)


def landau_shepp_standard(a, b, r, tol: Tolerances = DEFAULT) -> GapResult:
    """``g(ra, rb) >= r g(a, b)``, which holds exactly when ``r >= 1``.

    The gap equals ``(r**2 - 1) / (r (b - a))``; it is stored in
    ``extra["identity"]``.  ``extra["iff_consistent"]`` is true when the sign
    of the gap agrees with ``r >= 1`` or the gap lies in the equality band.
    """
    a, b = _finite_pair(a, b)
    r = _positive(r)
    lhs, rhs = g_standard(r * a, r * b), r * g_standard(a, b)
    identity = (r * r - 1.0) / (r * (b - a))
    res = _gap(lhs, rhs, tol.gap, _rounding(lhs, rhs), hypothesis_met=r >= 1.0, identity=identity)
    res.extra["identity_error"] = abs(res.margin - identity)
    res.extra["iff_consistent"] = (res.passed == (r >= 1.0)) or abs(res.margin) <= tol.equality_band + res.extra["rounding"]
    return res


# -- general family -----------------------------------------------------------------


def borell_gap_general(params: MeasureParams, a, b, r, tol: Tolerances = DEFAULT) -> GapResult:
    """``g(a - r, b + r) - g(a, b) >= r / 2**(1/n)``."""
    a, b = _finite_pair(a, b)
    r = _positive(r)
    outer, inner = _value(params, a - r, b + r), _value(params, a, b)
    return _gap(outer - inner, r * 2.0 ** (-1.0 / params.n), tol.gap, _rounding(outer, inner))


def borell_differential_margin(params: MeasureParams, a, b, tol: Tolerances = DEFAULT) -> GapResult:
    """``f(a) + f(b) >= f(g) / 2**(1/n)``, the infinitesimal Borell inequality."""
    a, b = _finite_pair(a, b)
    g = _value(params, a, b)
    lhs = density(params, a) + density(params, b)
    return _gap(lhs, 2.0 ** (-1.0 / params.n) * density(params, g), tol.gap, 0.0, g=g)


def borell_gap_strong_general(params: MeasureParams, a, b, r, tol: Tolerances = DEFAULT) -> GapResult:
    """``g(a - r, b + r) - g(a, b) >= r`` for small ``r`` when ``mass(a, b) < 1/2``.

    "Small" is made concrete by checking ``(f(a - t) + f(b + t)) / f(g(a - t, b + t)) >= 1``
    on an evenly spaced grid of ``t`` in ``[0, r]``; when it holds everywhere
    the integrated inequality follows.  ``extra["supremal_r"]`` is the last
    grid point before the first violation (``r`` if there is none) and
    ``extra["first_failure"]`` the violating ``t`` or ``None``.
    """
    a, b = _finite_pair(a, b)
    r = _positive(r)
    outer, inner = _value(params, a - r, b + r), _value(params, a, b)
    mass = mass_pair(params, a, b)[0]
    first_failure = None
    supremal = r
    if mass < 0.5:
        ts = np.linspace(0.0, r, tol.strong_path_points)
        for k, t in enumerate(ts):
            g = _value(params, a - t, b + t)
            # slope of t -> g(a - t, b + t); compared as a ratio because the
            # densities themselves can be far below any absolute tolerance
            slope = (weight(params, a - t) + weight(params, b + t)) / weight(params, g)
            # only rounding is forgiven: a slack of order tol would integrate
            # to a deficit of order r * tol over the path
            if slope < 1.0 - 64.0 * (params.n + 1) * _EPS:
                first_failure = float(t)
                supremal = float(ts[k - 1]) if k else 0.0
                break
    path_ok = mass < 0.5 and first_failure is None
    return _gap(
        outer - inner,
        r,
        tol.gap,
        _rounding(outer, inner),
        hypothesis_met=path_ok,
        mass=mass,
        mass_below_half=mass < 0.5,
        supremal_r=supremal,
        first_failure=first_failure,
    )


def landau_shepp_general(params: MeasureParams, a, b, r, tol: Tolerances = DEFAULT) -> GapResult:
    """``g(ra, rb) >= r g(a, b)``, which holds exactly when ``r >= 1``."""
    a, b = _finite_pair(a, b)
    r = _positive(r)
    lhs, rhs = _value(params, r * a, r * b), r * _value(params, a, b)
    res = _gap(lhs, rhs, tol.gap, _rounding(lhs, rhs), hypothesis_met=r >= 1.0)
    res.extra["iff_consistent"] = (res.passed == (r >= 1.0)) or abs(res.margin) <= tol.equality_band + res.extra["rounding"]
    return res


def landau_shepp_monotone(
    params: MeasureParams, a, b, r_max: float = 100.0, points: int = 64, tol: float = 1e-8
) -> GapResult:
    """``r -> g(ra, rb) / r`` is non-decreasing on a log grid over ``[1, r_max]``.

    The margin is the smallest successive difference.
    """
    a, b = _finite_pair(a, b)
    rs = np.geomspace(1.0, r_max, points)
    values = np.array([_value(params, r * a, r * b) / r for r in rs])
    diffs = np.diff(values)
    k = int(np.argmin(diffs))
    # forming r*a and r*b perturbs the width b - a by about eps (|a| + |b|)
    cond = max(1.0, (abs(a) + abs(b)) / (b - a))
    rounding = _rounding(values[k], values[k + 1]) * cond
    return _gap(float(diffs[k]), 0.0, tol, rounding, worst_r=float(rs[k]))


def landau_shepp_differential_margin(params: MeasureParams, a, b, tol: Tolerances = DEFAULT) -> GapResult:
    """``-a f(a) + b f(b) >= g f(g)``."""
    a, b = _finite_pair(a, b)
    g = _value(params, a, b)
    lhs = -a * density(params, a) + b * density(params, b)
    rhs = g * density(params, g)
    return _gap(lhs, rhs, tol.gap, _rounding(a * density(params, a), b * density(params, b), rhs), g=g)


# -- proof auxiliaries -----------------------------------------------------------------


def p1_threshold(params: MeasureParams) -> float:
    """``p1 = sqrt((1 + alpha**2) (2**(2/n) - 1))``."""
    return math.sqrt(params.scale_sq * math.expm1(2.0 * math.log(2.0) / params.n))


def z_value(params: MeasureParams, p: float) -> float:
    """The ``z >= 0`` with ``2 ((s2 + z**2) / (s2 + p**2)) ** ((n+1)/2) = 2**(-1/n)``."""
    s2 = params.scale_sq
    z2 = (s2 + p * p) * 2.0 ** (-2.0 / params.n) - s2
    if z2 < 0.0 and p >= p1_threshold(params):
        # rounding at p == p1
        return 0.0
    if z2 < 0.0:
        raise DomainError(f"z(p) is undefined for p < p1 = {p1_threshold(params)!r}, got {p!r}")
    return math.sqrt(z2)


def _chi(params: MeasureParams, x: float) -> float:
    return x * (params.scale_sq + x * x) ** (0.5 * (params.n - 1))


def chi_half_point(params: MeasureParams, p: float) -> float:
    """The ``x`` in ``(0, p)`` with ``chi(x) = chi(p) / 2``."""
    s2 = params.scale_sq
    m = params.n - 1
    if m == 0:
        return 0.5 * p
    target = 0.5 * _chi(params, p)
    return _bracketed_newton(
        lambda x: _chi(params, x) - target,
        lambda x: (s2 + x * x) ** (0.5 * m - 1.0) * (s2 + (m + 1) * x * x),
        0.0,
        p,
        0.5 * p,
    )


def phi(n: int, p: float) -> float:
    """``(1 + p**(n+1)) / (1 + p**2) ** ((n+1)/2)``."""
    return (1.0 + p ** (n + 1)) / (1.0 + p * p) ** (0.5 * (n + 1))


def y_value(n: int, p: float):
    """The ``y > 0`` with ``(1 + p**(n+1)) ((1 + y**2) / (1 + p**2)) ** ((n+1)/2) = 2**(-1/n)``.

    Returns ``None`` where no positive solution exists.
    """
    one_plus = (1.0 + p * p) * (2.0 ** (-1.0 / n) / (1.0 + p ** (n + 1))) ** (2.0 / (n + 1))
    if one_plus <= 1.0:
        return None
    return math.sqrt(one_plus - 1.0)


def lambda_value(n: int, p: float) -> float:
    """``2 int_0^p w - int_{-inf}^{p / 2**(1/n)} w`` for ``w = (1 + t**2) ** (-(n+1)/2)``.

    In terms of the tail function ``T`` this is ``Z (T(p / 2**(1/n)) - 2 T(p))``
    with ``Z`` the total mass of ``w``, which avoids cancellation for large ``p``.
    """
    base = MeasureParams(0.0, n)
    total = 2.0 * _wallis(n - 1)
    return total * (tail(base, p * 2.0 ** (-1.0 / n)) - 2.0 * tail(base, p))


def lambda_prime(n: int, p: float) -> float:
    return 2.0 * (1.0 + p * p) ** (-0.5 * (n + 1)) - 2.0 * (2.0 ** (2.0 / n) + p * p) ** (-0.5 * (n + 1))


def h_prime(params: MeasureParams, p: float) -> float:
    """``h'(p) = 2 ((s2 + h**2) / (s2 + p**2)) ** ((n+1)/2)``."""
    s2 = params.scale_sq
    hp = h(params, p)
    return 2.0 * ((s2 + hp * hp) / (s2 + p * p)) ** (0.5 * (params.n + 1))


@dataclass(frozen=True)
class AuxiliaryRecord:
    """Auxiliary functions of the Borell and Landau-Shepp arguments at one ``p``.

    ``lam`` and ``lam_prime`` always refer to ``alpha = 0`` with the same ``n``.
    ``flags`` maps each checked property to ``True``/``False`` or ``None``
    when it does not apply at this ``p``.
    """

    params: MeasureParams
    p: float
    p1: float
    z: float | None
    x: float
    phi: float
    y: float | None
    lam: float
    lam_prime: float
    h: float
    h_prime: float
    h_prime_fd: float
    flags: dict

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in ("p", "p1", "z", "x", "phi", "y", "lam", "lam_prime", "h", "h_prime", "h_prime_fd")}
        out["params"] = self.params.to_dict()
        out["flags"] = dict(self.flags)
        return out


def proof_auxiliaries(params: MeasureParams, p: float, tol: Tolerances = DEFAULT) -> AuxiliaryRecord:
    p = _positive(p)
    n = params.n
    p1 = p1_threshold(params)
    z = z_value(params, p) if p >= p1 else None
    x = chi_half_point(params, p)
    hp = h(params, p)
    dh = h_prime(params, p)
    step = tol.jacobian_step * min(p, math.hypot(params.scale, p))
    dh_fd = float(central_gradient(lambda v: h(params, v[0]), [p], [step])[0])
    ph = phi(n, p)
    y = y_value(n, p) if p >= 1.0 else None
    lam = lambda_value(n, p)
    lam_d = lambda_prime(n, p)
    bound = 2.0 ** (-1.0 / n)
    chi_p = _chi(params, p)
    phi_one = phi(n, 1.0)
    flags = {
        "h_ge_z_ge_0": None if z is None else hp >= z - tol.gap * max(1.0, abs(hp)),
        "chi_half": abs(2.0 * _chi(params, x) - chi_p) <= tol.root_residual * chi_p,
        "lambda_nonpositive": lam <= 1e-10,
        "lambda_prime_nonnegative": lam_d >= -1e-10,
        "phi_min_at_one": ph >= phi_one * (1.0 - 1e-15),
        # phi(1) = 2**((1-n)/2) which equals 2**(-1/n) at n = 2 and is smaller beyond
        "phi_one_below_bound": None if n == 1 else phi_one <= bound * (1.0 + 1e-15),
        "h_prime_matches_fd": abs(dh - dh_fd) <= 1e-6 * abs(dh),
        "h_ratio_bound": hp / p <= bound + 1e-9,
        "y_le_h": None,
    }
    if y is not None:
        # y is compared with g(-1/p, p) at alpha = 0, not with h(p)
        flags["y_le_h"] = y <= _value(MeasureParams(0.0, n), -1.0 / p, p) + tol.gap
    return AuxiliaryRecord(params, p, p1, z, x, ph, y, lam, lam_d, hp, dh, dh_fd, flags)
