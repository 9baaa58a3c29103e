"""Brute-force reference implementations.

Everything here is computed from the density formula alone: adaptive Simpson
quadrature for masses, pure bisection for transfer values and plain central
differences for derivatives.  Nothing is shared with the closed-form paths in
:mod:`cauchy_iso.density` and :mod:`cauchy_iso.transfer` beyond
:class:`MeasureParams`, so agreement between the two is a real check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .density import MeasureParams, as_extended, NEG_INF, DomainError

__all__ = [
    "QuadratureError",
    "QuadratureSpec",
    "adaptive_simpson",
    "central_gradient",
    "fd_hessian",
    "fd_jacobian",
    "oracle_cdf",
    "oracle_g",
    "oracle_mass",
    "oracle_normalization",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature hit its depth limit before reaching tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`adaptive_simpson`.

    ``abs_tol`` is in probability units; ``rel_tol`` is relative to the size of
    the integral being computed, which matters for far-tail masses.
    ``tail_policy`` selects how infinite ranges are handled: ``"invert"`` maps
    ``|t| > 1`` onto ``u = 1/|t|`` (exact), ``"bound"`` truncates at a radius
    where the power-law tail bound is below ``bound_target`` and adds the bound.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-11
    max_depth: int = 60
    tail_policy: str = "invert"
    bound_target: float = 1e-13


DEFAULT_SPEC = QuadratureSpec()
_EPS = np.finfo(float).eps


def adaptive_simpson(fn, lo: float, hi: float, tol: float, max_depth: int = 60) -> tuple[float, float]:
    """Integrate ``fn`` over ``[lo, hi]`` to absolute tolerance ``tol``.

    Returns ``(value, error_estimate)``.  Raises :class:`QuadratureError` if a
    subinterval needs more than ``max_depth`` bisections.
    """
    if hi == lo:
        return 0.0, 0.0
    if hi < lo:
        value, err = adaptive_simpson(fn, hi, lo, tol, max_depth)
        return -value, err
    f_lo, f_mid, f_hi = fn(lo), fn(0.5 * (lo + hi)), fn(hi)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    total = 0.0
    err_total = 0.0
    # explicit stack: (lo, hi, f_lo, f_mid, f_hi, whole, tol, depth)
    stack = [(lo, hi, f_lo, f_mid, f_hi, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, s_ab, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = fn(lm), fn(rm)
        h6 = (b - a) / 12.0
        left = h6 * (fa + 4.0 * flm + fm)
        right = h6 * (fm + 4.0 * frm + fb)
        delta = left + right - s_ab
        # below this the difference is rounding noise and further halving cannot help
        noise = 64.0 * _EPS * (abs(left) + abs(right))
        if abs(delta) <= max(15.0 * eps, noise) or depth >= max_depth or not a < lm < m < rm < b:
            if abs(delta) > max(15.0 * eps, noise) and a < lm < m < rm < b:
                raise QuadratureError(f"no convergence on [{a!r}, {b!r}] at depth {depth}")
            total += left + right + delta / 15.0
            err_total += abs(delta) / 15.0
            continue
        stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
        stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
    return total, err_total


def _weight_fn(params: MeasureParams):
    s2 = params.scale_sq
    e = -0.5 * (params.n + 1)
    return lambda t: (s2 + t * t) ** e


def _inverted_fn(params: MeasureParams):
    # w(1/u) / u**2 for u = 1/|t|
    s2 = params.scale_sq
    n = params.n
    e = -0.5 * (n + 1)
    return lambda u: u ** (n - 1) * (1.0 + s2 * u * u) ** e


def _integrate(fn, lo: float, hi: float, spec: QuadratureSpec) -> float:
    # rough magnitude first, so that the tolerance can be relative
    rough = abs(adaptive_simpson(fn, lo, hi, math.inf, 0)[0])
    tol = max(spec.rel_tol * rough, 1e-300)
    return adaptive_simpson(fn, lo, hi, tol, spec.max_depth)[0]


def _weight_integral(params: MeasureParams, lo: float, hi: float, spec: QuadratureSpec) -> float:
    """``int_lo^hi w`` with ``lo`` / ``hi`` possibly infinite; split at +-1."""
    if lo >= hi:
        return 0.0
    w = _weight_fn(params)
    inv = _inverted_fn(params)
    pieces = []
    if lo < -1.0:
        # t in (lo, min(hi, -1)) <=> u in (1/|min(hi,-1)|, 1/|lo|)
        top = min(hi, -1.0)
        u_lo = -1.0 / top
        u_hi = 0.0 if lo == -math.inf else -1.0 / lo
        pieces.append(_integrate(inv, u_hi, u_lo, spec))
    c_lo, c_hi = max(lo, -1.0), min(hi, 1.0)
    if c_lo < c_hi:
        pieces.append(_integrate(w, c_lo, c_hi, spec))
    if hi > 1.0:
        bottom = max(lo, 1.0)
        u_hi = 1.0 / bottom
        u_lo = 0.0 if hi == math.inf else 1.0 / hi
        pieces.append(_integrate(inv, u_lo, u_hi, spec))
    return math.fsum(pieces)


def _bounded_total(params: MeasureParams, spec: QuadratureSpec) -> float:
    """Total unnormalised mass by truncation at radius ``T`` plus tail bound."""
    n = params.n
    w = _weight_fn(params)
    core = 2.0 * _integrate(w, 0.0, 1.0, spec)
    # int_T^inf w <= T**-n / n; pick T so that the bound is tiny relative to core
    radius = (1.0 / (n * spec.bound_target * core)) ** (1.0 / n)
    edges = [1.0]
    while edges[-1] < radius:
        edges.append(min(2.0 * edges[-1], radius))
    tol = spec.bound_target * core / len(edges)
    body = math.fsum(
        adaptive_simpson(w, lo, hi, tol, spec.max_depth)[0] for lo, hi in zip(edges, edges[1:])
    )
    return core + 2.0 * body + 2.0 * radius ** (-n) / n


@lru_cache(maxsize=4096)
def _total(params: MeasureParams, spec: QuadratureSpec) -> float:
    if spec.tail_policy == "bound":
        return _bounded_total(params, spec)
    if spec.tail_policy != "invert":
        raise ValueError(f"unknown tail policy {spec.tail_policy!r}")
    return 2.0 * _weight_integral(params, 0.0, math.inf, spec)


def oracle_normalization(params: MeasureParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Normalising constant ``1 / int w`` by quadrature."""
    return 1.0 / _total(params, spec)


def oracle_mass(params: MeasureParams, a, b, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    a = as_extended(a)
    lo = -math.inf if a is NEG_INF else a
    return _weight_integral(params, lo, float(b), spec) / _total(params, spec)


def oracle_cdf(params: MeasureParams, x, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``P(X <= x)`` by quadrature of the density."""
    a = as_extended(x) if not (isinstance(x, float) and x == math.inf) else math.inf
    if a is NEG_INF:
        return 0.0
    if a == math.inf:
        return 1.0
    if a <= 0.0:
        return _weight_integral(params, -math.inf, a, spec) / _total(params, spec)
    return 1.0 - _weight_integral(params, a, math.inf, spec) / _total(params, spec)


def oracle_g(params: MeasureParams, a, b, spec: QuadratureSpec = DEFAULT_SPEC, rel_width: float = 1e-13):
    """Transfer value ``g(a, b)`` by bisection on quadrature masses.

    Returns ``NEG_INF`` for an empty interval.
    """
    a = as_extended(a)
    b = float(b)
    if a is NEG_INF:
        return b
    if a > b:
        raise DomainError(f"need a < b, got ({a!r}, {b!r})")
    if a == b:
        return NEG_INF
    total = _total(params, spec)
    mass = _weight_integral(params, a, b, spec)
    if mass <= 0.5 * total:
        target, sign = mass, 1.0
    else:
        # g > 0: by symmetry solve for -g against the complement, which is
        # integrated directly so that it keeps its relative accuracy
        target = _weight_integral(params, -math.inf, a, spec) + _weight_integral(params, b, math.inf, spec)
        sign = -1.0
    w = _weight_fn(params)

    # bracket on the negative half-line: F(lo) <= target <= F(hi), F = lower tail
    hi, lo = 0.0, -1.0
    f_lo = _weight_integral(params, -math.inf, lo, spec)
    while f_lo > target:
        hi = lo
        lo *= 2.0
        if lo < -1e300:
            raise QuadratureError("bisection bracket escaped")
        f_lo = _weight_integral(params, -math.inf, lo, spec)
    # F(mid) = F(lo) + int_lo^mid w; each step only integrates a short piece
    while hi - lo > rel_width * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        f_mid = f_lo + _integrate(w, lo, mid, spec)
        if f_mid > target:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return sign * 0.5 * (lo + hi)


# -- finite differences ------------------------------------------------------------


def central_gradient(fn, x, steps) -> np.ndarray:
    """Central differences with one Richardson level: ``(4 D(h/2) - D(h)) / 3``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        h = steps[j]

        def diff(step):
            e[:] = 0.0
            e[j] = step
            return (fn(x + e) - fn(x - e)) / (2.0 * step)

        out[j] = (4.0 * diff(0.5 * h) - diff(h)) / 3.0
    return out


def fd_jacobian(fn, x, steps) -> np.ndarray:
    """Jacobian of a vector function by Richardson-extrapolated central differences."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        h = steps[j]

        def diff(step):
            e = np.zeros_like(x)
            e[j] = step
            return (np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2.0 * step)

        cols.append((4.0 * diff(0.5 * h) - diff(h)) / 3.0)
    return np.column_stack(cols)


def fd_hessian(fn, x, steps) -> np.ndarray:
    """Hessian of a scalar function from second differences of its values.

    Uses one Richardson level and returns the symmetrised matrix.
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    f0 = fn(x)

    def second(i, j, hi, hj):
        ei = np.zeros(d)
        ej = np.zeros(d)
        ei[i] = hi
        ej[j] = hj
        if i == j:
            return (fn(x + ei) - 2.0 * f0 + fn(x - ei)) / (hi * hi)
        return (fn(x + ei + ej) - fn(x + ei - ej) - fn(x - ei + ej) + fn(x - ei - ej)) / (4.0 * hi * hj)

    h = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            coarse = second(i, j, steps[i], steps[j])
            fine = second(i, j, 0.5 * steps[i], 0.5 * steps[j])
            h[i, j] = h[j, i] = (4.0 * fine - coarse) / 3.0
    return 0.5 * (h + h.T)
