"""Interval-transfer maps.

``g(a, b)`` is the right end of the half-line ``(-inf, g)`` whose mass equals
that of ``(a, b)``; ``g*(a, b)`` is the half-width of the centred interval with
the same mass.  For the standard Cauchy law both have closed forms; for the
general family they are obtained by inverting the distribution function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .density import (
    NEG_INF,
    DomainError,
    MeasureParams,
    as_extended,
    mass_pair,
    quantile_from_pair,
    tail,
    tail_inverse,
)

__all__ = [
    "Method",
    "TransferResult",
    "g_general",
    "g_standard",
    "g_star_from_g",
    "g_star_general",
    "g_star_standard",
    "h",
    "scaling_identity_residual",
]


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    ROOT_FIND = "root_find"


@dataclass(frozen=True)
class TransferResult:
    """A transfer value with provenance.

    ``residual`` is the absolute mismatch between the mass that defines the
    value and the mass actually carried by the returned half-line or interval.
    """

    value: object
    method: Method
    residual: float = 0.0

    @property
    def is_neg_inf(self) -> bool:
        return self.value is NEG_INF

    def to_dict(self) -> dict:
        value = "-inf" if self.value is NEG_INF else float(self.value)
        return {"value": value, "method": self.method.value, "residual": float(self.residual)}


def _check_order(a, b) -> tuple[object, float]:
    a = as_extended(a)
    b = float(b)
    if not math.isfinite(b):
        raise DomainError(f"right endpoint must be finite, got {b!r}")
    if a is not NEG_INF and a > b:
        raise DomainError(f"need a < b, got ({a!r}, {b!r})")
    return a, b


def g_standard(a, b):
    """``g`` for the standard Cauchy law: ``-(1 + a b) / (b - a)``.

    ``g(-inf, b) = b`` and the empty interval ``a == b`` maps to ``NEG_INF``.
    """
    a, b = _check_order(a, b)
    if a is NEG_INF:
        return b
    if a == b:
        return NEG_INF
    # adding 0.0 turns a signed zero into +0.0
    return -(1.0 + a * b) / (b - a) + 0.0


def g_general(params: MeasureParams, a, b) -> TransferResult:
    """``g`` for any member of the family, by inverting the distribution function."""
    a, b = _check_order(a, b)
    if a is NEG_INF:
        return TransferResult(b, Method.CLOSED_FORM)
    p, q = mass_pair(params, a, b)
    if p == 0.0:
        return TransferResult(NEG_INF, Method.CLOSED_FORM)
    value = quantile_from_pair(params, p, q)
    if value <= 0.0:
        residual = abs(tail(params, -value) - p)
    else:
        residual = abs(tail(params, value) - q)
    # the half-line never reaches past b; rounding can put the root a hair beyond it
    return TransferResult(min(value, b), Method.ROOT_FIND, residual)


def g_star_from_g(g) -> float:
    """``sqrt(1 + g**2) + g`` for the standard law, without cancellation for ``g < 0``.

    From ``1/2 + atan(g) / pi = 2 atan(g*) / pi`` one gets
    ``atan(g*) = pi/4 + atan(g) / 2`` and hence ``g* = sec + tan`` of ``atan(g)``.
    """
    if g is NEG_INF:
        return 0.0
    root = math.hypot(1.0, g)
    return root + g if g >= 0.0 else 1.0 / (root - g)


def g_star_standard(a, b) -> float:
    """``g*`` for the standard Cauchy law."""
    a, b = _check_order(a, b)
    if a is NEG_INF:
        raise DomainError("g_star_standard needs a finite left endpoint")
    return g_star_from_g(g_standard(a, b))


def g_star_general(params: MeasureParams, a, b) -> TransferResult:
    """The ``s >= 0`` with ``mass(-s, s) == mass(a, b)``."""
    a, b = _check_order(a, b)
    p, q = mass_pair(params, a, b)
    if p == 0.0:
        return TransferResult(0.0, Method.CLOSED_FORM)
    # mass(-s, s) = 1 - 2 tail(s), so the complement fixes tail(s) = q / 2
    value = tail_inverse(params, 0.5 * q)
    residual = abs(2.0 * tail(params, value) - q)
    return TransferResult(value, Method.ROOT_FIND, residual)


def h(params: MeasureParams, p: float):
    """``h(p) = g(-p, p)``."""
    p = float(p)
    if not p > 0.0 or not math.isfinite(p):
        raise DomainError(f"h needs a finite p > 0, got {p!r}")
    return g_general(params, -p, p).value


def scaling_identity_residual(alpha: float, n: int, z1: float, z2: float) -> float:
    """``|g_alpha(z1, z2) - s * g_0(z1 / s, z2 / s)|`` with ``s = sqrt(1 + alpha**2)``.

    Both sides use the same ``n``.
    """
    z1, z2 = float(z1), float(z2)
    if not z1 < z2:
        raise DomainError(f"need z1 < z2, got ({z1!r}, {z2!r})")
    params = MeasureParams(alpha, n)
    base = MeasureParams(0.0, n)
    s = params.scale
    lhs = g_general(params, z1, z2).value
    rhs = g_general(base, z1 / s, z2 / s).value
    if lhs is NEG_INF or rhs is NEG_INF:
        return 0.0 if lhs is rhs else math.inf
    return abs(lhs - s * rhs)

