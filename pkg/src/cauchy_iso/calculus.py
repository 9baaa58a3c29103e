"""Derivatives of the transfer map and the concavity criteria built on them.

All formulas are normalisation-free.  With ``s2 = 1 + alpha**2`` and
``rho(x) = f(x) / f(g) = ((s2 + g**2) / (s2 + x**2)) ** ((n + 1) / 2)``,
differentiating ``F(g) = F(b) - F(a)`` gives

    g_a = -rho(a),  g_b = rho(b)

and once more, using ``f'(x) / f(x) = -(n + 1) x / (s2 + x**2)``,

    g_aa = (n+1) a / (s2+a**2) rho(a) + (n+1) g / (s2+g**2) rho(a)**2
    g_bb = -(n+1) b / (s2+b**2) rho(b) + (n+1) g / (s2+g**2) rho(b)**2
    g_ab = -(n+1) g / (s2+g**2) rho(a) rho(b)

The ``alpha`` direction follows from ``g_alpha(a, b) = s g_0(a / s, b / s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT, Tolerances
from .density import NEG_INF, DomainError, MeasureParams, as_extended
from .oracle import fd_jacobian
from .transfer import g_general

_EPS = float(np.finfo(float).eps)

__all__ = [
    "HessianReport",
    "UndefinedDerivativeError",
    "Verdict",
    "chi",
    "chi_criterion_margin",
    "dg_dalpha",
    "grad_g",
    "hessian_g_general",
    "hessian_g_standard",
    "hessian_joint",
    "joint_gradient",
    "midpoint_concavity_margin",
]


class UndefinedDerivativeError(DomainError):
    """The transfer value is ``-inf`` so its derivatives do not exist."""


class Verdict(str, Enum):
    NEGATIVE_SEMIDEFINITE = "negative_semidefinite"
    INDEFINITE = "indefinite"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class HessianReport:
    matrix: np.ndarray
    eigen_max: float
    determinant: float
    verdict: Verdict
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "eigen_max": float(self.eigen_max),
            "determinant": float(self.determinant),
            "verdict": self.verdict.value,
            "extras": {k: _plain(v) for k, v in self.extras.items()},
        }


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    return value


def _report(matrix, determinant=None, noise=0.0, tol: Tolerances = DEFAULT, **extras) -> HessianReport:
    matrix = np.asarray(matrix, dtype=float)
    matrix = 0.5 * (matrix + matrix.T)
    if not np.all(np.isfinite(matrix)):
        return HessianReport(matrix, math.nan, math.nan, Verdict.INCONCLUSIVE, extras)
    eigen_max = float(np.linalg.eigvalsh(matrix)[-1])
    if determinant is None:
        determinant = float(np.linalg.det(matrix))
    threshold = tol.nsd_relative * (1.0 + float(np.abs(matrix).sum(axis=1).max()))
    if eigen_max <= threshold:
        verdict = Verdict.NEGATIVE_SEMIDEFINITE
    elif eigen_max <= threshold + noise:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.INDEFINITE
    extras.setdefault("threshold", threshold)
    return HessianReport(matrix, eigen_max, float(determinant), verdict, extras)


def _finite_pair(a, b) -> tuple[float, float]:
    a = as_extended(a)
    if a is NEG_INF:
        raise UndefinedDerivativeError("derivatives need a finite left endpoint")
    b = float(b)
    if not a < b:
        raise DomainError(f"need a < b, got ({a!r}, {b!r})")
    return a, b


def _transfer(params: MeasureParams, a: float, b: float) -> float:
    g = g_general(params, a, b).value
    if g is NEG_INF:
        raise UndefinedDerivativeError(f"g({a!r}, {b!r}) is -inf")
    return g


def _ratio(params: MeasureParams, x: float, g: float) -> float:
    s2 = params.scale_sq
    return ((s2 + g * g) / (s2 + x * x)) ** (0.5 * (params.n + 1))


def grad_g(params: MeasureParams, a, b) -> tuple[float, float]:
    """``(dg/da, dg/db) = (-f(a) / f(g), f(b) / f(g))``."""
    a, b = _finite_pair(a, b)
    g = _transfer(params, a, b)
    return -_ratio(params, a, g), _ratio(params, b, g)


def _second_derivatives(params: MeasureParams, a: float, b: float, g: float):
    """``(g_aa, g_ab, g_bb)`` and the matching sums of absolute term values.

    The second triple is the scale that rounding errors are measured against:
    when ``g`` is close to ``-a`` the two terms of ``g_aa`` nearly cancel.
    """
    s2 = params.scale_sq
    k = params.n + 1
    ra, rb = _ratio(params, a, g), _ratio(params, b, g)
    lg = k * g / (s2 + g * g)
    ta, tga = k * a / (s2 + a * a) * ra, lg * ra * ra
    tb, tgb = -k * b / (s2 + b * b) * rb, lg * rb * rb
    g_ab = -lg * ra * rb
    values = (ta + tga, g_ab, tb + tgb)
    scales = (abs(ta) + abs(tga), abs(g_ab), abs(tb) + abs(tgb))
    return values, scales


def hessian_g_standard(a, b) -> HessianReport:
    """Closed-form Hessian of ``-(1 + ab) / (b - a)``.

    The determinant is ``4 / (b - a)**4``.  ``extras["bracket"]`` holds
    ``((1 + a**2)(1 + b**2) - (1 + ab)**2) / (b - a)**6``, which is a quarter of it.
    """
    a, b = _finite_pair(a, b)
    d = b - a
    d3 = d**3
    matrix = np.array(
        [
            [-2.0 * (1.0 + b * b) / d3, 2.0 * (1.0 + a * b) / d3],
            [2.0 * (1.0 + a * b) / d3, -2.0 * (1.0 + a * a) / d3],
        ]
    )
    bracket = ((1.0 + a * a) * (1.0 + b * b) - (1.0 + a * b) ** 2) / d**6
    return _report(matrix, determinant=4.0 / d**4, bracket=bracket)


def chi(params: MeasureParams, x: float) -> float:
    """``(1 / f)'`` up to a positive constant: ``x (s2 + x**2) ** ((n - 1) / 2)``."""
    x = float(x)
    return x * (params.scale_sq + x * x) ** (0.5 * (params.n - 1))


def chi_criterion_margin(params: MeasureParams, a, b, *, sentinel: bool = True) -> float:
    """``chi(a) chi(b) / (chi(a) - chi(b)) - chi(g(a, b))``.

    When ``a < 0 < b`` and ``g < 0`` the left side is positive and the right
    side negative, so the criterion holds trivially; ``math.inf`` is returned
    unless ``sentinel`` is false.
    """
    a, b = _finite_pair(a, b)
    ca, cb = chi(params, a), chi(params, b)
    if ca == cb:
        raise DomainError(f"chi(a) == chi(b) at ({a!r}, {b!r})")
    g = _transfer(params, a, b)
    if sentinel and a < 0.0 < b and g < 0.0:
        return math.inf
    return ca * cb / (ca - cb) - chi(params, g)


def _fd_steps(params: MeasureParams, x, a: float, b: float, tol: Tolerances) -> list[float]:
    # differences of the analytic gradient: the step is a fixed fraction of the
    # local length scale, which is the interval width or the distance scale
    # hypot(s, x) of the density, whichever is smaller
    s = params.scale
    return [tol.jacobian_step * min(b - a, math.hypot(s, v)) for v in x]


def hessian_g_general(params: MeasureParams, a, b, tol: Tolerances = DEFAULT) -> HessianReport:
    """Hessian in ``(a, b)`` from the analytic second derivatives.

    ``extras["fd_matrix"]`` is the central-difference Jacobian of the
    gradient and ``extras["fd_discrepancy"]`` its largest deviation from the
    analytic matrix, divided by ``extras["term_scale"]``, the largest sum of
    absolute term values in any entry, after deducting the rounding bound
    ``extras["fd_noise"]`` of the difference quotients.
    """
    a, b = _finite_pair(a, b)
    g = _transfer(params, a, b)
    (g_aa, g_ab, g_bb), scales = _second_derivatives(params, a, b, g)
    matrix = np.array([[g_aa, g_ab], [g_ab, g_bb]])

    def grad(x):
        return np.array(grad_g(params, x[0], x[1]))

    steps = _fd_steps(params, (a, b), a, b, tol)
    fd = fd_jacobian(grad, [a, b], steps)
    fd = 0.5 * (fd + fd.T)
    term_scale = max(max(scales), 1e-300)
    # rounding of the gradient values alone moves each difference quotient by about this much
    fd_noise = 16.0 * _EPS * float(np.max(np.abs(grad([a, b])))) / min(steps)
    excess = max(0.0, float(np.max(np.abs(fd - matrix))) - fd_noise)
    return _report(
        matrix,
        tol=tol,
        fd_matrix=fd,
        fd_discrepancy=excess / term_scale,
        fd_noise=fd_noise,
        term_scale=term_scale,
        g=g,
    )


def dg_dalpha(params: MeasureParams, a, b) -> float:
    """``dg/dalpha = alpha / s2 * (g - a g_a - b g_b)``."""
    a, b = _finite_pair(a, b)
    g = _transfer(params, a, b)
    ga, gb = -_ratio(params, a, g), _ratio(params, b, g)
    return params.alpha / params.scale_sq * (g - a * ga - b * gb)


def joint_gradient(n: int, alpha: float, a: float, b: float) -> np.ndarray:
    """Gradient of ``(alpha, a, b) -> g_|alpha|(a, b)``; odd in ``alpha`` in its first slot."""
    params = MeasureParams(abs(alpha), n)
    g = _transfer(params, a, b)
    ga, gb = -_ratio(params, a, g), _ratio(params, b, g)
    d_alpha = alpha / params.scale_sq * (g - a * ga - b * gb)
    return np.array([d_alpha, ga, gb])


def hessian_joint(n: int, alpha: float, a, b, tol: Tolerances = DEFAULT) -> HessianReport:
    """Hessian of ``(alpha, a, b) -> g_alpha(a, b)`` by finite differences.

    The matrix is the symmetrised central-difference Jacobian of
    :func:`joint_gradient`.  Near ``alpha == 0`` the stencil may straddle zero,
    which is legitimate because ``g`` depends on ``alpha**2`` only.

    For ``alpha > 0`` the second ``alpha`` derivative is compared with
    ``g_alpha / (alpha s2) + alpha**2 / s2**2 * (a**2 g_aa + 2ab g_ab + b**2 g_bb)``
    and the difference, less the rounding bound ``extras["fd_noise"]`` and
    relative to the sum of the absolute values of the terms that make up the
    right side, is stored in ``extras["identity_residual"]``.
    """
    a, b = _finite_pair(a, b)
    alpha = float(alpha)
    if alpha < 0.0:
        raise DomainError(f"alpha must be >= 0, got {alpha!r}")
    params = MeasureParams(alpha, n)
    x = np.array([alpha, a, b])
    steps = [tol.jacobian_step * params.scale] + _fd_steps(params, (a, b), a, b, tol)
    fine = fd_jacobian(lambda v: joint_gradient(n, v[0], v[1], v[2]), x, steps)
    matrix = 0.5 * (fine + fine.T)
    asym = float(np.max(np.abs(fine - fine.T)))
    extras = {"asymmetry": asym}
    if alpha > 0.0:
        g = _transfer(params, a, b)
        (g_aa, g_ab, g_bb), (m_aa, m_ab, m_bb) = _second_derivatives(params, a, b, g)
        s2 = params.scale_sq
        ga, gb = -_ratio(params, a, g), _ratio(params, b, g)
        first = (g - a * ga - b * gb) / (s2 * s2)
        second = alpha * alpha / (s2 * s2) * (a * a * g_aa + 2.0 * a * b * g_ab + b * b * g_bb)
        predicted = first + second
        # both sides carry rounding error proportional to the unsummed terms
        scale = (abs(g) + abs(a * ga) + abs(b * gb)) / (s2 * s2) + alpha * alpha / (s2 * s2) * (
            a * a * m_aa + 2.0 * abs(a * b) * m_ab + b * b * m_bb
        )
        # g itself is only known to about eps max(|g|, s); that error enters dg/dalpha
        # and is divided by the alpha step in the difference quotient
        fd_noise = 16.0 * _EPS * alpha / s2 * (max(abs(g), params.scale) + abs(a * ga) + abs(b * gb)) / steps[0]
        excess = max(0.0, abs(matrix[0, 0] - predicted) - fd_noise)
        extras["identity_predicted"] = predicted
        extras["fd_noise"] = fd_noise
        extras["identity_residual"] = excess / max(scale, 1e-300)
    else:
        extras["identity_residual"] = None
    return _report(matrix, noise=asym, tol=tol, **extras)


def midpoint_concavity_margin(n: int, x, y) -> tuple[float, float]:
    """``g(m) - (g(x) + g(y)) / 2`` at the midpoint ``m`` of two ``(alpha, a, b)`` points.

    Returns the margin and the largest ``|g|`` involved, which bounds the
    rounding error of the difference.  Both points need ``alpha >= 0`` and
    ``a < b``; the set of such points is convex so the midpoint qualifies too.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    values = []
    for point in (x, y, 0.5 * (x + y)):
        alpha, a, b = point
        a, b = _finite_pair(a, b)
        values.append(_transfer(MeasureParams(alpha, n), a, b))
    gx, gy, gm = values
    return gm - 0.5 * (gx + gy), max(abs(gx), abs(gy), abs(gm))
