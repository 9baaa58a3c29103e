"""Numerical tolerances shared by every module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    quantile_residual: float = 1e-12
    root_residual: float = 1e-12
    gap: float = 1e-9
    equality_band: float = 1e-9
    nsd_relative: float = 1e-7
    fd_step: float = 1e-5
    jacobian_step: float = 1e-3
    symmetry: float = 1e-8
    shrink_step: float = 1e-6
    strong_path_points: int = 256


DEFAULT = Tolerances()
