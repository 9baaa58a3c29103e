"""Seeded sweeps over ``(alpha, n, a, b, r)`` with counterexample shrinking.

Each registered check maps one :class:`Sample` to a :class:`CheckOutcome`.
Margins are normalised so that a check passes exactly when its margin is at
least ``-tol`` for the check's nominal tolerance, whatever scaling was needed
to make that tolerance meaningful in floating point.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import Callable

import numpy as np

from . import calculus, inequalities as ineq
from .config import DEFAULT, Tolerances
from .density import DomainError, MeasureParams, cdf, mass_pair
from .oracle import central_gradient, oracle_cdf, oracle_g
from .transfer import g_general, g_standard, scaling_identity_residual

__all__ = [
    "CHECKS",
    "CheckOutcome",
    "Sample",
    "Status",
    "SweepConfig",
    "VerificationReport",
    "draw_samples",
    "evaluate",
    "report_schema",
    "reports_to_csv",
    "reports_to_json",
    "rows_to_csv",
    "run_sweep",
    "shrink",
    "worker_count",
]

_EPS = float(np.finfo(float).eps)


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    EXPECTED_FAIL = "expected_fail"
    FLAGGED = "flagged"
    ERROR = "error"


@dataclass(frozen=True)
class Sample:
    index: int
    alpha: float
    n: int
    a: float
    b: float
    r: float

    @property
    def params(self) -> MeasureParams:
        return MeasureParams(self.alpha, self.n)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "n": self.n, "a": self.a, "b": self.b, "r": self.r}


@dataclass(frozen=True)
class CheckOutcome:
    status: Status
    margin: float = math.nan
    lhs: float = math.nan
    rhs: float = math.nan
    note: str = ""


@dataclass(frozen=True)
class SweepConfig:
    """Sampling ranges and selection for :func:`run_sweep`.

    ``|a|``, ``b - a`` and ``r`` are log-uniform over their ranges and ``a``
    gets a random sign; ``alpha`` is exactly zero with probability
    ``alpha_zero_weight`` and log-uniform over ``alpha_range`` otherwise;
    ``n`` is uniform over the integers in ``n_range``.
    """

    seed: int = 42
    samples: int = 1000
    alpha_range: tuple[float, float] = (1e-3, 10.0)
    alpha_zero_weight: float = 0.2
    n_range: tuple[int, int] = (1, 8)
    a_range: tuple[float, float] = (1e-3, 1e3)
    width_range: tuple[float, float] = (1e-3, 1e3)
    r_range: tuple[float, float] = (1e-3, 1e3)
    inequalities: tuple[str, ...] = ("all",)
    tolerances: Tolerances = DEFAULT
    shrink: bool = True

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        for name in ("alpha_range", "a_range", "width_range", "r_range"):
            lo, hi = getattr(self, name)
            if not 0.0 < lo <= hi or not math.isfinite(hi):
                raise ValueError(f"{name} must satisfy 0 < lo <= hi < inf, got {(lo, hi)!r}")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise ValueError(f"n_range must satisfy 1 <= lo <= hi, got {(lo, hi)!r}")
        if not 0.0 <= self.alpha_zero_weight <= 1.0:
            raise ValueError("alpha_zero_weight must lie in [0, 1]")
        unknown = set(self.selected()) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")

    def selected(self) -> list[str]:
        names: list[str] = []
        for item in self.inequalities:
            if item == "all":
                names.extend(CHECKS)
            elif item in GROUPS:
                names.extend(GROUPS[item])
            else:
                names.append(item)
        # keep registry order, drop duplicates
        wanted = set(names)
        return [name for name in CHECKS if name in wanted] + sorted(wanted - set(CHECKS))


@dataclass
class VerificationReport:
    inequality: str
    n_samples: int
    n_pass: int = 0
    n_fail: int = 0
    n_expected_fail: int = 0
    n_flagged: int = 0
    n_error: int = 0
    worst_margin: float | None = None
    worst_input: dict | None = None
    ce: dict | None = None
    first_error: str | None = None
    wall_time: float = 0.0
    rows: list = field(default_factory=list, repr=False)

    @property
    def unexpected(self) -> int:
        return self.n_fail + self.n_error

    def to_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "n_samples": self.n_samples,
            "n_pass": self.n_pass,
            "n_fail": self.n_fail,
            "n_expected_fail": self.n_expected_fail,
            "n_flagged": self.n_flagged,
            "n_error": self.n_error,
            "worst_margin": self.worst_margin,
            "worst_input": self.worst_input,
            "ce": self.ce,
            "first_error": self.first_error,
        }


# -- sampling ---------------------------------------------------------------------


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(10.0 ** rng.uniform(math.log10(lo), math.log10(hi)))


def draw_samples(config: SweepConfig) -> list[Sample]:
    """Deterministic sample list; every check sees the same inputs."""
    rng = np.random.default_rng(config.seed)
    out = []
    for i in range(config.samples):
        zero = rng.random() < config.alpha_zero_weight
        alpha = _log_uniform(rng, *config.alpha_range)
        alpha = 0.0 if zero else alpha
        n = int(rng.integers(config.n_range[0], config.n_range[1] + 1))
        sign = 1.0 if rng.random() < 0.5 else -1.0
        a = sign * _log_uniform(rng, *config.a_range)
        width = _log_uniform(rng, *config.width_range)
        r = _log_uniform(rng, *config.r_range)
        out.append(Sample(i, alpha, n, a, a + width, r))
    return out


# -- checks -----------------------------------------------------------------------------


def _from_gap(res: ineq.GapResult, tol: float) -> CheckOutcome:
    # normalise so that the pass threshold is exactly -tol
    scale = 1.0 + res.extra.get("rounding", 0.0) / tol
    if not res.hypothesis_met:
        status = Status.FLAGGED
    else:
        status = Status.PASS if res.passed else Status.FAIL
    return CheckOutcome(status, res.margin / scale, res.lhs, res.rhs)


def _with_tol(tol: Tolerances, value: float) -> Tolerances:
    return replace(tol, gap=value)


def check_borell_standard(s: Sample, tol: Tolerances) -> CheckOutcome:
    res = ineq.borell_gap_standard(s.a, s.b, s.r, tol)
    out = _from_gap(res, tol.gap)
    # the closed-form identity agrees with the direct difference up to rounding of g
    cond = max(1.0, (abs(s.a) + abs(s.b)) / (s.b - s.a))
    bound = 1e-10 * (1.0 + abs(g_standard(s.a - s.r, s.b + s.r)) + abs(g_standard(s.a, s.b))) * cond
    if res.extra["identity_error"] > bound:
        return replace(out, status=Status.FAIL, note="identity mismatch")
    return out


def check_borell_strong_standard(s: Sample, tol: Tolerances) -> CheckOutcome:
    return _from_gap(ineq.borell_gap_strong_standard(s.a, s.b, s.r, tol), tol.gap)


def _iff_outcome(res: ineq.GapResult, r: float, tol: Tolerances) -> CheckOutcome:
    out = _from_gap(replace(res, hypothesis_met=True), tol.gap)
    if not res.extra["iff_consistent"]:
        return replace(out, status=Status.FAIL, note="sign disagrees with r >= 1")
    if r < 1.0:
        # the inequality is known not to hold here; a gap inside the tolerance
        # band is too small to resolve, and a clearly positive one is caught above
        return replace(out, status=Status.EXPECTED_FAIL)
    return replace(out, status=Status.PASS)


def check_landau_shepp_standard(s: Sample, tol: Tolerances) -> CheckOutcome:
    res = ineq.landau_shepp_standard(s.a, s.b, s.r, tol)
    out = _iff_outcome(res, s.r, tol)
    # rounding r*a and r*b costs about eps (|a| + |b|) / (b - a) relative to g
    cond = max(1.0, (abs(s.a) + abs(s.b)) / (s.b - s.a))
    bound = 1e-12 * (1.0 + abs(res.lhs) + abs(res.rhs)) * cond
    if res.extra["identity_error"] > bound:
        return replace(out, status=Status.FAIL, note="identity mismatch")
    return out


def check_landau_shepp_general(s: Sample, tol: Tolerances) -> CheckOutcome:
    return _iff_outcome(ineq.landau_shepp_general(s.params, s.a, s.b, s.r, tol), s.r, tol)


def check_borell_general(s: Sample, tol: Tolerances) -> CheckOutcome:
    t = _with_tol(tol, 1e-8)
    return _from_gap(ineq.borell_gap_general(s.params, s.a, s.b, s.r, t), t.gap)


def check_borell_differential(s: Sample, tol: Tolerances) -> CheckOutcome:
    t = _with_tol(tol, 1e-10)
    return _from_gap(ineq.borell_differential_margin(s.params, s.a, s.b, t), t.gap)


def check_borell_strong_general(s: Sample, tol: Tolerances) -> CheckOutcome:
    res = ineq.borell_gap_strong_general(s.params, s.a, s.b, s.r, tol)
    return _from_gap(res, tol.gap)


def check_landau_shepp_monotone(s: Sample, tol: Tolerances) -> CheckOutcome:
    return _from_gap(ineq.landau_shepp_monotone(s.params, s.a, s.b, tol=1e-8), 1e-8)


def check_landau_shepp_differential(s: Sample, tol: Tolerances) -> CheckOutcome:
    return _from_gap(ineq.landau_shepp_differential_margin(s.params, s.a, s.b, tol), tol.gap)


def check_chi_criterion(s: Sample, tol: Tolerances) -> CheckOutcome:
    p = s.params
    margin = calculus.chi_criterion_margin(p, s.a, s.b)
    if margin == math.inf:
        return CheckOutcome(Status.PASS, math.inf, note="automatic")
    ca, cb = calculus.chi(p, s.a), calculus.chi(p, s.b)
    lhs = ca * cb / (ca - cb)
    # chi grows like |x|**n, so the tolerance is taken relative to the terms
    scale = max(1.0, abs(lhs))
    status = Status.PASS if margin >= -tol.gap * scale else Status.FAIL
    return CheckOutcome(status, margin / scale, lhs, lhs - margin)


def _verdict_outcome(report: calculus.HessianReport) -> CheckOutcome:
    threshold = report.extras["threshold"]
    margin = (threshold - report.eigen_max) / threshold * 1e-7
    status = {
        calculus.Verdict.NEGATIVE_SEMIDEFINITE: Status.PASS,
        calculus.Verdict.INCONCLUSIVE: Status.FLAGGED,
        calculus.Verdict.INDEFINITE: Status.FAIL,
    }[report.verdict]
    return CheckOutcome(status, margin, report.eigen_max, threshold)


def check_concavity_general(s: Sample, tol: Tolerances) -> CheckOutcome:
    report = calculus.hessian_g_general(s.params, s.a, s.b, tol)
    out = _verdict_outcome(report)
    if out.status is Status.PASS and report.extras["fd_discrepancy"] > 1e-6:
        return replace(out, status=Status.FAIL, note="analytic Hessian disagrees with differences")
    return out


def check_concavity_joint(s: Sample, tol: Tolerances) -> CheckOutcome:
    report = calculus.hessian_joint(s.n, s.alpha, s.a, s.b, tol)
    out = _verdict_outcome(report)
    residual = report.extras["identity_residual"]
    if out.status is Status.PASS and residual is not None and residual > 1e-5:
        return replace(out, status=Status.FAIL, note="second alpha derivative identity")
    return out


def check_midpoint_concavity(s: Sample, tol: Tolerances) -> CheckOutcome:
    """Pairs the sample with its mirror ``(alpha', a', b')`` drawn from the same coordinates."""
    other = (s.r % 10.0, -s.b / (1.0 + s.r), -s.a / (1.0 + s.r))
    margin, size = calculus.midpoint_concavity_margin(s.n, (s.alpha, s.a, s.b), other)
    scale = max(1.0, size)
    status = Status.PASS if margin >= -tol.gap * scale else Status.FAIL
    return CheckOutcome(status, margin / scale, margin, 0.0)


def check_gradient(s: Sample, tol: Tolerances) -> CheckOutcome:
    p = s.params
    grad = calculus.grad_g(p, s.a, s.b)
    steps = [min(tol.fd_step * max(1.0, abs(x)), tol.jacobian_step * (s.b - s.a)) for x in (s.a, s.b)]
    fd = central_gradient(lambda v: g_general(p, v[0], v[1]).value, [s.a, s.b], steps)
    scale = max(abs(grad[0]), abs(grad[1]))
    err = max(abs(fd[0] - grad[0]), abs(fd[1] - grad[1])) / scale
    status = Status.PASS if err <= 1e-6 else Status.FAIL
    return CheckOutcome(status, -err, grad[0], grad[1])


def check_scaling_identity(s: Sample, tol: Tolerances) -> CheckOutcome:
    residual = scaling_identity_residual(s.alpha, s.n, s.a, s.b)
    g = g_general(s.params, s.a, s.b).value
    # rounding z / s moves g by about |dg/dz| ulp(z); measured relative to |g|
    scale = max(1.0, abs(g))
    status = Status.PASS if residual <= 1e-9 * scale else Status.FAIL
    return CheckOutcome(status, -residual / scale, residual, 1e-9 * scale)


def check_alpha_monotone(s: Sample, tol: Tolerances) -> CheckOutcome:
    """``g`` at ``alpha`` and ``alpha + 0.1`` must strictly decrease."""
    g0 = g_general(MeasureParams(s.alpha, s.n), s.a, s.b).value
    g1 = g_general(MeasureParams(s.alpha + 0.1, s.n), s.a, s.b).value
    step = g1 - g0
    # near p = 1/2 the quantile's absolute error is set by 1/f(g) ~ s, not by |g|
    resolution = 16.0 * _EPS * max(abs(g0), abs(g1), math.hypot(1.0, s.alpha + 0.1))
    if step < -1e-12:
        status = Status.PASS
    elif step <= resolution:
        # a decrease below the resolution of g cannot be seen in floating point
        status = Status.FLAGGED
    else:
        status = Status.FAIL
    return CheckOutcome(status, -step, g0, g1)


def check_oracle(s: Sample, tol: Tolerances) -> CheckOutcome:
    p = s.params
    cdf_err = abs(oracle_cdf(p, s.a) - cdf(p, s.a))
    g = g_general(p, s.a, s.b).value
    g_err = abs(oracle_g(p, s.a, s.b) - g) / max(1.0, abs(g))
    worst = max(cdf_err / 1e-9, g_err / 1e-8)
    status = Status.PASS if worst <= 1.0 else Status.FAIL
    return CheckOutcome(status, -worst * 1e-9, cdf_err, g_err)


def check_extremal(s: Sample, tol: Tolerances) -> CheckOutcome:
    rep = ineq.classify_extremal(s.a, s.b)
    return CheckOutcome(Status.PASS if rep.ordering_holds else Status.FAIL, 0.0, rep.per_interval, rep.per_half_line)


def check_auxiliaries(s: Sample, tol: Tolerances) -> CheckOutcome:
    p = min(abs(s.a), 1e3)
    rec = ineq.proof_auxiliaries(s.params, p, tol)
    bad = [k for k, v in rec.flags.items() if v is False]
    if mass_pair(s.params, -rec.p1, rec.p1)[0] < 0.5 - 1e-10:
        bad.append("p1_mass")
    return CheckOutcome(Status.FAIL if bad else Status.PASS, 0.0, note=",".join(bad))


CHECKS: dict[str, Callable[[Sample, Tolerances], CheckOutcome]] = {
    "borell_standard": check_borell_standard,
    "borell_strong_standard": check_borell_strong_standard,
    "landau_shepp_standard": check_landau_shepp_standard,
    "borell_general": check_borell_general,
    "borell_differential": check_borell_differential,
    "borell_strong_general": check_borell_strong_general,
    "landau_shepp_general": check_landau_shepp_general,
    "landau_shepp_monotone": check_landau_shepp_monotone,
    "landau_shepp_differential": check_landau_shepp_differential,
    "chi_criterion": check_chi_criterion,
    "concavity_general": check_concavity_general,
    "concavity_joint": check_concavity_joint,
    "midpoint_concavity": check_midpoint_concavity,
    "gradient": check_gradient,
    "scaling_identity": check_scaling_identity,
    "alpha_monotone": check_alpha_monotone,
    "oracle": check_oracle,
    "extremal": check_extremal,
    "auxiliaries": check_auxiliaries,
}

GROUPS: dict[str, list[str]] = {
    "borell": ["borell_standard", "borell_strong_standard", "borell_general", "borell_differential", "borell_strong_general"],
    "landau_shepp": ["landau_shepp_standard", "landau_shepp_general", "landau_shepp_monotone", "landau_shepp_differential"],
    "concavity": ["chi_criterion", "concavity_general", "concavity_joint", "midpoint_concavity", "gradient"],
}


def evaluate(name: str, sample: Sample, tol: Tolerances = DEFAULT) -> CheckOutcome:
    """Run one check; lower-level exceptions become an ``error`` outcome."""
    try:
        return CHECKS[name](sample, tol)
    except (DomainError, ArithmeticError, ValueError, RuntimeError) as exc:
        return CheckOutcome(Status.ERROR, note=f"{type(exc).__name__}: {exc}")


# -- shrinking -------------------------------------------------------------------------


def shrink(
    point: dict,
    fails: Callable[[dict], bool],
    anchor: dict,
    step: float = 1e-6,
    integer_keys: tuple[str, ...] = (),
    max_rounds: int = 50,
) -> dict:
    """Move each coordinate of a failing ``point`` toward ``anchor`` while it keeps failing.

    Coordinates are processed in key order.  Each one is bisected between the
    anchor (if that passes) and its current value until the bracket is
    narrower than ``step``; the move is kept only if it is at least ``step``
    long, so applying :func:`shrink` to its own output changes nothing when
    the failure region is monotone along each coordinate.
    """
    current = dict(point)
    if not fails(current):
        raise ValueError("shrink needs a failing starting point")
    for _ in range(max_rounds):
        moved = False
        for key in sorted(anchor):
            target = anchor[key]
            value = current[key]
            if value == target:
                continue
            trial = dict(current)
            trial[key] = target
            if fails(trial):
                current = trial
                moved = True
                continue
            good, bad = target, value
            if key in integer_keys:
                while abs(bad - good) > 1:
                    mid = (good + bad) // 2
                    trial[key] = mid
                    if fails(trial):
                        bad = mid
                    else:
                        good = mid
            else:
                while abs(bad - good) > step:
                    mid = 0.5 * (good + bad)
                    trial[key] = mid
                    if fails(trial):
                        bad = mid
                    else:
                        good = mid
            if abs(bad - value) >= step:
                current = dict(current, **{key: bad})
                moved = True
        if not moved:
            break
    return current


_ANCHOR = {"alpha": 0.0, "n": 1, "a": 0.0, "width": 1.0, "r": 1.0}


def _sample_from(coords: dict, index: int) -> Sample:
    return Sample(index, coords["alpha"], int(coords["n"]), coords["a"], coords["a"] + coords["width"], coords["r"])


def _shrink_sample(name: str, sample: Sample, tol: Tolerances) -> dict:
    def fails(coords: dict) -> bool:
        if coords["alpha"] < 0.0 or coords["width"] <= 0.0 or coords["r"] <= 0.0:
            return False
        return evaluate(name, _sample_from(coords, sample.index), tol).status in (Status.FAIL, Status.ERROR)

    start = {"alpha": sample.alpha, "n": sample.n, "a": sample.a, "width": sample.b - sample.a, "r": sample.r}
    out = shrink(start, fails, _ANCHOR, tol.shrink_step, integer_keys=("n",))
    return _sample_from(out, sample.index).to_dict()


# -- driver -------------------------------------------------------------------------------


def worker_count() -> int:
    """Parallel workers: CPU count, capped by ``CAUCHY_ISO_THREADS``."""
    n = os.cpu_count() or 1
    cap = os.environ.get("CAUCHY_ISO_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def _run_check(args) -> VerificationReport:
    name, samples, tol, do_shrink, keep_rows = args
    start = time.perf_counter()
    report = VerificationReport(name, len(samples))
    worst = None
    first_fail = None
    for sample in samples:
        out = evaluate(name, sample, tol)
        field_name = "n_" + out.status.value
        setattr(report, field_name, getattr(report, field_name) + 1)
        if out.status is Status.ERROR and report.first_error is None:
            report.first_error = out.note
        if out.status in (Status.PASS, Status.FAIL) and not math.isnan(out.margin):
            if worst is None or out.margin < worst[0]:
                worst = (out.margin, sample)
        if out.status is Status.FAIL and first_fail is None:
            first_fail = sample
        if keep_rows:
            report.rows.append((sample, out))
    if worst is not None:
        report.worst_margin = float(worst[0])
        report.worst_input = worst[1].to_dict()
    if first_fail is not None and do_shrink:
        report.ce = _shrink_sample(name, first_fail, tol)
    elif first_fail is not None:
        report.ce = first_fail.to_dict()
    report.wall_time = time.perf_counter() - start
    return report


def run_sweep(config: SweepConfig, keep_rows: bool = False) -> list[VerificationReport]:
    """Evaluate every selected check on the same seeded samples.

    Reports come back in registry order regardless of how many workers ran.
    """
    samples = draw_samples(config)
    jobs = [(name, samples, config.tolerances, config.shrink, keep_rows) for name in config.selected()]
    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_check, jobs))
    return [_run_check(job) for job in jobs]


# -- output --------------------------------------------------------------------------------


def _json_number(x):
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def report_schema() -> dict:
    return json.loads(resources.files("cauchy_iso").joinpath("report_schema.json").read_text())


def reports_to_json(reports: list[VerificationReport], config: SweepConfig) -> str:
    payload = {
        "seed": config.seed,
        "samples": config.samples,
        "reports": [{k: _json_number(v) for k, v in r.to_dict().items()} for r in reports],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


_SUMMARY_FIELDS = [
    "inequality",
    "n_samples",
    "n_pass",
    "n_fail",
    "n_expected_fail",
    "n_flagged",
    "n_error",
    "worst_margin",
    "worst_input",
    "ce",
]


def _csv_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, dict):
        return json.dumps(x, sort_keys=True)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def reports_to_csv(reports: list[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_SUMMARY_FIELDS)
    for r in reports:
        d = r.to_dict()
        writer.writerow([_csv_value(d[k]) for k in _SUMMARY_FIELDS])
    return buf.getvalue()


def rows_to_csv(reports: list[VerificationReport]) -> str:
    """One row per (check, sample): inputs, lhs, rhs, margin and status."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["inequality", "index", "alpha", "n", "a", "b", "r", "lhs", "rhs", "margin", "status", "note"])
    for rep in reports:
        for sample, out in sorted(rep.rows, key=lambda row: row[0].index):
            writer.writerow(
                [rep.inequality, sample.index]
                + [_csv_value(v) for v in (sample.alpha, sample.n, sample.a, sample.b, sample.r, out.lhs, out.rhs, out.margin)]
                + [out.status.value, out.note]
            )
    return buf.getvalue()
