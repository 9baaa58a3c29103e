"""Acceptance criteria 1-10, one test each, each printing a single PASS/FAIL line.

Where a tolerance is absolute but the quantity is large, the bound is scaled
by ``max(1, |value|)``; the printed line gives the worst raw figure as well.
"""

import json
import math
import time

import numpy as np
import pytest

from cauchy_iso import calculus, cli
from cauchy_iso import harness as H
from cauchy_iso import inequalities as ineq
from cauchy_iso.density import NEG_INF, STANDARD, Interval, MeasureParams, cdf, mass_pair
from cauchy_iso.oracle import fd_hessian, oracle_cdf, oracle_g
from cauchy_iso.transfer import g_general, g_standard, h, scaling_identity_residual


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok

    return emit


def _samples(count, seed=42, **kw):
    return H.draw_samples(H.SweepConfig(seed=seed, samples=count, **kw))


def _cond(a, b):
    # relative rounding of r*a, r*b or a - r, b + r, seen through the width b - a
    return max(1.0, (abs(a) + abs(b)) / (b - a))


def test_criterion_1_exact_constants(report):
    start = time.perf_counter()
    ivs = [Interval(-1.0, 1.0), Interval(NEG_INF, 0.0)] + [Interval(-1.0 / b, b) for b in (1.5, 2.0, 5.0)]
    errs = [abs(ineq.perimeter_interval(STANDARD, iv).value - 1.0 / math.pi) for iv in ivs]
    elapsed = time.perf_counter() - start
    ok = max(errs) <= 1e-12 and elapsed < 1.0
    assert report(1, ok, f"max |per - 1/pi| = {max(errs):.2e}, {elapsed:.3f} s")


def test_criterion_2_closed_form_vs_oracle(report):
    start = time.perf_counter()
    worst_g_rel = worst_g_abs = 0.0
    for s in _samples(10_000, seed=2):
        g = g_standard(s.a, s.b)
        err = abs(oracle_g(STANDARD, s.a, s.b) - g)
        worst_g_abs = max(worst_g_abs, err)
        worst_g_rel = max(worst_g_rel, err / max(1.0, abs(g)))
    rng = np.random.default_rng(2)
    worst_cdf = 0.0
    for _ in range(10_000):
        alpha = 0.0 if rng.random() < 0.2 else float(rng.uniform(0.0, 10.0))
        n = int(rng.integers(1, 13))
        x = float(rng.choice([-1.0, 1.0]) * 10 ** rng.uniform(-3, 3))
        p = MeasureParams(alpha, n)
        worst_cdf = max(worst_cdf, abs(cdf(p, x) - oracle_cdf(p, x)))
    elapsed = time.perf_counter() - start
    ok = worst_g_rel <= 1e-8 and worst_cdf <= 1e-9 and elapsed < 60.0
    assert report(
        2,
        ok,
        f"g: worst {worst_g_rel:.1e} relative to max(1,|g|) ({worst_g_abs:.1e} absolute); "
        f"cdf: worst {worst_cdf:.1e}; {elapsed:.1f} s",
    )


def test_criterion_3_borell_standard(report):
    start = time.perf_counter()
    worst = math.inf
    worst_identity = 0.0
    fails = strong_fail = strong_pass = strong_flag = 0
    for s in _samples(100_000, seed=3):
        res = ineq.borell_gap_standard(s.a, s.b, s.r)
        worst = min(worst, res.margin)
        if not res.margin >= -(1e-9 + res.extra["rounding"]):
            fails += 1
        scale = (1.0 + abs(g_standard(s.a - s.r, s.b + s.r)) + abs(g_standard(s.a, s.b))) * _cond(s.a, s.b)
        worst_identity = max(worst_identity, res.extra["identity_error"] / scale)
        strong = ineq.borell_gap_strong_standard(s.a, s.b, s.r)
        if not strong.hypothesis_met:
            strong_flag += 1
        elif strong.passed:
            strong_pass += 1
        else:
            strong_fail += 1
    elapsed = time.perf_counter() - start
    ok = fails == 0 and worst_identity <= 1e-10 and strong_fail == 0 and elapsed < 30.0
    assert report(
        3,
        ok,
        f"worst margin {worst:.2e}, {fails} failures; identity error {worst_identity:.1e} (scaled); "
        f"strong: {strong_pass} pass, {strong_flag} flagged, {strong_fail} fail; {elapsed:.1f} s",
    )


def test_criterion_4_landau_shepp_standard(report):
    worst_identity = 0.0
    inconsistent = 0
    for s in _samples(100_000, seed=4):
        res = ineq.landau_shepp_standard(s.a, s.b, s.r)
        scale = (1.0 + abs(res.lhs) + abs(res.rhs)) * _cond(s.a, s.b)
        worst_identity = max(worst_identity, res.extra["identity_error"] / scale)
        inconsistent += not res.extra["iff_consistent"]
    at_one = ineq.landau_shepp_standard(-0.3, 2.0, 1.0)
    ok = worst_identity <= 1e-12 and inconsistent == 0 and abs(at_one.margin) <= 1e-9
    assert report(4, ok, f"identity error {worst_identity:.1e} (scaled); {inconsistent} sign disagreements")


def test_criterion_5_borell_general(report):
    worst_gap = worst_diff = math.inf
    fails = 0
    for s in _samples(10_000, seed=5):
        res = ineq.borell_gap_general(s.params, s.a, s.b, s.r)
        diff = ineq.borell_differential_margin(s.params, s.a, s.b)
        worst_gap = min(worst_gap, res.margin)
        worst_diff = min(worst_diff, diff.margin)
        fails += res.margin < -(1e-8 + res.extra["rounding"]) or diff.margin < -1e-10
    ok = fails == 0
    assert report(5, ok, f"worst gap margin {worst_gap:.2e}, worst differential margin {worst_diff:.2e}, {fails} failures")


def test_criterion_6_landau_shepp_general(report):
    worst_mono = worst_diff = math.inf
    fails = 0
    for s in _samples(1_000, seed=6):
        mono = ineq.landau_shepp_monotone(s.params, s.a, s.b, r_max=100.0, points=64, tol=1e-8)
        diff = ineq.landau_shepp_differential_margin(s.params, s.a, s.b)
        worst_mono = min(worst_mono, mono.margin)
        worst_diff = min(worst_diff, diff.margin)
        fails += (not mono.passed) or diff.margin < -(1e-9 + diff.extra["rounding"])
    ok = fails == 0
    assert report(6, ok, f"worst step {worst_mono:.2e}, worst differential margin {worst_diff:.2e}, {fails} failures")


def test_criterion_7_concavity(report):
    rng = np.random.default_rng(7)
    bracket_err = det_fd_err = literal_fd_err = 0.0
    for _ in range(200):
        a = float(rng.uniform(-5, 5))
        b = a + float(rng.uniform(0.1, 5))
        rep = calculus.hessian_g_standard(a, b)
        bracket_err = max(bracket_err, abs(rep.extras["bracket"] - (b - a) ** -4) / (b - a) ** -4)
        step = 1e-3 * min(b - a, 1.0)
        fd_det = float(np.linalg.det(fd_hessian(lambda v: g_standard(v[0], v[1]), [a, b], [step, step])))
        det_fd_err = max(det_fd_err, abs(fd_det - rep.determinant) / rep.determinant)
        literal_fd_err = max(literal_fd_err, abs(fd_det - (b - a) ** -4) / (b - a) ** -4)

    not_nsd = 0
    for s in _samples(1_000, seed=71):
        not_nsd += calculus.hessian_g_general(s.params, s.a, s.b).verdict is not calculus.Verdict.NEGATIVE_SEMIDEFINITE
        not_nsd += calculus.hessian_joint(s.n, s.alpha, s.a, s.b).verdict is not calculus.Verdict.NEGATIVE_SEMIDEFINITE

    chi_fail = 0
    worst_chi = math.inf
    for s in _samples(10_000, seed=72):
        margin = calculus.chi_criterion_margin(s.params, s.a, s.b)
        if margin == math.inf:
            continue
        ca, cb = calculus.chi(s.params, s.a), calculus.chi(s.params, s.b)
        rel = margin / max(1.0, abs(ca * cb / (ca - cb)))
        worst_chi = min(worst_chi, rel)
        chi_fail += rel < -1e-9

    mid_fail = 0
    pairs = list(zip(_samples(1_000, seed=73), _samples(1_000, seed=74)))
    for x, y in pairs:
        margin, size = calculus.midpoint_concavity_margin(x.n, (x.alpha, x.a, x.b), (y.alpha, y.a, y.b))
        mid_fail += margin < -1e-9 * max(1.0, size)

    literal_ok = bracket_err <= 1e-12 and literal_fd_err <= 1e-4
    rest_ok = det_fd_err <= 1e-4 and not_nsd == 0 and chi_fail == 0 and mid_fail == 0
    ok = literal_ok and rest_ok
    assert report(
        7,
        ok,
        f"bracket vs (b-a)^-4 {bracket_err:.1e}; finite-difference det vs (b-a)^-4 {literal_fd_err:.2f} relative "
        f"(vs 4 (b-a)^-4: {det_fd_err:.1e}); {not_nsd} non-NSD verdicts; chi worst {worst_chi:.1e} "
        f"({chi_fail} fail); midpoint {mid_fail} fail",
    )


def test_criterion_8_scaling_and_alpha_monotone(report):
    worst_rel = worst_abs = 0.0
    for s in _samples(10_000, seed=8):
        res = scaling_identity_residual(s.alpha, s.n, s.a, s.b)
        g = g_general(s.params, s.a, s.b).value
        worst_abs = max(worst_abs, res)
        worst_rel = max(worst_rel, res / max(1.0, abs(g)))
    rng = np.random.default_rng(8)
    alphas = np.round(np.arange(0.0, 5.0 + 1e-9, 0.1), 10)
    worst_step = -math.inf
    for _ in range(200):
        a, b = sorted(rng.uniform(-10.0, 10.0, size=2))
        n = int(rng.integers(1, 9))
        values = [g_general(MeasureParams(float(al), n), a, b).value for al in alphas]
        worst_step = max(worst_step, float(np.max(np.diff(values))))
    ok = worst_rel <= 1e-9 and worst_step < -1e-12
    assert report(
        8,
        ok,
        f"scaling residual {worst_rel:.1e} relative to max(1,|g|) ({worst_abs:.1e} absolute); "
        f"largest alpha step {worst_step:.2e}",
    )


def test_criterion_9_auxiliaries(report):
    problems = []
    for n in range(1, 13):
        for alpha in (0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
            p = MeasureParams(alpha, n)
            p1 = ineq.p1_threshold(p)
            if mass_pair(p, -p1, p1)[0] < 0.5 - 1e-10:
                problems.append(f"p1 mass {alpha},{n}")
            for x in np.geomspace(p1, 1e3, 25):
                if h(p, x) < ineq.z_value(p, x) - 1e-12 * max(1.0, abs(h(p, x))):
                    problems.append(f"h<z {alpha},{n},{x}")
            for x in np.geomspace(1e-3, 1e3, 25):
                half = ineq.chi_half_point(p, x)
                if abs(2 * ineq._chi(p, half) - ineq._chi(p, x)) > 1e-12 * ineq._chi(p, x):
                    problems.append(f"chi {alpha},{n},{x}")
    worst_ratio = worst_lam = -math.inf
    worst_lam_prime = math.inf
    for n in range(1, 13):
        base = MeasureParams(0.0, n)
        for x in np.geomspace(1e-3, 1e3, 200):
            worst_ratio = max(worst_ratio, h(base, x) / x - 2 ** (-1 / n))
        for x in np.geomspace(1e-3, 1e3, 2000):
            worst_lam = max(worst_lam, ineq.lambda_value(n, x))
            worst_lam_prime = min(worst_lam_prime, ineq.lambda_prime(n, x))
    ok = not problems and worst_ratio <= 1e-9 and worst_lam <= 1e-10 and worst_lam_prime >= -1e-10
    assert report(
        9,
        ok,
        f"{len(problems)} grid problems; max h/p - 2^(-1/n) {worst_ratio:.2e}; "
        f"max Lambda {worst_lam:.2e}; min Lambda' {worst_lam_prime:.2e}",
    )


def test_criterion_10_determinism(report, tmp_path, capsys):
    outputs = []
    for k in range(2):
        path = tmp_path / f"report{k}.json"
        code = cli.main(["verify", "--seed", "42", "--out", str(path)])
        outputs.append((code, path.read_bytes()))
    capsys.readouterr()
    same = outputs[0][1] == outputs[1][1]
    payload = json.loads(outputs[0][1])
    unexpected = sum(r["n_fail"] + r["n_error"] for r in payload["reports"])
    ok = same and outputs[0][0] == 0
    assert report(10, ok, f"byte-identical: {same}; {len(outputs[0][1])} bytes; {unexpected} unexpected failures")
