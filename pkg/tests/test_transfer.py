import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cauchy_iso.density import NEG_INF, STANDARD, DomainError, MeasureParams, cdf, mass_pair
from cauchy_iso.oracle import oracle_g
from cauchy_iso.transfer import (
    Method,
    g_general,
    g_standard,
    g_star_from_g,
    g_star_general,
    g_star_standard,
    h,
    scaling_identity_residual,
)

alphas = st.floats(0.0, 10.0)
ns = st.integers(1, 8)
ends = st.floats(-1e3, 1e3)
widths = st.floats(1e-3, 1e3)


class TestStandard:
    def test_symmetric(self):
        assert g_standard(-1.0, 1.0) == 0.0

    def test_formula(self):
        assert g_standard(0.5, 1.0) == pytest.approx(-3.0)

    def test_half_line(self):
        assert g_standard(NEG_INF, 2.5) == 2.5

    def test_empty(self):
        assert g_standard(1.0, 1.0) is NEG_INF

    def test_rejects_reversed(self):
        with pytest.raises(DomainError):
            g_standard(2.0, 1.0)

    @given(ends, widths)
    def test_defining_equation(self, a, w):
        b = a + w
        g = g_standard(a, b)
        # atan form: atan(g) + pi/2 == atan(b) - atan(a)
        assert math.atan(g) + math.pi / 2 == pytest.approx(math.atan(b) - math.atan(a), abs=1e-12)

    @given(ends, widths)
    def test_sign_matches_mass(self, a, w):
        mass = mass_pair(STANDARD, a, a + w)[0]
        assume(abs(mass - 0.5) > 1e-12)
        assert (g_standard(a, a + w) < 0) == (mass < 0.5)


class TestGeneral:
    @given(ends, widths)
    def test_agrees_with_closed_form(self, a, w):
        b = a + w
        res = g_general(STANDARD, a, b)
        g = g_standard(a, b)
        assert res.method is Method.ROOT_FIND
        assert res.value == pytest.approx(g, rel=1e-10, abs=1e-10)

    @given(alphas, ns, ends, widths)
    def test_mass_preserved(self, alpha, n, a, w):
        p = MeasureParams(alpha, n)
        res = g_general(p, a, a + w)
        assume(res.value is not NEG_INF)
        assert res.residual <= 1e-12
        assert res.value <= a + w

    @given(alphas, ns, ends, widths)
    def test_monotone(self, alpha, n, a, w):
        p = MeasureParams(alpha, n)
        b = a + w
        g = g_general(p, a, b).value
        assert g_general(p, a - 0.1, b).value >= g
        assert g_general(p, a, b + 0.1).value >= g

    def test_half_line_closed_form(self):
        res = g_general(MeasureParams(2.0, 3), NEG_INF, 1.5)
        assert res.value == 1.5 and res.method is Method.CLOSED_FORM

    def test_empty(self):
        assert g_general(MeasureParams(2.0, 3), 1.0, 1.0).is_neg_inf

    @pytest.mark.parametrize("n", range(2, 9))
    def test_limit_left(self, n):
        p = MeasureParams(0.5, n)
        assert g_general(p, -1e6, 2.0).value == pytest.approx(2.0, abs=1e-6)

    def test_limit_left_standard_is_slow(self):
        # for n = 1 the deficit decays like 1/|a|, so 1e-6 is not reached at a = -1e6
        g = g_general(STANDARD, -1e6, 2.0).value
        assert g == pytest.approx(g_standard(-1e6, 2.0), rel=1e-12)
        assert 2.0 - g > 1e-6

    @pytest.mark.parametrize("n", range(2, 9))
    def test_limit_right(self, n):
        p = MeasureParams(0.5, n)
        assert g_general(p, -0.7, 1e6).value == pytest.approx(0.7, abs=1e-6)

    def test_limit_right_standard_is_slow(self):
        g = g_general(STANDARD, -0.7, 1e6).value
        assert g == pytest.approx(g_standard(-0.7, 1e6), rel=1e-12)
        assert 0.7 - g > 1e-6

    @pytest.mark.parametrize("alpha, n", [(0.0, 2), (1.0, 4), (3.0, 7)])
    def test_oracle(self, alpha, n, rng):
        p = MeasureParams(alpha, n)
        for _ in range(20):
            a = float(rng.uniform(-10, 10))
            b = a + float(rng.uniform(0.01, 10))
            g = g_general(p, a, b).value
            assert oracle_g(p, a, b) == pytest.approx(g, abs=1e-8 * max(1.0, abs(g)))

    def test_to_dict(self):
        d = g_general(STANDARD, 1.0, 1.0).to_dict()
        assert d == {"value": "-inf", "method": "closed_form", "residual": 0.0}


class TestGStar:
    def test_symmetric_fixed_point(self):
        assert g_star_standard(-3.0, 3.0) == pytest.approx(3.0, rel=1e-15)

    def test_unit_interval(self):
        # mass(0, 1) = 1/4, and the centred interval of mass 1/4 is (-tan(pi/8), tan(pi/8))
        assert g_star_standard(0.0, 1.0) == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-15)

    @pytest.mark.xfail(strict=True, reason="literal value sqrt(sqrt(2) - 1) contradicts the defining mass equation")
    def test_unit_interval_literal(self):
        assert g_star_standard(0.0, 1.0) == pytest.approx(math.sqrt(math.sqrt(2.0) - 1.0), abs=1e-10)

    @given(ends, widths)
    def test_agrees_with_root_find(self, a, w):
        b = a + w
        closed = g_star_standard(a, b)
        res = g_star_general(STANDARD, a, b)
        assert res.value == pytest.approx(closed, rel=1e-10)

    @given(alphas, ns, st.floats(1e-3, 1e4))
    def test_fixed_point_general(self, alpha, n, s):
        res = g_star_general(MeasureParams(alpha, n), -s, s)
        assert res.value == pytest.approx(s, rel=1e-10)

    @given(st.floats(-1e8, 1e8))
    def test_from_g_positive(self, g):
        assert g_star_from_g(g) > 0.0

    def test_from_neg_inf(self):
        assert g_star_from_g(NEG_INF) == 0.0

    def test_half_line_rejected(self):
        with pytest.raises(DomainError):
            g_star_standard(NEG_INF, 1.0)


class TestH:
    def test_standard_zero(self):
        assert h(STANDARD, 1.0) == 0.0

    def test_sign(self):
        p = MeasureParams(1.0, 3)
        p1 = math.sqrt(2.0 * (2.0 ** (2.0 / 3) - 1.0))
        assert h(p, 0.1) < 0.0 < h(p, 10.0)
        assert h(p, p1) > 0.0  # mass(-p1, p1) exceeds one half

    def test_rejects(self):
        with pytest.raises(DomainError):
            h(STANDARD, 0.0)


class TestScalingIdentity:
    @given(alphas, ns, ends, widths)
    def test_residual(self, alpha, n, a, w):
        b = a + w
        g = g_general(MeasureParams(alpha, n), a, b).value
        assume(g is not NEG_INF)
        assert scaling_identity_residual(alpha, n, a, b) <= 1e-9 * max(1.0, abs(g))

    def test_alpha_zero_trivial(self):
        assert scaling_identity_residual(0.0, 3, -1.0, 2.0) == 0.0
