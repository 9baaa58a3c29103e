import math

import numpy as np
import pytest

from cauchy_iso.density import NEG_INF, STANDARD, MeasureParams
from cauchy_iso.oracle import (
    QuadratureError,
    QuadratureSpec,
    adaptive_simpson,
    central_gradient,
    fd_hessian,
    fd_jacobian,
    oracle_cdf,
    oracle_g,
    oracle_mass,
    oracle_normalization,
)
from cauchy_iso.transfer import g_standard

from conftest import closed_cdf


class TestSimpson:
    def test_polynomial_exact(self):
        value, _ = adaptive_simpson(lambda x: x**3 - 2 * x, 0.0, 2.0, 1e-12)
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_sine(self):
        value, _ = adaptive_simpson(math.sin, 0.0, math.pi, 1e-12)
        assert value == pytest.approx(2.0, abs=1e-11)

    def test_empty_interval(self):
        assert adaptive_simpson(math.exp, 1.0, 1.0, 1e-12)[0] == 0.0


class TestOracleValues:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("x", [-1e3, -2.0, 0.3, 7.0, 1e5])
    def test_cdf_closed_form(self, n, x):
        assert oracle_cdf(MeasureParams(0.7, n), x) == pytest.approx(closed_cdf(n, 0.7, x), abs=1e-11)

    def test_normalization(self):
        assert oracle_normalization(STANDARD) == pytest.approx(1 / math.pi, rel=1e-11)

    def test_mass_half_line(self):
        assert oracle_mass(STANDARD, NEG_INF, 0.0) == pytest.approx(0.5, abs=1e-12)

    def test_g_standard(self, rng):
        for _ in range(50):
            a = float(rng.uniform(-20, 20))
            b = a + float(rng.uniform(0.01, 20))
            g = g_standard(a, b)
            assert oracle_g(STANDARD, a, b) == pytest.approx(g, abs=1e-8 * max(1.0, abs(g)))

    def test_bound_policy_agrees(self):
        p = MeasureParams(1.5, 3)
        spec = QuadratureSpec(tail_policy="bound")
        assert oracle_cdf(p, 2.0, spec) == pytest.approx(oracle_cdf(p, 2.0), abs=1e-10)


class TestFiniteDifferences:
    def test_gradient(self):
        fn = lambda v: v[0] ** 2 * v[1]
        np.testing.assert_allclose(central_gradient(fn, [1.0, 2.0], [1e-5, 1e-5]), [4.0, 1.0], rtol=1e-8)

    def test_jacobian(self):
        fn = lambda v: np.array([v[0] * v[1], v[0] + v[1]])
        np.testing.assert_allclose(fd_jacobian(fn, [2.0, 3.0], [1e-4, 1e-4]), [[3.0, 2.0], [1.0, 1.0]], rtol=1e-8)

    def test_hessian(self):
        fn = lambda v: v[0] ** 2 * v[1] + math.sin(v[1])
        h = fd_hessian(fn, [1.0, 0.5], [1e-3, 1e-3])
        expected = [[2 * 0.5, 2.0], [2.0, -math.sin(0.5)]]
        np.testing.assert_allclose(h, expected, atol=1e-6)
