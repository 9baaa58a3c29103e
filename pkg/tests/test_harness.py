import json
import math

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cauchy_iso import harness as H


def _small(**kw):
    base = dict(seed=7, samples=12, shrink=False)
    base.update(kw)
    return H.SweepConfig(**base)


class TestConfig:
    def test_defaults_match_sampling_measure(self):
        cfg = H.SweepConfig()
        assert cfg.alpha_range == (1e-3, 10.0)
        assert cfg.alpha_zero_weight == 0.2
        assert cfg.n_range == (1, 8)
        assert cfg.a_range == cfg.width_range == cfg.r_range == (1e-3, 1e3)

    @pytest.mark.parametrize(
        "kw",
        [
            {"samples": 0},
            {"alpha_range": (0.0, 1.0)},
            {"n_range": (0, 3)},
            {"alpha_zero_weight": 1.5},
            {"inequalities": ("nope",)},
        ],
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            H.SweepConfig(**kw)

    def test_groups(self):
        cfg = H.SweepConfig(inequalities=("landau_shepp",))
        assert cfg.selected() == H.GROUPS["landau_shepp"]

    def test_all(self):
        assert H.SweepConfig().selected() == list(H.CHECKS)


class TestSampling:
    def test_deterministic(self):
        assert H.draw_samples(_small()) == H.draw_samples(_small())

    def test_seed_matters(self):
        assert H.draw_samples(_small(seed=1)) != H.draw_samples(_small(seed=2))

    def test_ranges(self):
        samples = H.draw_samples(H.SweepConfig(samples=2000))
        zeros = sum(s.alpha == 0.0 for s in samples)
        assert 300 < zeros < 500
        for s in samples:
            assert 1 <= s.n <= 8
            assert s.alpha == 0.0 or 1e-3 <= s.alpha <= 10.0
            assert 1e-3 <= abs(s.a) <= 1e3
            assert 1e-3 * (1 - 1e-12) <= s.b - s.a <= 1e3 * (1 + 1e-12)
            assert 1e-3 <= s.r <= 1e3
        assert any(s.a < 0 for s in samples) and any(s.a > 0 for s in samples)


class TestShrink:
    def test_synthetic_width(self):
        fails = lambda p: p["b"] - p["a"] > 1.0
        out = H.shrink({"a": 0.0, "b": 9.0}, fails, {"a": 0.0, "b": 0.0})
        assert fails(out)
        assert out["b"] - out["a"] == pytest.approx(1.0, abs=1e-6)

    @given(st.floats(1.5, 100.0), st.floats(-5.0, 5.0))
    def test_idempotent_and_failing(self, b, a):
        fails = lambda p: p["b"] - p["a"] > 1.0
        start = {"a": a, "b": a + b}
        once = H.shrink(start, fails, {"a": 0.0, "b": 0.0})
        twice = H.shrink(once, fails, {"a": 0.0, "b": 0.0})
        assert fails(once)
        assert twice == once

    def test_integer_coordinate(self):
        fails = lambda p: p["n"] >= 3
        out = H.shrink({"n": 8}, fails, {"n": 1}, integer_keys=("n",))
        assert out == {"n": 3}

    def test_needs_failure(self):
        with pytest.raises(ValueError):
            H.shrink({"x": 0.0}, lambda p: False, {"x": 1.0})


class TestChecks:
    def test_every_check_runs(self):
        sample = H.Sample(0, 0.5, 3, -0.4, 1.7, 0.8)
        for name in H.CHECKS:
            out = H.evaluate(name, sample)
            assert out.status in (H.Status.PASS, H.Status.FLAGGED, H.Status.EXPECTED_FAIL), name

    def test_landau_shepp_expected_fail(self):
        out = H.evaluate("landau_shepp_general", H.Sample(0, 0.5, 3, -0.4, 1.7, 0.5))
        assert out.status is H.Status.EXPECTED_FAIL

    def test_strong_flagged(self):
        out = H.evaluate("borell_strong_standard", H.Sample(0, 0.0, 1, -5.0, 5.0, 0.5))
        assert out.status is H.Status.FLAGGED

    def test_errors_recorded(self, monkeypatch):
        def boom(sample, tol):
            raise ArithmeticError("synthetic")

        monkeypatch.setitem(H.CHECKS, "gradient", boom)
        out = H.evaluate("gradient", H.Sample(0, 0.0, 1, 0.0, 1.0, 1.0))
        assert out.status is H.Status.ERROR and "synthetic" in out.note

    def test_failure_is_shrunk(self, monkeypatch):
        def width_check(sample, tol):
            bad = sample.b - sample.a > 2.0
            return H.CheckOutcome(H.Status.FAIL if bad else H.Status.PASS, -1.0 if bad else 1.0)

        monkeypatch.setitem(H.CHECKS, "gradient", width_check)
        rep = H.run_sweep(H.SweepConfig(seed=3, samples=30, inequalities=("gradient",)))[0]
        assert rep.n_fail > 0
        assert rep.ce["b"] - rep.ce["a"] == pytest.approx(2.0, abs=1e-6)


class TestSweep:
    def test_landau_shepp_small_r(self):
        cfg = _small(samples=50, r_range=(1e-3, 0.9), inequalities=("landau_shepp_standard", "landau_shepp_general"))
        for rep in H.run_sweep(cfg):
            assert rep.n_expected_fail == rep.n_samples
            assert rep.unexpected == 0

    def test_single_sample(self):
        reps = H.run_sweep(_small(samples=1))
        assert len(reps) == len(H.CHECKS)
        assert all(r.n_samples == 1 for r in reps)

    def test_no_unexpected(self):
        for rep in H.run_sweep(_small(samples=40)):
            assert rep.unexpected == 0, rep.to_dict()

    def test_json_deterministic_and_valid(self):
        cfg = _small()
        a = H.reports_to_json(H.run_sweep(cfg), cfg)
        b = H.reports_to_json(H.run_sweep(cfg), cfg)
        assert a == b
        jsonschema.validate(json.loads(a), H.report_schema())

    def test_csv_rows(self):
        cfg = _small(samples=3, inequalities=("borell_standard",))
        text = H.rows_to_csv(H.run_sweep(cfg, keep_rows=True))
        lines = text.strip().split("\n")
        assert lines[0].startswith("inequality,index,alpha")
        assert len(lines) == 4
        assert [line.split(",")[1] for line in lines[1:]] == ["0", "1", "2"]

    def test_worker_cap(self, monkeypatch):
        monkeypatch.setenv("CAUCHY_ISO_THREADS", "1")
        assert H.worker_count() == 1

    def test_parallel_matches_serial(self, monkeypatch):
        cfg = _small(samples=5, inequalities=("borell", "gradient"))
        monkeypatch.setenv("CAUCHY_ISO_THREADS", "1")
        serial = H.reports_to_json(H.run_sweep(cfg), cfg)
        monkeypatch.setattr(H, "worker_count", lambda: 2)
        parallel = H.reports_to_json(H.run_sweep(cfg), cfg)
        assert serial == parallel
