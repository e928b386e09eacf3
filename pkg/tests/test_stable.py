"""Tests for stable laws and the Bessel zero-set check."""

import math
from dataclasses import replace

import numpy as np
import pytest
from pydantic import ValidationError

from sletree.core.errors import OutOfRange
from sletree.core.stable import (
    StableParams,
    censored_stable_increments,
    inverse_local_time_check,
    levy_density,
    stable_char_fn,
    stable_check,
    stable_process_path,
    stable_sample,
)


class TestParams:
    def test_alpha_range(self):
        with pytest.raises(ValidationError):
            StableParams(alpha=0)
        with pytest.raises(ValidationError):
            StableParams(alpha=2.5)

    def test_scale(self):
        assert StableParams(alpha=0.5, b=4.0).c == pytest.approx(16.0)

    def test_strict_stability(self):
        assert StableParams(alpha=1.5, beta=0.3).strictly_stable
        assert not StableParams(alpha=1.5, mu=0.1).strictly_stable
        assert not StableParams(alpha=1, beta=0.2).strictly_stable
        assert StableParams(alpha=1, mu=0.4).strictly_stable

    def test_positive_support(self):
        assert StableParams(alpha=0.5, beta=1.0).positive_support
        assert not StableParams(alpha=1.5, beta=1.0).positive_support


class TestCharFn:
    def test_one_at_zero(self):
        for s in (StableParams(alpha=0.7, beta=0.4), StableParams(alpha=1, beta=-0.5)):
            assert stable_char_fn(s, 0.0) == pytest.approx(1.0)

    def test_modulus(self):
        s = StableParams(alpha=1.3, beta=0.8, mu=0.5, b=2.0)
        lam = np.array([-2.0, -0.5, 0.7, 3.0])
        expected = np.exp(-((s.c * np.abs(lam)) ** 1.3))
        np.testing.assert_allclose(np.abs(stable_char_fn(s, lam)), expected)

    def test_gaussian_case(self):
        s = StableParams(alpha=2.0, b=0.5)
        assert stable_char_fn(s, 1.0) == pytest.approx(math.exp(-0.5))


class TestSampler:
    @pytest.mark.parametrize(
        "alpha,beta,mu,b",
        [(1.5, 0.5, 0.0, 1.0), (0.5, 1.0, 0.0, 1.0), (1.0, 0.0, 0.3, 1.0), (1.0, 0.5, 0.0, 2.0)],
    )
    def test_empirical_char_fn(self, alpha, beta, mu, b):
        report = stable_check(StableParams(alpha=alpha, beta=beta, mu=mu, b=b), 100_000, seed=1)
        assert report.passed, report.to_dict()

    def test_totally_skewed_law_is_positive(self):
        x = stable_sample(StableParams(alpha=0.5, beta=1.0), 20_000, seed=2)
        assert (x >= 0).all()
        assert np.mean(x > 0) > 0.999

    def test_symmetric_law_is_balanced(self):
        report = stable_check(StableParams(alpha=0.8), 40_000, seed=3)
        assert abs(report.positive_fraction - 0.5) < 0.02

    def test_seeded_draws_repeat(self):
        s = StableParams(alpha=1.2, beta=-0.3)
        np.testing.assert_array_equal(stable_sample(s, 10, seed=4), stable_sample(s, 10, seed=4))

    def test_process_increments_scale_with_dt(self):
        path = stable_process_path(StableParams(alpha=2.0, b=1.0), 0.001, 10.0, seed=5)
        assert path.values[0] == 0.0
        assert len(path.values) == 10_001
        var = np.var(np.diff(path.values))
        assert abs(var / 0.002 - 1.0) < 0.1


def test_levy_density():
    s = StableParams(alpha=0.5, beta=0.5)
    assert levy_density(s, 2.0) / levy_density(s, -2.0) == pytest.approx(3.0)
    assert levy_density(s, 1.0) == pytest.approx(0.75)
    with pytest.raises(OutOfRange):
        levy_density(s, np.array([1.0, 0.0]))


class TestInverseLocalTime:
    def test_delta_range(self):
        with pytest.raises(OutOfRange):
            inverse_local_time_check(2.0)

    def test_report_fields(self):
        r = inverse_local_time_check(1.0, dt=1e-3, seed=6, paths=20, hit_paths=200, chunk=10)
        assert r.alpha == pytest.approx(0.5)
        assert r.increments > 0
        assert 0.0 <= r.hit_fraction <= 1.0
        assert 0.0 < r.hit_oracle < 1.0
        assert r.to_dict()["passed"] == r.passed

    def test_verdict_needs_hit_rate_and_stable_fit(self):
        r = inverse_local_time_check(1.0, dt=1e-3, seed=6, paths=20, hit_paths=200, chunk=10)
        assert not replace(r, hit_fraction=1.0).passed
        assert not replace(r, gaps=max(r.gaps, 50), ks_pvalue=0.0).passed

    def test_near_two_dimensional_hit_rate_within_oracle(self):
        r = inverse_local_time_check(1.9, dt=1e-3, seed=8, paths=20, hit_paths=1000)
        assert r.hit_oracle == pytest.approx(0.029, abs=0.005)
        assert r.hit_fraction <= r.hit_oracle + r.hit_allowance

    def test_censored_reference_respects_horizon(self):
        inc = censored_stable_increments(0.5, 0.01, rows=50, T=1.0, seed=9)
        assert len(inc) > 50
        assert (inc > 0).all()
        assert inc.max() <= 1.0

    @pytest.mark.slow
    def test_zero_set_of_half_dimensional_bessel(self):
        r = inverse_local_time_check(0.5, seed=7)
        assert r.passed, r.to_dict()
        assert abs(r.hit_fraction - r.hit_oracle) < 0.1
