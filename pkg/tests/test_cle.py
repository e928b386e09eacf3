"""Tests for CLE exploration statistics."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from sletree.core.cle import (
    check_cle_params,
    cle_loop_arcs,
    conformal_radius_sample,
    mobius_to_target,
    nested_radius_batch,
    nested_radius_sequence,
    reflected_exit_cdf,
    target_invariance_check,
    theta_path,
)
from sletree.core.errors import InadmissibleParams

TWO_PI = 2.0 * math.pi


class TestExitLaw:
    def test_starts_near_zero_and_reaches_one(self):
        assert reflected_exit_cdf(0.0) < 0.01
        assert reflected_exit_cdf(200.0) == pytest.approx(1.0)

    def test_monotone(self):
        f = reflected_exit_cdf(np.linspace(0.5, 60.0, 400))
        assert (np.diff(f) >= -1e-12).all()

    def test_mean_is_level_squared(self):
        t = np.linspace(0.0, 300.0, 30_001)
        mean = integrate.trapezoid(1.0 - reflected_exit_cdf(t), t)
        assert mean == pytest.approx(math.pi**2, rel=5e-3)

    def test_level_scaling(self):
        t = np.array([0.3, 1.0, 2.5])
        np.testing.assert_allclose(
            reflected_exit_cdf(t, level=1.0), reflected_exit_cdf(t * math.pi**2)
        )


class TestParams:
    @pytest.mark.parametrize("kappa", [2.0, 8.0 / 3.0, 8.0, 9.0, math.inf])
    def test_kappa_range(self, kappa):
        with pytest.raises(InadmissibleParams, match="kappa"):
            check_cle_params(kappa, 1.0)

    @pytest.mark.parametrize("kappa,beta", [(4.0, 0.0), (4.0, 1.0), (6.0, 0.5), (3.0, -1.0)])
    def test_allowed(self, kappa, beta):
        check_cle_params(kappa, beta)

    @pytest.mark.parametrize("kappa,beta", [(4.0, 0.5), (6.0, 1.5)])
    def test_beta_must_suit_kappa(self, kappa, beta):
        with pytest.raises(InadmissibleParams):
            check_cle_params(kappa, beta)


class TestExploration:
    def test_theta_path_closures(self):
        p = theta_path(6.0, 1.0, 0.05, 1e-2, 100.0, seed=1, j_max=2)
        assert 1 <= len(p.closure_times) <= 2
        for s, t in p.closure_times:
            assert s < t
        _, last = p.closure_indices[-1]
        assert len(p.theta) == last + 1 or len(p.closure_times) < 2
        assert abs(p.theta[last] - TWO_PI * p.anchor[last]) < 0.05 + 1e-9

    def test_driver_rebuilds_angle(self):
        p = theta_path(4.0, 0.0, 0.05, 1e-2, 5.0, seed=2)
        d = p.driver()
        np.testing.assert_allclose(d.W / d.O, np.exp(1j * p.theta))
        assert d.rho == pytest.approx(-2.0)

    def test_radius_sample_is_seeded(self):
        a = conformal_radius_sample(4.0, 0.0, 0.05, 1e-2, 40, seed=3, T_max=60.0)
        b = conformal_radius_sample(4.0, 0.0, 0.05, 1e-2, 40, seed=3, T_max=60.0)
        np.testing.assert_array_equal(a, b)
        assert np.nanmin(a) > 0

    def test_radius_sample_ignores_jobs(self):
        a = conformal_radius_sample(4.0, 0.0, 0.05, 1e-2, 1200, seed=4, T_max=60.0, jobs=1)
        b = conformal_radius_sample(4.0, 0.0, 0.05, 1e-2, 1200, seed=4, T_max=60.0, jobs=2)
        np.testing.assert_array_equal(a, b)

    def test_nested_gaps(self):
        g = nested_radius_batch(6.0, 1.0, 0.05, 1e-2, 3, 20, seed=5, T_max=60.0)
        assert g.shape == (20, 3)
        assert (g[np.isfinite(g)] > 0).all()

    def test_nested_sequence_needs_two_loops(self):
        with pytest.raises(ValueError, match="j_max"):
            nested_radius_sequence(6.0, 1.0, 0.05, 1e-2, 1)
        with pytest.raises(ValueError, match="j_max"):
            nested_radius_batch(6.0, 1.0, 0.05, 1e-2, 0, 5)

    def test_nested_sequence_first_gap(self):
        r = nested_radius_sequence(6.0, 1.0, 0.05, 1e-2, 2, seed=6, T_max=100.0)
        assert r.gaps and r.T == r.gaps[0]

    def test_loop_arcs_lie_in_disk(self):
        arcs = cle_loop_arcs(6.0, 1.0, 0.05, 1e-2, 2, seed=7, T_max=60.0, stride=5)
        assert [a.j for a in arcs] == list(range(1, len(arcs) + 1))
        for a in arcs:
            assert a.s < a.t
            assert (np.abs(a.trace.points) <= 1.0 + 1e-9).all()


class TestTargetInvariance:
    def test_mobius_map(self):
        z = 0.3 + 0.2j
        f = mobius_to_target(z)
        assert f(0.0) == pytest.approx(z)
        assert f(1.0) == pytest.approx(1.0)
        np.testing.assert_allclose(np.abs(f(np.exp(1j * np.linspace(0, 6, 7)))), 1.0)

    def test_targets_in_disk(self):
        with pytest.raises(ValueError, match="open disk"):
            target_invariance_check(6.0, 0j, 1.5 + 0j, 0.05, 1e-2, 5)

    def test_equal_targets_share_exits(self):
        r = target_invariance_check(6.0, 0.2j, 0.2j, 0.05, 1e-2, 10, seed=8)
        assert r.exits1 == r.exits2
        assert r.to_dict()["z1"] == [0.0, 0.2]
        if r.exits1:
            assert r.ks_statistic == 0.0 and r.passed

    def test_default_beta(self):
        assert target_invariance_check(4.0, 0j, 0j, 0.05, 1e-2, 2, seed=9).beta == 0.0
        assert target_invariance_check(6.0, 0j, 0j, 0.05, 1e-2, 2, seed=9).beta == 1.0


@pytest.mark.slow
class TestAcceptance:
    def test_kappa4_radius_law(self):
        t = conformal_radius_sample(4.0, 0.0, 1e-3, 1e-3, 2000, seed=10)
        done = t[np.isfinite(t)]
        assert abs(done.mean() / math.pi**2 - 1.0) < 0.05
        assert stats.kstest(done, reflected_exit_cdf).pvalue > 0.01

    def test_loops_shrink_as_kappa_approaches_8_over_3(self):
        means = [
            np.nanmean(conformal_radius_sample(k, 1.0, 1e-3, 1e-3, 1000, seed=11))
            for k in (3.2, 3.0, 2.8)
        ]
        assert means[0] < means[1] < means[2]

    def test_kappa3_2_radius_mean(self):
        s = 0.25
        expected = -(4 * math.pi / 3.2) * math.sin(math.pi * s) / (s * math.cos(4 * math.pi / 3.2))
        t = conformal_radius_sample(3.2, 1.0, 1e-3, 1e-3, 1000, seed=13)
        assert np.isfinite(t).mean() > 0.95
        assert abs(np.nanmean(t) / expected - 1.0) < 0.1

    def test_kappa6_radius_mean(self):
        # -(4 pi / kappa) sin(pi s) / (s cos(4 pi / kappa)), s = |1 - 4 / kappa|
        s = 1.0 / 3.0
        expected = -(4 * math.pi / 6) * math.sin(math.pi * s) / (s * math.cos(4 * math.pi / 6))
        t = conformal_radius_sample(6.0, 1.0, 1e-3, 1e-3, 2000, seed=12)
        assert abs(np.nanmean(t) / expected - 1.0) < 0.1
