"""Tests for Brownian, Bessel, epsilon-jumping and skew Bessel samplers."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from sletree.core.errors import DegenerateDelta, InvalidSkewCombo
from sletree.core.stochastic import (
    BesselParams,
    besq_exact_step,
    bessel_batch,
    bridge_zero_probability,
    bessel_companion,
    bessel_path,
    brownian_batch,
    brownian_path,
    check_skew_combo,
    count_upcrossings,
    eps_bessel_batch,
    eps_bessel_path,
    exact_bessel_grid,
    excursion_signs,
    principal_value,
    skew_bessel_batch,
    skew_bessel_path,
    split_seed,
    step_count,
)


# =============================================================================
# Grid and parameters
# =============================================================================


class TestGrid:
    def test_step_count(self):
        assert step_count(0.01, 1.0) == 100
        assert step_count(1.0, 0.1) == 1

    @pytest.mark.parametrize("dt,T", [(0.0, 1.0), (-0.1, 1.0), (0.1, 0.0)])
    def test_rejects_non_positive(self, dt, T):
        with pytest.raises(ValueError, match="must be positive"):
            step_count(dt, T)

    def test_params_validation(self):
        with pytest.raises(ValidationError):
            BesselParams(delta=0)
        with pytest.raises(ValidationError):
            BesselParams(delta=1, beta=1.5)
        with pytest.raises(ValidationError):
            BesselParams(delta=1, epsilon=0)

    def test_split_seed_is_deterministic(self):
        a = [np.random.default_rng(s).random() for s in split_seed(5, 3)]
        b = [np.random.default_rng(s).random() for s in split_seed(5, 3)]
        assert a == b
        assert len(set(a)) == 3


# =============================================================================
# Brownian and Bessel
# =============================================================================


class TestBessel:
    def test_brownian_variance(self):
        b = brownian_batch(0.01, 1.0, paths=4000, seed=0, record=False)
        assert abs(b.final.var() - 1.0) < 0.1

    def test_brownian_path_starts_at_zero(self):
        path = brownian_path(0.01, 1.0, seed=3)
        assert len(path.values) == 101 and path.values[0] == 0.0
        np.testing.assert_array_equal(path.values, path.brownian)

    def test_squared_mean_grows_linearly(self):
        p = BesselParams(delta=3.0, x0=0.0)
        batch = bessel_batch(p, 0.01, 1.0, paths=4000, seed=1, record=False)
        assert abs(np.mean(batch.final**2) - 3.0) < 0.2

    @pytest.mark.parametrize("scheme", ["besq", "direct"])
    def test_noise_replays_path(self, scheme):
        p = BesselParams(delta=1.5, x0=0.3)
        first = bessel_path(p, 0.01, 0.5, seed=7, scheme=scheme)
        again = bessel_path(p, 0.01, 0.5, seed=999, scheme=scheme, noise=first.driver_noise[None])
        np.testing.assert_array_equal(first.values, again.values)

    def test_paths_stay_non_negative(self):
        batch = bessel_batch(BesselParams(delta=0.5), 0.01, 1.0, paths=50, seed=2, scheme="direct")
        assert (batch.values >= 0).all()

    def test_companion_matches_principal_value(self):
        p = BesselParams(delta=2.5, x0=1.0)
        path = bessel_path(p, 0.01, 1.0, seed=3)
        expected = principal_value(path.values, 1.0, path.brownian, 2.5)
        np.testing.assert_allclose(path.companion, expected)

    def test_unknown_scheme(self):
        with pytest.raises(ValueError, match="Unknown scheme"):
            bessel_batch(BesselParams(delta=1), 0.1, 1.0, scheme="milstein")

    def test_noise_shape_checked(self):
        with pytest.raises(ValueError, match="shape"):
            bessel_batch(BesselParams(delta=1), 0.1, 1.0, paths=2, noise=np.zeros((1, 10)))

    def test_unrecorded_batch_has_no_paths(self):
        batch = bessel_batch(BesselParams(delta=2), 0.1, 1.0, paths=3, record=False)
        with pytest.raises(ValueError, match="without recording"):
            batch.path(0)


class TestCompanions:
    def test_principal_value_degenerates_at_one(self):
        with pytest.raises(DegenerateDelta):
            principal_value(1.0, 0.0, 0.0, 1.0)

    def test_local_time_form_at_one(self):
        assert bessel_companion(2.0, 0.5, 1.0, 1.0) == pytest.approx(1.0)

    def test_principal_value(self):
        assert principal_value(2.0, 0.5, 1.0, 0.5) == pytest.approx(-2.0)


def test_exact_squared_bessel_step_mean():
    z = besq_exact_step(2.0, 1.0, 0.5, seed=4, size=20_000)
    assert abs(z.mean() - 2.0) < 0.06
    with pytest.raises(ValueError):
        besq_exact_step(2.0, -1.0, 0.5)


def test_exact_step_accepts_array_start():
    z = besq_exact_step(1.0, np.array([0.0, 1.0, 4.0]), 1e-2, seed=5)
    assert z.shape == (3,)
    assert (z > 0).all()


def test_bridge_zero_probability_for_reflected_brownian():
    x, y, h = np.array([0.1, 0.3, 1.0]), np.array([0.2, 0.1, 1.0]), 0.05
    np.testing.assert_allclose(
        bridge_zero_probability(1.0, x, y, h), 1.0 - np.tanh(x * y / h), rtol=1e-6, atol=1e-12
    )
    assert bridge_zero_probability(1.0, 0.0, 0.5, h) == 1.0
    assert (bridge_zero_probability(2.5, x, y, h) == 0.0).all()


def test_exact_grid_hit_fraction_matches_gamma_oracle():
    _, final, first = exact_bessel_grid(
        BesselParams(delta=1.0, x0=1.0), 1e-3, 1.0, paths=2000, seed=6, record=False
    )
    oracle = stats.gamma(0.5).sf(0.5)
    se = np.sqrt(oracle * (1 - oracle) / 2000)
    assert final.shape == (2000,)
    assert abs(np.mean(first >= 0) - oracle) < 4 * se


def test_count_upcrossings():
    assert count_upcrossings(np.array([0.0, 2.0, 0.0, 2.0, 1.0]), 0.5, 1.5) == 2
    assert count_upcrossings(np.array([1.0, 2.0, 0.0, 1.0]), 0.5, 1.5) == 0
    two = count_upcrossings(np.array([[0.0, 2.0], [2.0, 0.0]]), 0.5, 1.5)
    assert list(two) == [1, 0]


# =============================================================================
# Epsilon-jumping Bessel
# =============================================================================


class TestEpsBessel:
    def test_driftless_decomposition_is_exact(self):
        p = BesselParams(delta=1.0, x0=0.2, epsilon=0.1)
        path = eps_bessel_path(p, 0.001, 1.0, seed=5)
        np.testing.assert_allclose(path.values, 0.2 + path.brownian + path.jumps, atol=1e-9)

    def test_jumps_are_multiples_of_epsilon(self):
        p = BesselParams(delta=0.5, x0=0.0, epsilon=0.05)
        batch = eps_bessel_batch(p, 0.001, 1.0, paths=20, seed=6)
        assert (batch.values > 0).all()
        np.testing.assert_allclose(batch.final_jumps, batch.jump_counts * 0.05)
        np.testing.assert_allclose(batch.jump_square_sum, batch.jump_counts * 0.05**2)
        k = batch.final_jumps / 0.05
        np.testing.assert_allclose(k, np.round(k))

    def test_jump_events_increase(self):
        p = BesselParams(delta=0.5, x0=0.0, epsilon=0.05)
        path = eps_bessel_path(p, 0.001, 1.0, seed=8)
        idx = [i for i, _ in path.jump_events]
        assert idx == sorted(set(idx))
        assert sum(s for _, s in path.jump_events) == pytest.approx(path.jumps[-1])

    def test_needs_epsilon(self):
        with pytest.raises(ValueError, match="epsilon"):
            eps_bessel_batch(BesselParams(delta=1.0), 0.01, 1.0)

    def test_reference_shares_noise(self):
        p = BesselParams(delta=1.5, x0=0.5, epsilon=0.1)
        batch = eps_bessel_batch(p, 0.01, 1.0, paths=4, seed=9)
        plain = bessel_batch(p, 0.01, 1.0, paths=4, scheme="direct", noise=batch.noise)
        np.testing.assert_allclose(batch.reference, plain.values)


# =============================================================================
# Skew Bessel
# =============================================================================


class TestSkewBessel:
    @pytest.mark.parametrize(
        "delta,beta,mu",
        [(1.0, 0.3, 0.0), (2.5, 0.0, 0.0), (0.0, 0.0, 0.0), (0.5, 0.0, 1.0)],
    )
    def test_invalid_combos(self, delta, beta, mu):
        with pytest.raises(InvalidSkewCombo):
            check_skew_combo(delta, beta, mu)

    @pytest.mark.parametrize("delta,beta,mu", [(1.0, 0.0, 0.7), (0.5, -0.4, 0.0), (1.5, 1.0, 0.0)])
    def test_valid_combos(self, delta, beta, mu):
        check_skew_combo(delta, beta, mu)

    def test_magnitude_is_a_bessel_path(self):
        p = BesselParams(delta=0.5, x0=0.0, beta=0.2)
        batch = skew_bessel_batch(p, 0.01, 1.0, paths=5, seed=10)
        assert set(np.unique(batch.signs)) <= {-1.0, 1.0}
        np.testing.assert_allclose(np.abs(batch.values), batch.values * batch.signs)

    def test_final_sign_follows_beta(self):
        p = BesselParams(delta=0.5, x0=0.0, beta=0.6)
        batch = skew_bessel_batch(p, 0.01, 0.5, paths=2000, seed=11)
        assert abs(np.mean(batch.final >= 0) - 0.8) < 0.04

    def test_seeded_runs_repeat(self):
        p = BesselParams(delta=1.0, beta=0.0, mu=0.5)
        a = skew_bessel_batch(p, 0.01, 0.5, paths=3, seed=12)
        b = skew_bessel_batch(p, 0.01, 0.5, paths=3, seed=12)
        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_array_equal(a.companion, b.companion)

    def test_single_path(self):
        path = skew_bessel_path(BesselParams(delta=1.5, x0=0.3, beta=-0.5), 0.01, 0.2, seed=13)
        assert len(path.values) == 21
        assert path.values[0] == pytest.approx(0.3)


def test_first_excursion_keeps_start_sign():
    mag = np.array([0.5, 0.4, 0.0, 0.3, 0.6])
    signs = excursion_signs(mag, -0.5, 1.0, 0.1, np.random.default_rng(0))
    assert signs[0] == signs[1] == -1.0
    assert signs[3] == signs[4] == 1.0
