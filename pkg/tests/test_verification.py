"""Tests for the acceptance suites behind ``sletree verify``."""

import math

import numpy as np
import pytest

from sletree.core import verification
from sletree.core.observability import RunLogger
from sletree.core.verification import (
    SUITES,
    CheckResult,
    SuiteReport,
    check_seed,
    resolve_suites,
    run_suite,
)


class TestSeeds:
    def test_stable_and_distinct(self):
        assert check_seed(0, "bessel") == check_seed(0, "bessel")
        assert check_seed(0, "bessel") != check_seed(0, "stable")
        assert check_seed(1, "bessel") != check_seed(2, "bessel")

    def test_range(self):
        for seed in (0, 7, 2**64 - 1):
            assert 0 <= check_seed(seed, "cle_radius") < 2**63


class TestResolveSuites:
    def test_all(self):
        assert resolve_suites("all") == list(SUITES)

    def test_single(self):
        assert resolve_suites("cle") == ["cle"]

    def test_unknown(self):
        with pytest.raises(ValueError, match="Unknown suite"):
            resolve_suites("physics")


class TestSuiteReport:
    def test_exploratory_failures_do_not_gate(self):
        report = SuiteReport(suites=["x"], seed=0, quick=True)
        report.checks = [
            CheckResult("a", "x", True),
            CheckResult("b", "x", False, gating=False),
        ]
        assert report.passed
        assert report.failures == []

    def test_gating_failure(self):
        report = SuiteReport(suites=["x"], seed=0, quick=False)
        report.checks = [CheckResult("a", "x", False, statistic=0.3, threshold=0.1)]
        assert not report.passed
        assert [c.name for c in report.failures] == ["a"]
        doc = report.to_dict()
        assert doc["passed"] is False
        assert doc["checks"][0]["statistic"] == 0.3


class TestDiscreteSuite:
    def test_passes_and_logs(self, run_db):
        logger = RunLogger(run_db)
        report = run_suite("discrete", seed=0, quick=True, logger=logger)

        assert report.passed, [c.to_dict() for c in report.failures]
        names = [c.name for c in report.checks]
        assert "bijection_flower7" in names
        assert "normal_tree_counts" in names
        assert "boundary_path_equivalence" in names
        assert {"height_adjacency", "height_monotonicity", "height_rotation"} <= set(names)

        checks = logger.get_checks()
        assert len(checks) == len(report.checks)
        verify = [e for e in logger.get_session() if e.phase == "verify"]
        assert verify[0].data["passed"] is True
        assert verify[0].data["failures"] == []

    def test_normal_tree_counts(self):
        report = run_suite("discrete", quick=True)
        counts = next(c for c in report.checks if c.name == "normal_tree_counts")
        assert counts.details["counts"] == {"hex1": 2, "pair2": 4, "tri3": 8}


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["onmodel", "stochastic", "loewner", "cle"])
def test_quick_suites_pass(suite):
    report = run_suite(suite, seed=0, quick=True)
    assert report.checks
    assert report.passed, [c.to_dict() for c in report.failures]


@pytest.mark.slow
def test_exploratory_suite_never_gates():
    report = run_suite("exploratory", seed=0, quick=True)
    assert all(not c.gating for c in report.checks)
    assert report.passed


class TestLoewnerChecks:
    def test_eps_driver_convergence_uses_nonzero_rho(self):
        results = {c.name: c for c in verification._kr_driver(0, quick=True)}
        conv = results["eps_driver_convergence"]
        assert conv.details["kappa_rho"] == [6.0, 2.0]
        assert min(conv.details["mean_sup_distance"]) > 1e-9
        assert conv.passed


class TestCleRadiusRefinement:
    @staticmethod
    def _fake_sample(kappa, beta, eps, dt, count, seed, jobs=1):
        bias = {1e-3: 1.03, 1e-4: 1.01, 4e-4: 1.02}[dt]
        return np.full(count, math.pi**2 * bias)

    def test_full_mode_extrapolates_to_zero_step(self, monkeypatch):
        monkeypatch.setattr(verification.cle, "conformal_radius_sample", self._fake_sample)
        results = {c.name: c for c in verification._cle_radius(0, quick=False)}
        check = results["cle_radius_dt_extrapolation"]
        assert check.details["dt"] == [4e-4, 1e-4]
        assert check.details["extrapolated"] == pytest.approx(math.pi**2)
        assert check.passed

    def test_quick_mode_skips_extrapolation(self, monkeypatch):
        monkeypatch.setattr(verification.cle, "conformal_radius_sample", self._fake_sample)
        names = [c.name for c in verification._cle_radius(0, quick=True)]
        assert "cle_radius_dt_extrapolation" not in names
