"""Tests for the run logger and the ``log summary`` command."""

import json
import sqlite3

import pytest

from sletree.cli.main import cli
from sletree.core.config import RunConfig
from sletree.core.observability import RunLogger


class TestRunLogger:
    def test_phases_are_recorded_in_order(self, run_db):
        logger = RunLogger(run_db)
        logger.log_config(RunConfig(command="bessel-csv", seed=3, params={"delta": 1.5}))
        logger.log_sample("bessel paths", 10, dt=0.01)
        logger.log_check("bessel_mean", True, statistic=0.02, threshold=0.1)
        logger.log_write("out.csv", "csv", 128)

        entries = logger.get_session()
        assert [e.phase for e in entries] == ["config", "sample", "check", "write"]
        assert entries[0].data["seed"] == 3
        assert entries[0].data["params"] == {"delta": 1.5}
        assert entries[1].data == {"what": "bessel paths", "count": 10, "dt": 0.01}
        assert entries[3].data["bytes"] == 128

    def test_invalid_phase(self, run_db):
        with pytest.raises(ValueError, match="Invalid phase"):
            RunLogger(run_db).log("research", {})

    def test_error_entries(self, run_db):
        logger = RunLogger(run_db)
        logger.log_error("TooLarge", {"faces": 25}, "use on-sample")
        errors = logger.get_errors()
        assert len(errors) == 1
        assert errors[0].data == {
            "error_type": "TooLarge",
            "details": {"faces": 25},
            "resolution": "use on-sample",
        }

    def test_checks_filter_by_outcome(self, run_db):
        logger = RunLogger(run_db)
        logger.log_check("a", True)
        logger.log_check("b", False, details={"p": 0.001})
        logger.log_check("c", True)
        assert {e.data["name"] for e in logger.get_checks(passed=True)} == {"a", "c"}
        assert [e.data["name"] for e in logger.get_checks(passed=False)] == ["b"]
        assert len(logger.get_checks()) == 3

    def test_checks_view(self, run_db):
        logger = RunLogger(run_db)
        logger.log_check("ks", False, statistic=0.3)
        with sqlite3.connect(run_db) as conn:
            rows = conn.execute("SELECT name, passed, statistic FROM checks").fetchall()
        assert rows == [("ks", 0, 0.3)]

    def test_summary_counts(self, run_db):
        logger = RunLogger(run_db)
        logger.log_check("a", True)
        logger.log_check("b", False)
        logger.log_error("OutOfRange")
        s = logger.get_session_summary()
        assert s["session_id"] == logger.session_id
        assert s["check_counts"] == {"passed": 1, "failed": 1}
        assert s["error_count"] == 1
        assert s["total_logs"] == 3

    def test_sessions_listed_by_recency(self, run_db):
        logger = RunLogger(run_db)
        first = logger.session_id
        logger.log_sample("x", 1)
        second = logger.new_session()
        logger.log_sample("y", 1)
        assert logger.list_sessions() == [second, first]


# =============================================================================
# log summary
# =============================================================================


class TestLogSummaryCommand:
    def test_json_defaults_to_latest_session(self, runner, run_db):
        logger = RunLogger(run_db)
        first = logger.session_id
        logger.log_sample("paths", 5)
        latest = logger.new_session()
        logger.log_check("bessel_mean", True)

        result = runner.invoke(cli, ["log", "summary", "--db", str(run_db), "--json"])

        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["session_id"] == latest != first
        assert payload["phase_counts"] == {"check": 1}

    def test_json_honors_session_id(self, runner, run_db):
        logger = RunLogger(run_db)
        first = logger.session_id
        logger.log_sample("paths", 5)
        logger.new_session()
        logger.log_check("bessel_mean", True)

        result = runner.invoke(
            cli, ["log", "summary", "--db", str(run_db), "--session-id", first, "--json"]
        )

        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["session_id"] == first
        assert payload["total_logs"] == 1

    def test_text_output(self, runner, run_db):
        logger = RunLogger(run_db)
        logger.log_check("a", True)
        logger.log_check("b", False)

        result = runner.invoke(cli, ["log", "summary", "--db", str(run_db)])

        assert result.exit_code == 0
        assert "Checks: 1 passed, 1 failed" in result.output
        assert "  - check: 2" in result.output

    def test_missing_db(self, runner, tmp_path):
        result = runner.invoke(cli, ["log", "summary", "--db", str(tmp_path / "missing.db")])
        assert result.exit_code != 0
        assert "does not exist" in result.output

    def test_commands_log_their_config(self, runner, run_db):
        result = runner.invoke(
            cli, ["--log-db", str(run_db), "heights-csv", "--faces", "hex1", "--black", "0"]
        )
        assert result.exit_code == 0
        entries = RunLogger(run_db).get_session(RunLogger(run_db).list_sessions()[0])
        config = [e for e in entries if e.phase == "config"]
        assert config and config[0].data["command"] == "heights-csv"
