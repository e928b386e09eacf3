"""Tests for seeds, run files, chunked execution, validators and error codes."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from sletree.core.config import (
    ConfigError,
    RunConfig,
    parse_run_file,
    resolve_seed,
    run_chunks,
    spawn_seeds,
)
from sletree.core.errors import DegenerateDelta, NotBranchSeparated, TooLarge
from sletree.core.validation import (
    ErrorCode,
    error_code_for,
    error_response,
    validate_beta,
    validate_kappa,
    validate_positive,
    validate_seed,
)


def _square(x):
    return x * x


class TestSeeds:
    def test_explicit_wins(self):
        assert resolve_seed(5, {"CLE_SEED": "9"}) == 5

    def test_environment(self):
        assert resolve_seed(None, {"CLE_SEED": " 42 "}) == 42

    def test_default(self):
        assert resolve_seed(None, {}) == 0
        assert resolve_seed(None, {"CLE_SEED": ""}) == 0

    @pytest.mark.parametrize("raw", ["abc", "-1", str(2**64), "1.5"])
    def test_malformed_environment(self, raw):
        with pytest.raises(ConfigError, match="CLE_SEED"):
            resolve_seed(None, {"CLE_SEED": raw})

    def test_spawned_generators_are_independent_and_repeatable(self):
        a = [g.random() for g in spawn_seeds(7, 3)]
        b = [g.random() for g in spawn_seeds(7, 3)]
        assert a == b
        assert len(set(a)) == 3

    def test_run_config_bounds(self):
        assert RunConfig(command="verify", seed=2**64 - 1).seed == 2**64 - 1
        with pytest.raises(ValidationError):
            RunConfig(command="verify", seed=-1)
        with pytest.raises(ValidationError):
            RunConfig(command="verify", jobs=0)


class TestRunFiles:
    def test_parse(self):
        text = "cle-radius-hist:\n  kappa: 4\n  t-max: 50\nverify:\n"
        assert parse_run_file(text) == {
            "cle-radius-hist": {"kappa": 4, "t_max": 50},
            "verify": {},
        }

    def test_empty(self):
        assert parse_run_file("") == {}

    def test_duplicate_keys(self):
        with pytest.raises(ConfigError, match="Duplicate key"):
            parse_run_file("verify:\n  quick: true\n  quick: false\n")

    @pytest.mark.parametrize("text", ["- a\n- b\n", "verify: 3\n", "a: [1\n"])
    def test_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_run_file(text)


class TestRunChunks:
    def test_serial_and_parallel_agree(self):
        tasks = list(range(6))
        assert run_chunks(_square, tasks, 1) == run_chunks(_square, tasks, 2) == [
            0, 1, 4, 9, 16, 25
        ]

    def test_jobs_must_be_positive(self):
        with pytest.raises(ValueError, match="jobs"):
            run_chunks(_square, [1], 0)


class TestValidators:
    @pytest.mark.parametrize("seed", [0, "12", 2**64 - 1, 3.0])
    def test_valid_seeds(self, seed):
        assert validate_seed(seed) == (True, None)

    @pytest.mark.parametrize("seed", [-1, 2**64, "x", None, 2.5])
    def test_invalid_seeds(self, seed):
        ok, msg = validate_seed(seed)
        assert not ok and "seed" in msg

    def test_beta(self):
        assert validate_beta(-1.0)[0] and validate_beta(1.0)[0]
        assert not validate_beta(1.01)[0]

    def test_kappa(self):
        assert validate_kappa(0.0)[0]
        assert not validate_kappa(-0.5)[0]
        assert validate_kappa(4.0, 8 / 3, 8)[0]
        ok, msg = validate_kappa(8.0, 8 / 3, 8)
        assert not ok and "(2.66667, 8)" in msg
        assert not validate_kappa(math.nan)[0]

    def test_positive(self):
        assert validate_positive("dt", 1e-3)[0]
        for bad in (0.0, -1.0, math.inf):
            assert not validate_positive("dt", bad)[0]


class TestErrorCodes:
    def test_mapping(self):
        assert error_code_for(TooLarge("x")) is ErrorCode.TOO_LARGE
        assert error_code_for(DegenerateDelta("x")) is ErrorCode.DOMAIN_ERROR
        assert error_code_for(NotBranchSeparated("x")) is ErrorCode.VALIDATION_ERROR
        assert error_code_for(ValueError("x")) is ErrorCode.VALIDATION_ERROR
        assert error_code_for(OSError("x")) is ErrorCode.SYSTEM_ERROR

    def test_response(self):
        r = error_response(ErrorCode.TOO_LARGE, "too many faces", {"faces": 25}, "use on-sample")
        assert r == {
            "success": False,
            "error_code": "too_large",
            "error": "too many faces",
            "details": {"faces": 25},
            "hint": "use on-sample",
        }

    def test_response_omits_empty_fields(self):
        assert set(error_response(ErrorCode.SYSTEM_ERROR, "disk full")) == {
            "success",
            "error_code",
            "error",
        }


def test_seed_arrays_are_reproducible():
    g1, g2 = spawn_seeds(3, 2)
    h1, _ = spawn_seeds(3, 2)
    np.testing.assert_array_equal(g1.random(4), h1.random(4))
    assert not np.array_equal(spawn_seeds(3, 2)[0].random(4), g2.random(4))
