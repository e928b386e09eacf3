"""Pytest configuration for sletree tests.

Fixture Architecture:
- flower7 / pair2 / rect22: small named patches, cheap enough to enumerate
- patch_file: a patch file on disk with a ``black`` line
- run_db: temporary run log database path
- runner: click CliRunner
"""

from pathlib import Path

import pytest
from click.testing import CliRunner

from sletree.core.hexgrid import build_patch, named_patch

# ============================================================================
# Patches
# ============================================================================


@pytest.fixture
def flower7():
    """Central hexagon with its six neighbors: 7 faces, 24 vertices."""
    return build_patch(named_patch("flower7"))


@pytest.fixture
def pair2():
    return build_patch(named_patch("pair2"))


@pytest.fixture
def rect22():
    """2x2 rhombus of faces; small enough for exact O(n) tables."""
    return build_patch(named_patch("rect 2 2"))


@pytest.fixture
def patch_file(tmp_path) -> Path:
    """Three-face patch file with faces 0 and 2 black."""
    path = tmp_path / "tri.patch"
    path.write_text("# tri3\n0 0\n1 0\n0 1\nblack 0, 2\n")
    return path


# ============================================================================
# CLI and logging
# ============================================================================


@pytest.fixture
def run_db(tmp_path) -> Path:
    """Path for a run log database (not created yet)."""
    return tmp_path / "runs.db"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    """Tests never see a seed from the caller's environment."""
    monkeypatch.delenv("CLE_SEED", raising=False)
