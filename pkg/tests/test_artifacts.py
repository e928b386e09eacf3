"""Tests for artifact writers: atomic files, CSV, JSON and SVG."""

import json
import math

import numpy as np
import pytest

from sletree.core.artifacts import (
    atomic_write_text,
    csv_text,
    json_text,
    loop_arcs_svg,
    metadata_line,
    trace_svg,
    tree_svg,
)
from sletree.core.exploration import exploration_tree
from sletree.core.loops import Coloring


class TestAtomicWrite:
    def test_writes_and_counts_bytes(self, tmp_path):
        target = tmp_path / "nested" / "out.csv"
        assert atomic_write_text(target, "hé\n") == 4
        assert target.read_text(encoding="utf-8") == "hé\n"

    def test_replaces_and_leaves_no_temp_files(self, tmp_path):
        target = tmp_path / "out.txt"
        atomic_write_text(target, "old")
        atomic_write_text(target, "new")
        assert target.read_text() == "new"
        assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


class TestCsv:
    def test_metadata_then_header(self):
        text = csv_text("bessel-csv", 7, ["t", "X"], [(0.0, 1), (0.5, True)], delta=1.5)
        lines = text.splitlines()
        assert lines[0] == "# sletree bessel-csv seed=7 delta=1.5"
        assert lines[1] == "t,X"
        assert lines[2:] == ["0,1", "0.5,true"]

    def test_floats_round_trip(self):
        x = 0.1 + 0.2
        line = csv_text("c", 0, ["x"], [(x,)]).splitlines()[2]
        assert float(line) == x

    def test_metadata_line_without_extras(self):
        assert metadata_line("verify", None) == "# sletree verify seed=None"


class TestJson:
    def test_sorted_with_seed(self):
        doc = json.loads(json_text({"b": 1, "a": np.int64(2)}, seed=5))
        assert list(doc) == ["a", "b", "seed"]
        assert doc["seed"] == 5

    def test_non_finite_becomes_null(self):
        doc = json.loads(json_text({"mean": math.nan, "tail": [np.float64(math.inf), 1.5]}))
        assert doc == {"mean": None, "tail": [None, 1.5]}

    def test_numpy_and_complex_values(self):
        doc = json.loads(json_text({"v": np.array([1, 2]), "z": 1 + 2j, "ok": np.bool_(True)}))
        assert doc == {"v": [1, 2], "z": [1.0, 2.0], "ok": True}

    def test_explicit_seed_key_is_kept(self):
        assert json.loads(json_text({"seed": 1}, seed=9))["seed"] == 1


class TestSvg:
    def test_tree_svg_is_deterministic(self, flower7):
        c = Coloring.from_ids(flower7, [0, 3])
        t = exploration_tree(c)
        a = tree_svg(c, t, 11)
        assert a == tree_svg(c, t, 11)
        assert "<!-- sletree tree-svg seed=11 -->" in a
        assert a.count("<polygon") == 7
        assert a.count("<polyline") == len(flower7.vertices) - 1
        assert a.rstrip().endswith("</svg>")

    @pytest.mark.parametrize("mode", ["chordal", "radial"])
    def test_trace_svg(self, mode):
        pts = np.array([0j, 0.1 + 0.3j, -0.2 + 0.5j])
        svg = trace_svg(pts, mode, 3)
        assert "seed=3" in svg
        assert svg.count("<polyline") == (2 if mode == "chordal" else 1)

    def test_loop_arcs_svg_skips_single_points(self):
        class _Trace:
            def __init__(self, points):
                self.points = points

        class _Arc:
            def __init__(self, j, points):
                self.j, self.trace = j, _Trace(points)

        arcs = [_Arc(1, np.array([0.5, 0.5j, -0.5])), _Arc(2, np.array([0.1 + 0j]))]
        svg = loop_arcs_svg(arcs, 4)
        assert svg.count("<polyline") == 1
        assert "seed=4" in svg
