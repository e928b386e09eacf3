"""Tests for height functions: base value, adjacency bound, monotonicity, root rotation."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sletree.core.exploration import all_colorings, height_function
from sletree.core.hexgrid import build_patch, face_neighbors, named_patch
from sletree.core.loops import Coloring


def test_lone_hexagon_height_is_zero():
    patch = build_patch(named_patch("hex1"))
    for c in all_colorings(patch):
        h = height_function(c)
        assert h.values == {(0, 0): 0}
        assert h.base_value == 0


def test_base_face_holds_base_value(flower7):
    for p in flower7.degree_two_positions()[:4]:
        h = height_function(Coloring.from_ids(flower7, [2, 4]), p)
        assert h.values[h.base_face] == h.base_value
        assert h.base_value == flower7.rotation_constant(p)


@settings(max_examples=60, deadline=None)
@given(mask=st.integers(0, 127))
def test_adjacent_faces_differ_by_at_most_six(mask):
    patch = build_patch(named_patch("flower7"))
    h = height_function(Coloring.from_mask(patch, mask)).values
    for f in patch.faces:
        for g in face_neighbors(f):
            if g in h:
                assert abs(h[f] - h[g]) <= 6


@pytest.mark.parametrize("name", ["tri3", "rect 2 2"])
def test_adding_black_faces_raises_heights(name):
    patch = build_patch(named_patch(name))
    nf = len(patch.faces)
    heights = [height_function(Coloring.from_mask(patch, m)).values for m in range(1 << nf)]
    for a, b in itertools.product(range(1 << nf), repeat=2):
        if a & ~b == 0:
            assert all(heights[a][f] <= heights[b][f] for f in patch.faces)


def test_counterclockwise_root_moves_never_lower_heights():
    patch = build_patch(named_patch("tri3"))
    shifts = [p for p in patch.degree_two_positions() if p != patch.root_position]
    assert shifts
    for c in all_colorings(patch):
        base = height_function(c).values
        for p in shifts:
            moved = height_function(c, p).values
            assert all(moved[f] >= base[f] for f in patch.faces)
