"""Tests for colorings, loop extraction, exploration trees and the tree/coloring bijection."""

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sletree.core.errors import NotBranchSeparated
from sletree.core.exploration import (
    ExplorationTree,
    Turn,
    all_colorings,
    boundary_path_from_loops,
    clockwise_boundary_path,
    coloring_from_tree,
    exploration_path,
    exploration_tree,
    exploration_walk,
    is_branch_separated,
    loop_edges_outside_tree,
    normal_spanning_tree_count,
    oriented_exploration_tree,
    renewal_times,
)
from sletree.core.hexgrid import build_patch, face_corners, named_patch
from sletree.core.loops import (
    CCW,
    CW,
    AllWhiteOutside,
    ChordalArc,
    Coloring,
    loops_from_coloring,
    orient_loops,
)

HEX = face_corners((0, 0))  # counterclockwise from 30 degrees; HEX[4] is the root


@pytest.fixture
def hex1():
    return build_patch(named_patch("hex1"))


def _spanning_trees(patch):
    edges = sorted(tuple(sorted(e)) for e in patch.edges)
    for chosen in itertools.combinations(edges, len(patch.vertices) - 1):
        g = nx.Graph(chosen)
        if g.number_of_nodes() == len(patch.vertices) and nx.is_tree(g):
            parent = {patch.root: None}
            for a, b in nx.bfs_edges(g, patch.root):
                parent[b] = a
            yield ExplorationTree.from_parents(patch, parent)


class TestColoring:
    def test_black_must_lie_in_patch(self, hex1):
        with pytest.raises(ValueError, match="not in patch"):
            Coloring(hex1, frozenset({(3, 3)}))

    def test_face_id_out_of_range(self, hex1):
        with pytest.raises(ValueError, match="out of range"):
            Coloring.from_ids(hex1, [1])

    def test_chordal_arc_endpoints_must_differ(self, hex1):
        with pytest.raises(ValueError, match="differ"):
            Coloring(hex1, frozenset(), ChordalArc(hex1.root, hex1.root))

    def test_mask_round_trip(self, flower7):
        c = Coloring.from_ids(flower7, [0, 3, 6])
        assert Coloring.from_mask(flower7, c.mask).black == c.black
        assert c.black_ids == (0, 3, 6)


class TestLoops:
    def test_lone_white_hexagon_has_no_loops(self, hex1):
        e = loops_from_coloring(Coloring(hex1))
        assert e.loop_count == 0
        assert e.edge_count == 0

    def test_lone_black_hexagon_is_one_counterclockwise_loop(self, hex1):
        e = loops_from_coloring(Coloring.from_ids(hex1, [0]))
        assert e.loop_count == 1
        assert set(e.loops[0]) == {(HEX[k], HEX[(k + 1) % 6]) for k in range(6)}

    def test_all_black_flower_is_its_outer_boundary(self, flower7):
        e = loops_from_coloring(Coloring.from_ids(flower7, range(7)))
        assert e.loop_count == 1
        assert e.edge_count == 18

    def test_chordal_arc_gives_open_path(self, hex1):
        c = Coloring(hex1, frozenset(), ChordalArc(hex1.root, HEX[1]))
        e = loops_from_coloring(c)
        assert e.loop_count == 0
        assert e.path_vertices() == (HEX[4], HEX[3], HEX[2], HEX[1])
        assert e.path_vertices()[0] == hex1.root
        assert e.edge_count == 3

    def test_loops_are_disjoint(self, flower7):
        for c in all_colorings(flower7):
            e = loops_from_coloring(c)
            seen = [u for lp in e.loops for u, _ in lp]
            assert len(seen) == len(set(seen))


class TestExplorationPath:
    def test_target_root_is_single_vertex(self, hex1):
        assert exploration_path(Coloring(hex1), hex1.root) == (hex1.root,)

    def test_black_hexagon_turns_right_then_hugs_it(self, hex1):
        path, turns = exploration_walk(Coloring.from_ids(hex1, [0]), HEX[1])
        assert path == (HEX[4], HEX[5], HEX[0], HEX[1])
        assert turns[0] == Turn.RIGHT

    def test_white_hexagon_turns_left(self, hex1):
        path, turns = exploration_walk(Coloring(hex1), HEX[1])
        assert path == (HEX[4], HEX[3], HEX[2], HEX[1])
        assert turns[0] == Turn.LEFT

    def test_unknown_target(self, hex1):
        with pytest.raises(ValueError, match="not a patch vertex"):
            exploration_path(Coloring(hex1), (99, 98))


class TestExplorationTree:
    def test_lone_hexagon_tree_drops_one_edge(self, hex1):
        t = exploration_tree(Coloring.from_ids(hex1, [0]))
        assert len(t.edges()) == 5
        assert frozenset((HEX[3], HEX[4])) not in t.edges()

    def test_lone_hexagon_has_two_trees(self, hex1):
        keys = {exploration_tree(c).key for c in all_colorings(hex1)}
        assert len(keys) == 2

    def test_tri3_has_eight_trees(self):
        patch = build_patch(named_patch("tri3"))
        keys = {exploration_tree(c).key for c in all_colorings(patch)}
        assert len(keys) == 8

    def test_branch_points_have_one_proper_child(self, flower7):
        t = exploration_tree(Coloring.from_ids(flower7, [1, 2, 5]))
        for v, proper in t.branch_points.items():
            kids = t.children(v)
            assert len(kids) == 2 and proper in kids
            assert not t.turn[proper].forced

    def test_from_parents_requires_spanning_map(self, hex1):
        with pytest.raises(ValueError, match="span"):
            ExplorationTree.from_parents(hex1, {hex1.root: None})


@settings(max_examples=40, deadline=None)
@given(mask=st.integers(0, 127))
def test_flower_bijection_and_tree_paths(mask):
    patch = build_patch(named_patch("flower7"))
    c = Coloring.from_mask(patch, mask)
    t = exploration_tree(c)
    assert is_branch_separated(patch, t)
    assert coloring_from_tree(patch, t).black == c.black
    for v in patch.boundary_cycle[::5]:
        assert t.path_to(v) == exploration_path(c, v)
    assert all(m == 1 for m in loop_edges_outside_tree(loops_from_coloring(c), t))


@settings(max_examples=40, deadline=None)
@given(mask=st.integers(0, 127))
def test_free_tree_edges_keep_black_on_the_left(mask):
    patch = build_patch(named_patch("flower7"))
    c = Coloring.from_mask(patch, mask)
    t = exploration_tree(c)
    for v, p in t.parent.items():
        if p is None or t.turn[v].forced or not c.is_separating(p, v):
            continue
        left_black, _ = c.side_colors(p, v)
        assert left_black


class TestBranchSeparation:
    def test_normal_tree_counts(self):
        counts = {n: normal_spanning_tree_count(build_patch(named_patch(n))) for n in
                  ("hex1", "pair2", "tri3")}
        assert counts == {"hex1": 2, "pair2": 4, "tri3": 8}

    def test_exhaustive_matches_edge_criterion(self, pair2):
        for t in _spanning_trees(pair2):
            assert is_branch_separated(pair2, t) == is_branch_separated(pair2, t, exhaustive=True)

    def test_exhaustive_refuses_large_patches(self, flower7):
        t = exploration_tree(Coloring(flower7))
        with pytest.raises(ValueError, match="limited"):
            is_branch_separated(flower7, t, exhaustive=True)

    def test_branching_tree_is_not_separated(self, hex1):
        g = hex1.graph.copy()
        g.remove_edge(HEX[1], HEX[2])
        parent = {hex1.root: None}
        for a, b in nx.bfs_edges(g, hex1.root):
            parent[b] = a
        t = ExplorationTree.from_parents(hex1, parent)
        assert not is_branch_separated(hex1, t)
        with pytest.raises(NotBranchSeparated):
            coloring_from_tree(hex1, t)

    def test_path_tree_inverts_to_black_face(self, hex1):
        t = exploration_tree(Coloring.from_ids(hex1, [0]))
        assert coloring_from_tree(hex1, t).black == {(0, 0)}


class TestBoundaryPaths:
    def test_empty_coloring_follows_boundary(self, hex1):
        c = Coloring(hex1)
        q = boundary_path_from_loops(c, loops_from_coloring(c), HEX[1])
        assert q == clockwise_boundary_path(hex1, HEX[1]) == (HEX[4], HEX[3], HEX[2], HEX[1])

    def test_black_hexagon_detours(self, hex1):
        c = Coloring.from_ids(hex1, [0])
        q = boundary_path_from_loops(c, loops_from_coloring(c), HEX[3])
        assert q == (HEX[4], HEX[5], HEX[0], HEX[1], HEX[2], HEX[3])

    def test_matches_chordal_exploration_on_rect22(self, rect22):
        targets = [v for v in rect22.boundary_cycle if v != rect22.root]
        for c in all_colorings(rect22):
            e = loops_from_coloring(c)
            for v in targets:
                arc = Coloring(rect22, c.black, ChordalArc(rect22.root, v))
                assert boundary_path_from_loops(c, e, v) == exploration_path(arc, v)

    def test_stops_at_first_arrival_at_target(self, rect22):
        c = Coloring.from_ids(rect22, [0])
        cycle = rect22.boundary_cycle
        target = cycle[(rect22.root_position + 1) % len(cycle)]
        q = boundary_path_from_loops(c, loops_from_coloring(c), target)
        arc = Coloring(rect22, c.black, ChordalArc(rect22.root, target))
        assert q == exploration_path(arc, target) == (rect22.root, target)
        assert len(set(q)) == len(q)

    def test_rejects_root_target(self, hex1):
        c = Coloring(hex1)
        with pytest.raises(ValueError, match="differ"):
            boundary_path_from_loops(c, loops_from_coloring(c), hex1.root)


class TestRenewals:
    def test_white_coloring_renews_every_step(self, hex1):
        r = renewal_times(Coloring(hex1), HEX[1])
        assert [k for k, _ in r] == [0, 1, 2, 3]
        assert all(exc == () for _, exc in r)

    def test_excursions_lie_on_single_loops(self, rect22):
        target = rect22.boundary_cycle[len(rect22.boundary_cycle) // 2]
        for c in all_colorings(rect22):
            owner = loops_from_coloring(c).loop_of_edge
            for _, exc in renewal_times(c, target):
                assert len({owner[frozenset(e)] for e in exc}) <= 1


class TestOrientations:
    def test_beta_one_reproduces_traced_orientation(self, flower7):
        for mask in (1, 0b1010101, 0b1111110, 0b1110111, 127):
            e = loops_from_coloring(Coloring.from_mask(flower7, mask))
            o = orient_loops(e, 1.0, seed=0)
            assert o.loops == o.traced
            assert all(o.loops[i] == CCW for i, p in enumerate(o.parent) if p == -1)

    def test_beta_minus_one_mirrors_a_single_loop(self, flower7):
        e = loops_from_coloring(Coloring.from_mask(flower7, 0b1111110))
        o = orient_loops(e, -1.0, seed=0)
        assert o.loops == tuple(-d for d in o.traced)

    def test_beta_minus_one_orients_nested_loops_alike(self, flower7):
        # petals black, center white: the center loop sits inside the outer one
        e = loops_from_coloring(Coloring.from_mask(flower7, 0b1110111))
        assert e.loop_count == 2
        o = orient_loops(e, -1.0, seed=0)
        assert o.loops == (CW, CW)

    def test_beta_zero_is_a_fair_coin(self, hex1):
        e = loops_from_coloring(Coloring.from_ids(hex1, [0]))
        draws = [orient_loops(e, 0.0, seed=s).loops[0] == CCW for s in range(2000)]
        p = sum(draws) / len(draws)
        assert abs(p - 0.5) < 4 * (0.25 / len(draws)) ** 0.5

    def test_beta_out_of_range(self, hex1):
        with pytest.raises(ValueError, match="beta"):
            orient_loops(loops_from_coloring(Coloring(hex1)), 1.5)

    @pytest.mark.parametrize("mask", [0, 5, 42, 0b1110111, 0b1111110, 127])
    def test_oriented_tree_with_beta_one_is_exploration_tree(self, flower7, mask):
        c = Coloring.from_mask(flower7, mask, AllWhiteOutside())
        e = loops_from_coloring(c)
        t = oriented_exploration_tree(e, orient_loops(e, 1.0, seed=3))
        assert t.key == exploration_tree(c).key
