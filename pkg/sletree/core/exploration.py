"""Exploration paths and trees on colored hexagon graphs.

The exploration walks from the root, entering through the entry edge. At a
vertex with a choice it turns right when the face straight ahead (the pointed
face) is black and left when it is white, unless that choice cuts the target
off from the unvisited vertices; then the opposite turn is taken and recorded
as forced. The exploration tree is the depth-first tree built by the same
rule, and it determines the coloring back: this module also holds the inverse
map, the branch-separation test, height functions, renewal times and the
loop-oriented variant.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from sletree.core.errors import IntervalNestingError, NotBranchSeparated
from sletree.core.hexgrid import (
    LEFT,
    RIGHT,
    DirectedEdge,
    Face,
    HexPatch,
    Vertex,
    face_corners,
    turn as geometric_turn,
)
from sletree.core.loops import (
    CCW,
    AllWhiteOutside,
    BoundaryCondition,
    Coloring,
    LoopEnsemble,
    LoopOrientation,
)

EXHAUSTIVE_VERTEX_LIMIT = 16


class Turn(str, Enum):
    LEFT = "L"
    RIGHT = "R"
    FORCED_LEFT = "FL"
    FORCED_RIGHT = "FR"

    @classmethod
    def of(cls, direction: int, forced: bool = False) -> "Turn":
        if direction == LEFT:
            return cls.FORCED_LEFT if forced else cls.LEFT
        return cls.FORCED_RIGHT if forced else cls.RIGHT

    @property
    def direction(self) -> int:
        """Geometric direction: ``LEFT`` (+1) or ``RIGHT`` (-1), forced or not."""
        return LEFT if self in (Turn.LEFT, Turn.FORCED_LEFT) else RIGHT

    @property
    def forced(self) -> bool:
        return self in (Turn.FORCED_LEFT, Turn.FORCED_RIGHT)


@dataclass(frozen=True)
class ExplorationTree:
    """Rooted spanning tree with the turn taken into every non-root vertex.

    ``order`` is the discovery order; ``branch_points`` maps every vertex with
    two children to its proper (first explored) child.
    """

    patch: HexPatch
    parent: Dict[Vertex, Optional[Vertex]]
    turn: Dict[Vertex, Optional[Turn]]
    order: Tuple[Vertex, ...]
    branch_points: Dict[Vertex, Vertex]

    @property
    def root(self) -> Vertex:
        return self.order[0]

    @property
    def key(self) -> FrozenSet[Tuple[Vertex, Optional[Vertex]]]:
        """Hashable identity of the tree shape."""
        return frozenset(self.parent.items())

    def edges(self) -> FrozenSet[FrozenSet[Vertex]]:
        return frozenset(frozenset((v, p)) for v, p in self.parent.items() if p is not None)

    def incoming(self, v: Vertex) -> Vertex:
        """Tail of the edge entering ``v`` (the outside entry vertex for the root)."""
        p = self.parent[v]
        return self.patch.entry_edge[0] if p is None else p

    def children(self, v: Vertex) -> List[Vertex]:
        return [w for w in self.order if self.parent[w] == v]

    def path_to(self, v: Vertex) -> Tuple[Vertex, ...]:
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])  # type: ignore[arg-type]
        return tuple(reversed(out))

    @classmethod
    def from_parents(
        cls, patch: HexPatch, parent: Dict[Vertex, Optional[Vertex]]
    ) -> "ExplorationTree":
        """Wrap a bare parent map, recording geometric turns.

        Without a coloring the exploration order at branch points is unknown;
        the right-hand child is taken first.
        """
        roots = [v for v, p in parent.items() if p is None]
        if set(parent) != set(patch.vertices) or roots != [patch.root]:
            raise ValueError("parent map must span the patch and be rooted at the patch root")
        kids: Dict[Vertex, List[Vertex]] = {v: [] for v in patch.vertices}
        for v, p in parent.items():
            if p is not None:
                if not patch.has_edge(v, p):
                    raise ValueError(f"{p} - {v} is not a patch edge")
                kids[p].append(v)

        def incoming(v: Vertex) -> Vertex:
            p = parent[v]
            return patch.entry_edge[0] if p is None else p

        turns: Dict[Vertex, Optional[Turn]] = {patch.root: None}
        order: List[Vertex] = []
        branch: Dict[Vertex, Vertex] = {}
        stack = [patch.root]
        seen = set()
        while stack:
            v = stack.pop()
            if v in seen:
                raise ValueError("parent map contains a cycle")
            seen.add(v)
            order.append(v)
            ranked = sorted(kids[v], key=lambda w: geometric_turn(incoming(v), v, w))
            for w in ranked:
                turns[w] = Turn.of(geometric_turn(incoming(v), v, w))
            if len(ranked) == 2:
                branch[v] = ranked[0]
            stack.extend(reversed(ranked))
        if len(order) != len(patch.vertices):
            raise ValueError("parent map is not connected to the root")
        return cls(patch, dict(parent), turns, tuple(order), branch)


# -------------------------
# Preference rules
# -------------------------

Preference = Callable[[Vertex, Vertex], int]


def color_preference(c: Coloring) -> Preference:
    """Black pointed face: turn right; white: turn left."""

    def prefer(u: Vertex, v: Vertex) -> int:
        return RIGHT if c.pointed_black(u, v) else LEFT

    return prefer


def orientation_preference(ensemble: LoopEnsemble, orientation: LoopOrientation) -> Preference:
    """Follow oriented loops forward; off the loops counterclockwise vertices turn left."""
    patch = ensemble.patch
    assert patch is not None

    def prefer(u: Vertex, v: Vertex) -> int:
        if v in orientation.vertices:
            return LEFT if orientation.vertices[v] == CCW else RIGHT
        ahead = orientation.forward_successor(ensemble, v)
        if ahead is not None and ahead != u:
            return geometric_turn(u, v, ahead)
        # Entered against the loop direction (or at the path end): leave the loop.
        on_loop = {ensemble.forward.get(v), ensemble.backward.get(v)}
        off = [w for w in patch.neighbors(v) if w != u and w not in on_loop]
        return geometric_turn(u, v, off[0]) if off else LEFT

    return prefer


def _ordered_options(
    u: Vertex, v: Vertex, options: List[Vertex], preferred: int
) -> List[Tuple[Vertex, Turn]]:
    ranked = []
    for w in options:
        direction = geometric_turn(u, v, w)
        forced = direction != preferred
        ranked.append((int(forced), w, Turn.of(direction, forced)))
    ranked.sort()
    return [(w, t) for _, w, t in ranked]


def _depth_first(patch: HexPatch, prefer: Preference) -> ExplorationTree:
    outer, root = patch.entry_edge
    parent: Dict[Vertex, Optional[Vertex]] = {}
    turns: Dict[Vertex, Optional[Turn]] = {}
    order: List[Vertex] = []
    stack: List[Tuple[Vertex, Vertex, Optional[Turn]]] = [(root, outer, None)]
    while stack:
        v, u, t = stack.pop()
        if v in parent:
            continue
        parent[v] = None if v == root else u
        turns[v] = t
        order.append(v)
        options = [w for w in patch.neighbors(v) if w != u and w not in parent]
        for w, tw in reversed(_ordered_options(u, v, options, prefer(u, v))):
            stack.append((w, v, tw))

    branch: Dict[Vertex, Vertex] = {}
    kids: Dict[Vertex, List[Vertex]] = {}
    for v in order[1:]:
        kids.setdefault(parent[v], []).append(v)  # type: ignore[arg-type]
    for v, ks in kids.items():
        if len(ks) == 2:
            (proper,) = [w for w in ks if not turns[w].forced]  # type: ignore[union-attr]
            branch[v] = proper
    return ExplorationTree(patch, parent, turns, tuple(order), branch)


# -------------------------
# Paths and trees
# -------------------------


def exploration_walk(c: Coloring, target: Vertex) -> Tuple[Tuple[Vertex, ...], Tuple[Turn, ...]]:
    """Exploration path to ``target`` together with the turn taken at each step."""
    patch = c.patch
    if target not in patch.adjacency:
        raise ValueError(f"{target} is not a patch vertex")
    prefer = color_preference(c)
    u, v = patch.entry_edge
    path = [v]
    turns: List[Turn] = []
    visited = {v}
    while v != target:
        options = [w for w in patch.neighbors(v) if w not in visited]
        remaining = nx.restricted_view(patch.graph, visited, [])
        for w, t in _ordered_options(u, v, options, prefer(u, v)):
            if w == target or nx.has_path(remaining, w, target):
                break
        else:
            raise RuntimeError(f"target {target} unreachable from {v}")
        u, v = v, w
        path.append(v)
        turns.append(t)
        visited.add(v)
    return tuple(path), tuple(turns)


def exploration_path(c: Coloring, target: Vertex) -> Tuple[Vertex, ...]:
    return exploration_walk(c, target)[0]


def exploration_tree(c: Coloring) -> ExplorationTree:
    return _depth_first(c.patch, color_preference(c))


def oriented_exploration_tree(
    ensemble: LoopEnsemble, orientation: LoopOrientation
) -> ExplorationTree:
    """Exploration tree steered by loop orientations instead of face colors."""
    if ensemble.patch is None:
        raise ValueError("loop ensemble carries no patch")
    return _depth_first(ensemble.patch, orientation_preference(ensemble, orientation))


# -------------------------
# Branch separation and the inverse map
# -------------------------


def _preorder_intervals(t: ExplorationTree) -> Dict[Vertex, Tuple[int, int]]:
    kids: Dict[Vertex, List[Vertex]] = {v: [] for v in t.parent}
    for v, p in t.parent.items():
        if p is not None:
            kids[p].append(v)
    start: Dict[Vertex, int] = {}
    end: Dict[Vertex, int] = {}
    clock = 0
    stack: List[Tuple[Vertex, bool]] = [(t.root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            end[v] = clock
            continue
        start[v] = clock
        clock += 1
        stack.append((v, True))
        for w in sorted(kids[v], reverse=True):
            stack.append((w, False))
    return {v: (start[v], end[v]) for v in start}


def _comparable(iv: Dict[Vertex, Tuple[int, int]], a: Vertex, b: Vertex) -> bool:
    (sa, ea), (sb, eb) = iv[a], iv[b]
    return (sa <= sb and eb <= ea) or (sb <= sa and ea <= eb)


def _exhaustive_branch_separated(patch: HexPatch, iv: Dict[Vertex, Tuple[int, int]]) -> bool:
    verts = list(patch.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    nbr_mask = [sum(1 << idx[w] for w in patch.neighbors(v)) for v in verts]
    ancestors = [
        sum(1 << idx[w] for w in verts if w != v and _comparable(iv, v, w) and iv[w][0] < iv[v][0])
        for v in verts
    ]
    for mask in range(1, 1 << len(verts)):
        first = 1 << ((mask & -mask).bit_length() - 1)
        reach, frontier = first, first
        while frontier:
            grow = 0
            bits = frontier
            while bits:
                low = bits & -bits
                grow |= nbr_mask[low.bit_length() - 1]
                bits ^= low
            frontier = grow & mask & ~reach
            reach |= frontier
        if reach != mask:
            continue
        minimal = sum(1 for i in range(len(verts)) if mask >> i & 1 and not ancestors[i] & mask)
        if minimal != 1:
            return False
    return True


def is_branch_separated(patch: HexPatch, t: ExplorationTree, exhaustive: bool = False) -> bool:
    """True iff every connected vertex set has a unique minimal vertex in tree order.

    Equivalently every patch edge joins an ancestor to a descendant. With
    ``exhaustive`` the defining condition is checked subset by subset (at most
    ``EXHAUSTIVE_VERTEX_LIMIT`` vertices).
    """
    if set(t.parent) != set(patch.vertices) or t.root != patch.root:
        return False
    iv = _preorder_intervals(t)
    if len(iv) != len(patch.vertices):
        return False
    if exhaustive:
        if len(patch.vertices) > EXHAUSTIVE_VERTEX_LIMIT:
            raise ValueError(
                f"exhaustive check limited to {EXHAUSTIVE_VERTEX_LIMIT} vertices, "
                f"patch has {len(patch.vertices)}"
            )
        return _exhaustive_branch_separated(patch, iv)
    return all(_comparable(iv, *tuple(e)) for e in patch.edges)


def coloring_from_tree(
    patch: HexPatch,
    t: ExplorationTree,
    boundary_condition: Optional[BoundaryCondition] = None,
) -> Coloring:
    """Recover the coloring whose exploration tree is ``t``.

    For each face, ``v`` is its first vertex in tree order and ``w`` the next;
    the face is black iff the tree turns right at ``v`` toward ``w``.

    Raises:
        NotBranchSeparated: ``t`` is not a branch-separated spanning tree
    """
    if not is_branch_separated(patch, t):
        raise NotBranchSeparated("tree has an edge joining incomparable vertices")
    iv = _preorder_intervals(t)
    black = set()
    for f in patch.faces:
        corners = sorted(face_corners(f), key=lambda x: iv[x][0])
        v, w = corners[0], corners[1]
        step = t.path_to(w)
        nxt = step[step.index(v) + 1]
        if geometric_turn(t.incoming(v), v, nxt) == RIGHT:
            black.add(f)
    return Coloring(patch, frozenset(black), boundary_condition or AllWhiteOutside())


def loop_edges_outside_tree(ensemble: LoopEnsemble, t: ExplorationTree) -> List[int]:
    """Per loop, the number of its edges missing from the tree."""
    tree_edges = t.edges()
    return [sum(1 for u, v in lp if frozenset((u, v)) not in tree_edges) for lp in ensemble.loops]


# -------------------------
# Boundary paths
# -------------------------


def clockwise_boundary_path(patch: HexPatch, target: Vertex) -> Tuple[Vertex, ...]:
    cycle = patch.boundary_cycle
    n = len(cycle)
    i = patch.root_position
    stop = patch.boundary_position[target]
    out = [cycle[i]]
    while i != stop:
        i = (i - 1) % n
        out.append(cycle[i])
    return tuple(out)


def boundary_path_from_loops(c: Coloring, e: LoopEnsemble, target: Vertex) -> Tuple[Vertex, ...]:
    """Splice loops touching the clockwise boundary path from the root to ``target``.

    Every loop sharing an edge with that path covers an interval of it; over
    the maximal intervals the path is replaced by the loop arc that avoids
    the boundary path, and the spliced walk stops the first time it reaches
    ``target``. The result is the exploration path to ``target`` when the
    outside is black along the boundary path and white elsewhere.

    Raises:
        IntervalNestingError: two loop intervals overlap without nesting
    """
    if not isinstance(c.boundary_condition, AllWhiteOutside):
        raise ValueError("boundary path reconstruction needs an all-white outside")
    patch = c.patch
    if target not in patch.boundary_position:
        raise ValueError(f"{target} is not a boundary vertex")
    if target == patch.root:
        raise ValueError("target must differ from the root")

    path = clockwise_boundary_path(patch, target)
    pos = {v: k for k, v in enumerate(path)}
    path_edges = {frozenset((path[k], path[k + 1])) for k in range(len(path) - 1)}

    intervals: List[Tuple[int, int, int]] = []
    for i, lp in enumerate(e.loops):
        hits = [
            k
            for u, v in lp
            if frozenset((u, v)) in path_edges
            for k in (pos[u], pos[v])
        ]
        if hits:
            intervals.append((min(hits), max(hits), i))

    maximal = [
        (s, t, i)
        for s, t, i in intervals
        if not any((s2 <= s and t <= t2) and (s2, t2) != (s, t) for s2, t2, _ in intervals)
    ]
    maximal.sort()
    for (s1, t1, _), (s2, t2, _) in zip(maximal, maximal[1:]):
        if s2 <= t1:
            raise IntervalNestingError(f"loop intervals [{s1}, {t1}] and [{s2}, {t2}] overlap")

    q: List[Vertex] = []
    k = 0
    for s, t, i in maximal:
        q.extend(path[k:s])
        q.extend(_arc_avoiding(e.loops[i], path[s], path[t], path_edges))
        k = t + 1
    q.extend(path[k:])
    return tuple(q[: q.index(target) + 1])


def _arc_avoiding(
    loop: Tuple[DirectedEdge, ...], a: Vertex, b: Vertex, avoid: set
) -> List[Vertex]:
    verts = [u for u, _ in loop]
    n = len(verts)
    ia, ib = verts.index(a), verts.index(b)
    fwd = [verts[(ia + j) % n] for j in range((ib - ia) % n + 1)]
    bwd = [verts[(ia - j) % n] for j in range((ia - ib) % n + 1)]
    for arc in (fwd, bwd):
        if not any(frozenset((arc[j], arc[j + 1])) in avoid for j in range(len(arc) - 1)):
            return arc
    raise IntervalNestingError(f"no arc of the loop from {a} to {b} avoids the boundary path")


# -------------------------
# Renewal times
# -------------------------


def renewal_times(c: Coloring, target: Vertex) -> List[Tuple[int, Tuple[DirectedEdge, ...]]]:
    """Renewal indices along the exploration path and the excursion after each.

    Step ``k`` is a renewal when the edge entering the ``k``-th path vertex
    (the entry edge for ``k = 0``) does not separate black from white. The
    excursion after a renewal is the run of separating edges up to the next one.
    """
    path = exploration_path(c, target)
    entering = [c.patch.entry_edge] + [(path[k - 1], path[k]) for k in range(1, len(path))]
    renewals = [k for k, (u, v) in enumerate(entering) if not c.is_separating(u, v)]
    out = []
    for idx, k in enumerate(renewals):
        stop = renewals[idx + 1] if idx + 1 < len(renewals) else len(path)
        out.append((k, tuple(entering[j] for j in range(k + 1, stop))))
    return out


# -------------------------
# Height functions
# -------------------------


@dataclass(frozen=True)
class HeightFunction:
    values: Dict[Face, int]
    base_face: Face
    base_value: int


def height_function(c: Coloring, root_position: Optional[int] = None) -> HeightFunction:
    """Left turns minus right turns along the tree path to each face's first vertex.

    The face at the root gets the partial-rotation constant of ``root_position``
    (0 at the default root).
    """
    patch = c.patch
    if root_position is not None and root_position != patch.root_position:
        patch = patch.with_root(root_position)
        c = c.with_patch(patch)
    t = exploration_tree(c)
    base = patch.rotation_constant()
    winding: Dict[Vertex, int] = {t.root: 0}
    for v in t.order[1:]:
        winding[v] = winding[t.parent[v]] + t.turn[v].direction  # type: ignore[index,union-attr]
    rank = {v: k for k, v in enumerate(t.order)}
    values = {}
    for f in patch.faces:
        first = min(face_corners(f), key=lambda x: rank[x])
        values[f] = base + winding[first]
    (f0,) = patch.faces_at(patch.root)
    return HeightFunction(values=values, base_face=f0, base_value=base)


def all_colorings(patch: HexPatch, boundary_condition: Optional[BoundaryCondition] = None):
    """Every coloring of ``patch``, in mask order."""
    for mask in range(1 << len(patch.faces)):
        yield Coloring.from_mask(patch, mask, boundary_condition)


def normal_spanning_tree_count(patch: HexPatch) -> int:
    """Count branch-separated spanning trees rooted at the patch root by brute force."""
    edges = sorted(tuple(sorted(e)) for e in patch.edges)
    k = len(patch.vertices) - 1
    count = 0
    for chosen in itertools.combinations(edges, k):
        g = nx.Graph(chosen)
        if g.number_of_nodes() != len(patch.vertices) or not nx.is_tree(g):
            continue
        parent: Dict[Vertex, Optional[Vertex]] = {patch.root: None}
        for a, b in nx.bfs_edges(g, patch.root):
            parent[b] = a
        if is_branch_separated(patch, ExplorationTree.from_parents(patch, parent)):
            count += 1
    return count


__all__ = [
    "Turn",
    "ExplorationTree",
    "HeightFunction",
    "exploration_path",
    "exploration_walk",
    "exploration_tree",
    "oriented_exploration_tree",
    "coloring_from_tree",
    "is_branch_separated",
    "boundary_path_from_loops",
    "clockwise_boundary_path",
    "renewal_times",
    "height_function",
    "loop_edges_outside_tree",
    "all_colorings",
    "normal_spanning_tree_count",
    "color_preference",
    "orientation_preference",
]
