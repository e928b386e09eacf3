"""Colorings of hexagon graphs and the loop ensembles they determine.

A coloring marks a set of faces black. Faces outside the patch are white
(``AllWhiteOutside``) or, under ``ChordalArc(a, b)``, black along the
clockwise boundary arc from ``a`` to ``b`` and white elsewhere. The edges
separating black from white form disjoint simple loops, plus one open path
from ``a`` to ``b`` under ``ChordalArc``. Separating edges are oriented with
black on their left.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import numpy as np
from shapely.geometry import LinearRing, Point, Polygon

from sletree.core.hexgrid import (
    OUTSIDE,
    DirectedEdge,
    Edge,
    Face,
    HexPatch,
    Vertex,
    embed,
    lattice_faces,
    lattice_pointed_face,
    side_faces,
)

CCW = 1
CW = -1


@dataclass(frozen=True)
class AllWhiteOutside:
    """Every face outside the patch is white."""


@dataclass(frozen=True)
class ChordalArc:
    """Outside faces along the clockwise boundary arc from ``a`` to ``b`` are black."""

    a: Vertex
    b: Vertex


BoundaryCondition = Union[AllWhiteOutside, ChordalArc]


@dataclass(frozen=True)
class Coloring:
    patch: HexPatch
    black: FrozenSet[Face] = frozenset()
    boundary_condition: BoundaryCondition = field(default_factory=AllWhiteOutside)

    def __post_init__(self) -> None:
        object.__setattr__(self, "black", frozenset(self.black))
        stray = self.black - self.patch.faces
        if stray:
            raise ValueError(f"black faces not in patch: {sorted(stray)}")
        bc = self.boundary_condition
        if isinstance(bc, ChordalArc):
            pos = self.patch.boundary_position
            if bc.a not in pos or bc.b not in pos:
                raise ValueError("chordal arc endpoints must lie on the boundary cycle")
            if bc.a == bc.b:
                raise ValueError("chordal arc endpoints must differ")

    # Construction helpers

    @classmethod
    def from_ids(
        cls,
        patch: HexPatch,
        ids: Iterable[int],
        boundary_condition: Optional[BoundaryCondition] = None,
    ) -> "Coloring":
        faces = patch.sorted_faces
        black = set()
        for i in ids:
            if not 0 <= i < len(faces):
                raise ValueError(f"face id {i} out of range 0..{len(faces) - 1}")
            black.add(faces[i])
        return cls(patch, frozenset(black), boundary_condition or AllWhiteOutside())

    @classmethod
    def from_mask(
        cls,
        patch: HexPatch,
        mask: int,
        boundary_condition: Optional[BoundaryCondition] = None,
    ) -> "Coloring":
        """Coloring whose i-th sorted face is black iff bit i of ``mask`` is set."""
        faces = patch.sorted_faces
        black = frozenset(f for i, f in enumerate(faces) if mask >> i & 1)
        return cls(patch, black, boundary_condition or AllWhiteOutside())

    def with_black(self, black: Iterable[Face]) -> "Coloring":
        return Coloring(self.patch, frozenset(black), self.boundary_condition)

    def with_patch(self, patch: HexPatch) -> "Coloring":
        return Coloring(patch, self.black, self.boundary_condition)

    def flipped(self, face: Face) -> "Coloring":
        return self.with_black(self.black ^ {face})

    @property
    def black_ids(self) -> Tuple[int, ...]:
        index = self.patch.face_index
        return tuple(sorted(index[f] for f in self.black))

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.black_ids)

    # Colors

    @cached_property
    def arc_edges(self) -> FrozenSet[Edge]:
        """Boundary edges whose outside face is black."""
        bc = self.boundary_condition
        if not isinstance(bc, ChordalArc):
            return frozenset()
        cycle = self.patch.boundary_cycle
        n = len(cycle)
        pos = self.patch.boundary_position
        i, stop = pos[bc.a], pos[bc.b]
        edges = set()
        while i != stop:
            edges.add(frozenset((cycle[i], cycle[(i - 1) % n])))
            i = (i - 1) % n
        return frozenset(edges)

    def is_black(self, face: Optional[Face]) -> bool:
        return face is not OUTSIDE and face in self.black

    def lattice_face_black(self, face: Face, at: Vertex) -> bool:
        """Color of a lattice face seen from vertex ``at``.

        Outside faces take the color of the boundary edges at ``at`` bordering them.
        """
        if face in self.patch.faces:
            return face in self.black
        if not self.arc_edges or at not in self.patch.boundary_position:
            return False
        for w in self.patch.neighbors(at):
            e = frozenset((at, w))
            if e in self.arc_edges and face in lattice_faces(w):
                return True
        return False

    def side_colors(self, u: Vertex, v: Vertex) -> Tuple[bool, bool]:
        """(left is black, right is black) for the directed edge u -> v."""
        left, right = side_faces(u, v)
        if self.patch.has_edge(u, v):
            on_arc = frozenset((u, v)) in self.arc_edges
            return (
                left in self.black if left in self.patch.faces else on_arc,
                right in self.black if right in self.patch.faces else on_arc,
            )
        at = v if v in self.patch.adjacency else u
        return self.lattice_face_black(left, at), self.lattice_face_black(right, at)

    def is_separating(self, u: Vertex, v: Vertex) -> bool:
        left, right = self.side_colors(u, v)
        return left != right

    def pointed_black(self, u: Vertex, v: Vertex) -> bool:
        return self.lattice_face_black(lattice_pointed_face(u, v), v)


# -------------------------
# Loop extraction
# -------------------------


@dataclass(frozen=True)
class LoopEnsemble:
    """Separating-edge cycles, each a cyclic tuple of directed edges, plus the chordal path."""

    loops: Tuple[Tuple[DirectedEdge, ...], ...]
    chordal_path: Optional[Tuple[DirectedEdge, ...]] = None
    patch: Optional[HexPatch] = field(default=None, compare=False, repr=False)

    @property
    def loop_count(self) -> int:
        """N: number of loops, the chordal path not counted."""
        return len(self.loops)

    @property
    def edge_count(self) -> int:
        """L: number of separating edges, chordal path included."""
        return sum(len(lp) for lp in self.loops) + len(self.chordal_path or ())

    def loop_vertices(self, i: int) -> Tuple[Vertex, ...]:
        return tuple(u for u, _ in self.loops[i])

    def path_vertices(self) -> Tuple[Vertex, ...]:
        """Chordal path vertices, from the arc start ``a`` (the root) to ``b``."""
        if not self.chordal_path:
            return ()
        return tuple(u for u, _ in self.chordal_path) + (self.chordal_path[-1][1],)

    @cached_property
    def loop_of_edge(self) -> Dict[Edge, int]:
        """Undirected edge -> loop index (``-1`` for chordal path edges)."""
        out: Dict[Edge, int] = {}
        for i, lp in enumerate(self.loops):
            for u, v in lp:
                out[frozenset((u, v))] = i
        for u, v in self.chordal_path or ():
            out[frozenset((u, v))] = -1
        return out

    @cached_property
    def forward(self) -> Dict[Vertex, Vertex]:
        """Successor of each vertex along its traced loop or path."""
        nxt: Dict[Vertex, Vertex] = {}
        for lp in self.loops:
            for u, v in lp:
                nxt[u] = v
        for u, v in self.chordal_path or ():
            nxt[u] = v
        return nxt

    @cached_property
    def backward(self) -> Dict[Vertex, Vertex]:
        return {v: u for u, v in self.forward.items()}

    @cached_property
    def loop_of_vertex(self) -> Dict[Vertex, int]:
        out: Dict[Vertex, int] = {}
        for u, v in self.chordal_path or ():
            out[u] = out[v] = -1
        for i, lp in enumerate(self.loops):
            for u, _ in lp:
                out[u] = i
        return out

    def touched_vertices(self) -> FrozenSet[Vertex]:
        verts = set()
        for lp in self.loops:
            verts.update(u for u, _ in lp)
        verts.update(self.path_vertices())
        return frozenset(verts)


def _left_face(e: DirectedEdge) -> Face:
    return side_faces(e[0], e[1])[0]


def loops_from_coloring(c: Coloring) -> LoopEnsemble:
    """Extract the black/white interfaces of a coloring."""
    patch = c.patch
    separating: List[DirectedEdge] = []
    for e in patch.edges:
        a, b = sorted(e)
        left_black, right_black = c.side_colors(a, b)
        if left_black != right_black:
            separating.append((a, b) if left_black else (b, a))
    separating.sort()

    outs: Dict[Vertex, List[DirectedEdge]] = {}
    ins: Dict[Vertex, List[DirectedEdge]] = {}
    for e in separating:
        outs.setdefault(e[0], []).append(e)
        ins.setdefault(e[1], []).append(e)

    successor: Dict[DirectedEdge, DirectedEdge] = {}
    for v in patch.vertices:
        vin, vout = ins.get(v, []), outs.get(v, [])
        if len(vin) == 1 and len(vout) == 1:
            successor[vin[0]] = vout[0]
        elif len(vin) == 1 and len(vout) == 2:
            (match,) = [o for o in vout if _left_face(o) == _left_face(vin[0])]
            successor[vin[0]] = match
        elif len(vin) == 2 and len(vout) == 1:
            (match,) = [i for i in vin if _left_face(i) == _left_face(vout[0])]
            successor[match] = vout[0]

    has_predecessor = set(successor.values())
    used = set()
    path: Optional[Tuple[DirectedEdge, ...]] = None
    for e in separating:
        if e in has_predecessor:
            continue
        walk = [e]
        while walk[-1] in successor:
            walk.append(successor[walk[-1]])
        used.update(walk)
        path = tuple(walk)

    loops: List[Tuple[DirectedEdge, ...]] = []
    for e in separating:
        if e in used:
            continue
        cycle = [e]
        used.add(e)
        while True:
            nxt = successor[cycle[-1]]
            if nxt == e:
                break
            cycle.append(nxt)
            used.add(nxt)
        loops.append(tuple(cycle))

    if path is None and isinstance(c.boundary_condition, ChordalArc):
        path = ()
    return LoopEnsemble(loops=tuple(loops), chordal_path=path, patch=patch)


# -------------------------
# Orientation (loop-orientation variant)
# -------------------------


@dataclass(frozen=True)
class LoopOrientation:
    """Orientation (``CCW`` / ``CW``) of every loop and of every vertex off the loops."""

    loops: Tuple[int, ...]
    traced: Tuple[int, ...]
    vertices: Dict[Vertex, int]
    parent: Tuple[int, ...]
    beta: float

    def forward_successor(self, ensemble: LoopEnsemble, v: Vertex) -> Optional[Vertex]:
        """Next vertex after ``v`` along its loop in the assigned direction."""
        i = ensemble.loop_of_vertex.get(v)
        if i is None:
            return None
        if i < 0 or self.loops[i] == self.traced[i]:
            return ensemble.forward.get(v)
        return ensemble.backward.get(v)


def _ring(ensemble: LoopEnsemble, i: int) -> LinearRing:
    return LinearRing([embed(v) for v in ensemble.loop_vertices(i)])


def loop_nesting(ensemble: LoopEnsemble) -> Tuple[int, ...]:
    """Index of the smallest loop enclosing each loop, ``-1`` for outermost loops."""
    polys = [Polygon(_ring(ensemble, i)) for i in range(ensemble.loop_count)]
    areas = [p.area for p in polys]
    parent = []
    for i in range(len(polys)):
        point = Point(embed(ensemble.loop_vertices(i)[0]))
        enclosing = [j for j in range(len(polys)) if j != i and polys[j].contains(point)]
        parent.append(min(enclosing, key=lambda j: areas[j]) if enclosing else -1)
    return tuple(parent)


def _enclosing_loop(polys: List[Polygon], areas: List[float], v: Vertex) -> int:
    point = Point(embed(v))
    enclosing = [j for j in range(len(polys)) if polys[j].contains(point)]
    return min(enclosing, key=lambda j: areas[j]) if enclosing else -1


def orient_loops(
    e: LoopEnsemble, beta: float, seed: Union[int, np.random.Generator, None] = None
) -> LoopOrientation:
    """Randomly orient loops and off-loop vertices.

    The region outside every loop counts as a clockwise virtual loop. Each loop
    (and each vertex touching no loop) is oriented opposite to its enclosing
    loop with probability ``(1 + beta) / 2``, so ``beta = 1`` reproduces the
    traced orientation (black on the left) and ``beta = -1`` mirrors it.
    """
    if not -1.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [-1, 1], got {beta}")
    if e.patch is None:
        raise ValueError("loop ensemble carries no patch")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    parent = loop_nesting(e)
    polys = [Polygon(_ring(e, i)) for i in range(e.loop_count)]
    areas = [p.area for p in polys]
    traced = tuple(CCW if _ring(e, i).is_ccw else CW for i in range(e.loop_count))

    touched = e.touched_vertices()
    free = [v for v in e.patch.vertices if v not in touched]
    flips = rng.random(e.loop_count + len(free)) < (1.0 + beta) / 2.0

    orient: Dict[int, int] = {}

    def resolve(i: int) -> int:
        if i < 0:
            return CW
        if i not in orient:
            outer = resolve(parent[i])
            orient[i] = -outer if flips[i] else outer
        return orient[i]

    loop_orient = tuple(resolve(i) for i in range(e.loop_count))
    vertex_orient: Dict[Vertex, int] = {}
    for k, v in enumerate(free):
        outer = resolve(_enclosing_loop(polys, areas, v))
        vertex_orient[v] = -outer if flips[e.loop_count + k] else outer
    return LoopOrientation(
        loops=loop_orient,
        traced=traced,
        vertices=vertex_orient,
        parent=parent,
        beta=float(beta),
    )


__all__ = [
    "AllWhiteOutside",
    "ChordalArc",
    "BoundaryCondition",
    "Coloring",
    "LoopEnsemble",
    "LoopOrientation",
    "loops_from_coloring",
    "loop_nesting",
    "orient_loops",
    "CCW",
    "CW",
]
