"""Finite simply connected patches of the hexagonal lattice.

Faces are indexed by axial coordinates ``(q, r)``. Vertices are integer pairs
``(X, Y)`` on the sublattice ``Y % 3 != 0``: face ``(q, r)`` has center
``(2q + r, 3r)`` and its six corners are the center plus ``CORNER_OFFSETS``,
counterclockwise from the corner at 30 degrees. The planar embedding is
``x = X * sqrt(3) / 2``, ``y = Y / 2`` (pointy-top hexagons, unit edge length).

Two vertex types alternate: type A (``Y % 3 == 1``) has its three edges
pointing at 30, 150 and 270 degrees, type B the opposite three.
"""

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from sletree.core.errors import Disconnected, NoDegreeTwoBoundaryVertex, NotSimplyConnected

Face = Tuple[int, int]
Vertex = Tuple[int, int]
DirectedEdge = Tuple[Vertex, Vertex]
Edge = FrozenSet[Vertex]

OUTSIDE: Optional[Face] = None

CORNER_OFFSETS: Tuple[Tuple[int, int], ...] = ((1, 1), (0, 2), (-1, 1), (-1, -1), (0, -2), (1, -1))
DIRECTION_INDEX: Dict[Tuple[int, int], int] = {off: k for k, off in enumerate(CORNER_OFFSETS)}
FACE_NEIGHBORS: Tuple[Tuple[int, int], ...] = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

_TYPE_A_STEPS = ((1, 1), (-1, 1), (0, -2))
_TYPE_B_STEPS = ((-1, -1), (1, -1), (0, 2))
_TYPE_A_FACE_CENTERS = ((-1, -1), (1, -1), (0, 2))
_TYPE_B_FACE_CENTERS = ((0, -2), (1, 1), (-1, 1))

LEFT = 1
RIGHT = -1

_SQRT3_2 = math.sqrt(3.0) / 2.0


# -------------------------
# Lattice primitives
# -------------------------


def face_center(face: Face) -> Tuple[int, int]:
    q, r = face
    return (2 * q + r, 3 * r)


def center_to_face(center: Tuple[int, int]) -> Face:
    cx, cy = center
    r = cy // 3
    return ((cx - r) // 2, r)


def face_corners(face: Face) -> Tuple[Vertex, ...]:
    """Six corners of a face, counterclockwise starting at 30 degrees."""
    cx, cy = face_center(face)
    return tuple((cx + dx, cy + dy) for dx, dy in CORNER_OFFSETS)


def face_neighbors(face: Face) -> Tuple[Face, ...]:
    q, r = face
    return tuple((q + dq, r + dr) for dq, dr in FACE_NEIGHBORS)


def is_type_a(v: Vertex) -> bool:
    return v[1] % 3 == 1


def lattice_neighbors(v: Vertex) -> Tuple[Vertex, ...]:
    steps = _TYPE_A_STEPS if is_type_a(v) else _TYPE_B_STEPS
    return tuple((v[0] + dx, v[1] + dy) for dx, dy in steps)


def lattice_faces(v: Vertex) -> Tuple[Face, ...]:
    """The three lattice faces meeting at ``v``."""
    offsets = _TYPE_A_FACE_CENTERS if is_type_a(v) else _TYPE_B_FACE_CENTERS
    return tuple(center_to_face((v[0] + dx, v[1] + dy)) for dx, dy in offsets)


def direction(u: Vertex, v: Vertex) -> int:
    """Direction index (0..5, counterclockwise from 30 degrees) of the edge u -> v."""
    try:
        return DIRECTION_INDEX[(v[0] - u[0], v[1] - u[1])]
    except KeyError:
        raise ValueError(f"{u} -> {v} is not a lattice edge") from None


def turn(u: Vertex, v: Vertex, w: Vertex) -> int:
    """Geometric turn at ``v`` for the walk u -> v -> w: ``LEFT`` (+1) or ``RIGHT`` (-1)."""
    delta = (direction(v, w) - direction(u, v)) % 6
    if delta == 1:
        return LEFT
    if delta == 5:
        return RIGHT
    raise ValueError(f"{u} -> {v} -> {w} is not a lattice turn")


def side_faces(u: Vertex, v: Vertex) -> Tuple[Face, Face]:
    """(left, right) lattice faces of the directed edge u -> v."""
    common = set(lattice_faces(u)) & set(lattice_faces(v))
    if len(common) != 2:
        raise ValueError(f"{u} -> {v} is not a lattice edge")
    dx, dy = v[0] - u[0], v[1] - u[1]
    left = right = None
    for f in common:
        cx, cy = face_center(f)
        cross = dx * (cy - u[1]) - dy * (cx - u[0])
        if cross > 0:
            left = f
        else:
            right = f
    assert left is not None and right is not None
    return left, right


def lattice_pointed_face(u: Vertex, v: Vertex) -> Face:
    """The face at ``v`` that does not border the edge u -> v."""
    (pointed,) = set(lattice_faces(v)) - set(lattice_faces(u))
    return pointed


def embed(v: Vertex) -> Tuple[float, float]:
    return (v[0] * _SQRT3_2, v[1] / 2.0)


# -------------------------
# HexPatch
# -------------------------


@dataclass(frozen=True)
class HexPatch:
    """A simply connected hexagon graph with a distinguished root.

    ``face_of_edge_side`` maps every directed patch edge to the face on its
    left (``OUTSIDE`` when that face is not part of the patch).
    """

    faces: FrozenSet[Face]
    vertices: Tuple[Vertex, ...]
    edges: FrozenSet[Edge]
    face_of_edge_side: Dict[DirectedEdge, Optional[Face]]
    boundary_cycle: Tuple[Vertex, ...]
    root_position: int
    root: Vertex
    entry_edge: DirectedEdge
    embedding: Dict[Vertex, Tuple[float, float]]
    adjacency: Dict[Vertex, Tuple[Vertex, ...]] = field(repr=False)

    # Incidence

    def neighbors(self, v: Vertex) -> Tuple[Vertex, ...]:
        return self.adjacency[v]

    def degree(self, v: Vertex) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return frozenset((u, v)) in self.edges

    def faces_at(self, v: Vertex) -> Tuple[Face, ...]:
        return tuple(f for f in lattice_faces(v) if f in self.faces)

    def left_face(self, u: Vertex, v: Vertex) -> Optional[Face]:
        left, _ = side_faces(u, v)
        return left if left in self.faces else OUTSIDE

    def right_face(self, u: Vertex, v: Vertex) -> Optional[Face]:
        _, right = side_faces(u, v)
        return right if right in self.faces else OUTSIDE

    def pointed_face(self, u: Vertex, v: Vertex) -> Optional[Face]:
        return pointed_face(self, (u, v))

    @cached_property
    def sorted_faces(self) -> Tuple[Face, ...]:
        return tuple(sorted(self.faces))

    @cached_property
    def face_index(self) -> Dict[Face, int]:
        return {f: i for i, f in enumerate(self.sorted_faces)}

    @cached_property
    def boundary_edges(self) -> FrozenSet[Edge]:
        cycle = self.boundary_cycle
        return frozenset(
            frozenset((cycle[i], cycle[(i + 1) % len(cycle)])) for i in range(len(cycle))
        )

    @cached_property
    def boundary_position(self) -> Dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.boundary_cycle)}

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.edges)
        return g

    # Root handling

    def with_root(self, position: int) -> "HexPatch":
        return build_patch(self.faces, position)

    def corner_turn(self, v: Vertex) -> int:
        """Turn of the counterclockwise boundary walk at ``v``: +1 at degree 2, -1 at degree 3."""
        return 1 if self.degree(v) == 2 else -1

    def rotation_constant(self, position: Optional[int] = None) -> int:
        """Heading change, in sixths of a turn, from the entry edge at position 0 to ``position``.

        Lifted continuously: one full counterclockwise revolution adds 6.
        """
        p = self.root_position if position is None else position
        return sum(self.corner_turn(self.boundary_cycle[i]) for i in range(1, p + 1))

    def degree_two_positions(self) -> List[int]:
        return [i for i, v in enumerate(self.boundary_cycle) if self.degree(v) == 2]


def pointed_face(patch: HexPatch, e: DirectedEdge) -> Optional[Face]:
    """Face at the head of ``e`` incident to neither endpoint of ``e``, or ``OUTSIDE``."""
    u, v = e
    face = lattice_pointed_face(u, v)
    return face if face in patch.faces else OUTSIDE


def _check_connected(faces: FrozenSet[Face]) -> None:
    g = nx.Graph()
    g.add_nodes_from(faces)
    for f in faces:
        for n in face_neighbors(f):
            if n in faces:
                g.add_edge(f, n)
    if not nx.is_connected(g):
        raise Disconnected(f"face set of size {len(faces)} is not connected")


def _check_simply_connected(faces: FrozenSet[Face]) -> None:
    qs = [f[0] for f in faces]
    rs = [f[1] for f in faces]
    box = {
        (q, r)
        for q in range(min(qs) - 1, max(qs) + 2)
        for r in range(min(rs) - 1, max(rs) + 2)
        if (q, r) not in faces
    }
    g = nx.Graph()
    g.add_nodes_from(box)
    for f in box:
        for n in face_neighbors(f):
            if n in box:
                g.add_edge(f, n)
    if not nx.is_connected(g):
        holes = sum(1 for _ in nx.connected_components(g)) - 1
        raise NotSimplyConnected(f"face set encloses {holes} hole(s)")


def build_patch(face_coords: Iterable[Tuple[int, int]], root_choice: int = 0) -> HexPatch:
    """Index a hexagon graph and root it at ``boundary_cycle[root_choice]``.

    Raises:
        Disconnected: empty or disconnected face set
        NotSimplyConnected: the face set has a hole
        NoDegreeTwoBoundaryVertex: ``root_choice`` is not a degree-2 boundary position
    """
    faces = frozenset((int(q), int(r)) for q, r in face_coords)
    if not faces:
        raise Disconnected("face set is empty")
    _check_connected(faces)
    _check_simply_connected(faces)

    vertex_set: Set[Vertex] = set()
    edges: Set[Edge] = set()
    successor: Dict[Vertex, Vertex] = {}
    for f in faces:
        corners = face_corners(f)
        vertex_set.update(corners)
        for k in range(6):
            a, b = corners[k], corners[(k + 1) % 6]
            edges.add(frozenset((a, b)))
            _, across = side_faces(a, b)
            if across not in faces:
                successor[a] = b

    adjacency: Dict[Vertex, List[Vertex]] = {v: [] for v in vertex_set}
    for e in edges:
        a, b = tuple(e)
        adjacency[a].append(b)
        adjacency[b].append(a)

    start = min(successor, key=lambda v: (v[1], v[0]))
    cycle = [start]
    while True:
        nxt = successor[cycle[-1]]
        if nxt == start:
            break
        cycle.append(nxt)
    if len(cycle) != len(successor):
        raise NotSimplyConnected("boundary is not a single cycle")

    if not 0 <= root_choice < len(cycle):
        raise NoDegreeTwoBoundaryVertex(
            f"root position {root_choice} outside boundary cycle of length {len(cycle)}"
        )
    root = cycle[root_choice]
    if len(adjacency[root]) != 2:
        raise NoDegreeTwoBoundaryVertex(
            f"boundary vertex {root} at position {root_choice} has degree 3"
        )
    (outer,) = [w for w in lattice_neighbors(root) if w not in adjacency[root]]

    face_of_edge_side: Dict[DirectedEdge, Optional[Face]] = {}
    for e in edges:
        a, b = tuple(e)
        for u, v in ((a, b), (b, a)):
            left, _ = side_faces(u, v)
            face_of_edge_side[(u, v)] = left if left in faces else OUTSIDE

    vertices = tuple(sorted(vertex_set))
    return HexPatch(
        faces=faces,
        vertices=vertices,
        edges=frozenset(edges),
        face_of_edge_side=face_of_edge_side,
        boundary_cycle=tuple(cycle),
        root_position=root_choice,
        root=root,
        entry_edge=(outer, root),
        embedding={v: embed(v) for v in vertices},
        adjacency={v: tuple(sorted(ns)) for v, ns in adjacency.items()},
    )


# -------------------------
# Named patches and patch files
# -------------------------


def rhombus(n: int) -> Set[Face]:
    return {(q, r) for q in range(n) for r in range(n)}


def rect(nq: int, nr: int) -> Set[Face]:
    return {(q, r) for q in range(nq) for r in range(nr)}


NAMED_PATCHES: Dict[str, Set[Face]] = {
    "hex1": {(0, 0)},
    "pair2": {(0, 0), (1, 0)},
    "tri3": {(0, 0), (1, 0), (0, 1)},
    "flower7": {(0, 0), *face_neighbors((0, 0))},
}


def named_patch(spec: str) -> Set[Face]:
    """Resolve ``hex1``, ``pair2``, ``tri3``, ``flower7``, ``rhombus N`` or ``rect Q R``."""
    tokens = [t for t in re.split(r"[\s:]+", spec.strip()) if t]
    if not tokens:
        raise ValueError("empty patch name")
    name, args = tokens[0].lower(), tokens[1:]
    if name in NAMED_PATCHES and not args:
        return set(NAMED_PATCHES[name])
    try:
        if name == "rhombus" and len(args) == 1:
            return rhombus(int(args[0]))
        if name == "rect" and len(args) == 2:
            return rect(int(args[0]), int(args[1]))
    except ValueError:
        pass
    raise ValueError(
        f"Unknown patch '{spec}'. Use one of {sorted(NAMED_PATCHES)}, 'rhombus N' or 'rect Q R'"
    )


def parse_patch_text(text: str) -> Tuple[Set[Face], List[int]]:
    """Parse a patch file: ``q r`` per line, ``#`` comments, optional ``black`` line of face ids."""
    faces: Set[Face] = set()
    black: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("black"):
            rest = line[5:].lstrip(" :=")
            black.extend(int(tok) for tok in re.split(r"[\s,]+", rest) if tok)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'q r', got '{raw.strip()}'")
        try:
            faces.add((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer coordinates '{raw.strip()}'") from None
    return faces, black


__all__ = [
    "Face",
    "Vertex",
    "DirectedEdge",
    "Edge",
    "OUTSIDE",
    "LEFT",
    "RIGHT",
    "HexPatch",
    "build_patch",
    "pointed_face",
    "face_corners",
    "face_center",
    "face_neighbors",
    "lattice_faces",
    "lattice_neighbors",
    "lattice_pointed_face",
    "side_faces",
    "direction",
    "turn",
    "embed",
    "named_patch",
    "parse_patch_text",
    "rhombus",
    "rect",
    "NAMED_PATCHES",
]
