"""Artifact emitters: atomic writes, seed-stamped CSV and JSON, SVG figures.

Every artifact carries the seed that produced it: CSV in a leading ``#``
comment line, JSON as a ``seed`` key, SVG in an XML comment. Identical
inputs give byte-identical output.
"""

import csv
import io
import json
import math
import os
import uuid
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from sletree.core.exploration import ExplorationTree
from sletree.core.hexgrid import face_corners
from sletree.core.loops import Coloring

BLACK_FILL = "#222222"
WHITE_FILL = "#ffffff"
TREE_STROKE = "#d62728"
TRACE_STROKE = "#1f77b4"


def atomic_write_text(path: Union[str, Path], content: str) -> int:
    """Write *content* to *path* atomically via a same-directory temp file.

    Returns the number of bytes written.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.parent / f".{target.name}.{uuid.uuid4().hex}.tmp"
    data = content.encode("utf-8")
    try:
        with open(tmp, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, target)
    finally:
        if tmp.exists():
            tmp.unlink()
    return len(data)


def format_float(x: float) -> str:
    return "%.17g" % x


def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return str(v)


def metadata_line(command: str, seed: Optional[int], **meta: Any) -> str:
    parts = [f"sletree {command}", f"seed={seed}"]
    parts += [f"{k}={_cell(v)}" for k, v in meta.items()]
    return "# " + " ".join(parts)


def csv_text(
    command: str,
    seed: Optional[int],
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    **meta: Any,
) -> str:
    """CSV with a ``# sletree <command> seed=<seed> ...`` first line and a header row."""
    buf = io.StringIO()
    buf.write(metadata_line(command, seed, **meta) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def json_text(doc: Dict[str, Any], seed: Optional[int] = None) -> str:
    """Sorted, indented JSON; non-finite floats become null."""
    body = dict(doc)
    if seed is not None:
        body.setdefault("seed", seed)
    return json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n"


# -------------------------
# SVG
# -------------------------


def _f(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


class SvgDocument:
    """SVG 1.1 text built from math coordinates (y up) inside a bounding box."""

    def __init__(
        self,
        bounds: Tuple[float, float, float, float],
        seed: Optional[int],
        title: str,
        scale: float = 40.0,
        margin: float = 0.5,
    ):
        x0, y0, x1, y1 = bounds
        self.x0, self.y1 = x0 - margin, y1 + margin
        self.scale = scale
        self.width = (x1 - x0 + 2 * margin) * scale
        self.height = (y1 - y0 + 2 * margin) * scale
        self.parts: List[str] = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f"<!-- sletree {title} seed={seed} -->",
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_f(self.width)}" height="{_f(self.height)}" '
            f'viewBox="0 0 {_f(self.width)} {_f(self.height)}">',
        ]

    def xy(self, x: float, y: float) -> Tuple[float, float]:
        return (x - self.x0) * self.scale, (self.y1 - y) * self.scale

    def _points(self, pts: Iterable[Tuple[float, float]]) -> str:
        return " ".join(f"{_f(a)},{_f(b)}" for a, b in (self.xy(x, y) for x, y in pts))

    def polygon(self, pts: Iterable[Tuple[float, float]], fill: str, stroke: str = "#999") -> None:
        self.parts.append(
            f'  <polygon points="{self._points(pts)}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="1"/>'
        )

    def polyline(
        self, pts: Iterable[Tuple[float, float]], stroke: str, width: float = 1.5
    ) -> None:
        self.parts.append(
            f'  <polyline points="{self._points(pts)}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_f(width)}"/>'
        )

    def circle(self, x: float, y: float, r: float, stroke: str, fill: str = "none") -> None:
        cx, cy = self.xy(x, y)
        self.parts.append(
            f'  <circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r * self.scale)}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="1"/>'
        )

    def text(self) -> str:
        return "\n".join(self.parts + ["</svg>", ""])


def tree_svg(c: Coloring, tree: ExplorationTree, seed: Optional[int] = None) -> str:
    """Colored faces with the exploration tree drawn over them, root marked."""
    patch = c.patch
    xs = [p[0] for p in patch.embedding.values()]
    ys = [p[1] for p in patch.embedding.values()]
    doc = SvgDocument((min(xs), min(ys), max(xs), max(ys)), seed, "tree-svg")
    for face in patch.sorted_faces:
        corners = [patch.embedding[v] for v in face_corners(face)]
        doc.polygon(corners, BLACK_FILL if face in c.black else WHITE_FILL)
    for v, parent in sorted(tree.parent.items()):
        if parent is not None:
            doc.polyline([patch.embedding[parent], patch.embedding[v]], TREE_STROKE, 2.0)
    rx, ry = patch.embedding[patch.root]
    doc.circle(rx, ry, 0.15, TREE_STROKE, TREE_STROKE)
    return doc.text()


def _complex_bounds(arrays: Sequence[np.ndarray]) -> Tuple[float, float, float, float]:
    pts = np.concatenate([np.asarray(a, dtype=complex) for a in arrays if len(a)])
    return (
        float(pts.real.min()),
        float(pts.imag.min()),
        float(pts.real.max()),
        float(pts.imag.max()),
    )


def trace_svg(points: np.ndarray, mode: str, seed: Optional[int] = None) -> str:
    """A chordal trace over the real line, or a radial trace inside the unit circle."""
    pts = np.asarray(points, dtype=complex)
    if mode == "radial":
        bounds = (-1.0, -1.0, 1.0, 1.0)
    else:
        x0, _, x1, y1 = _complex_bounds([pts])
        bounds = (x0, 0.0, x1, max(y1, 1e-3))
    span = max(bounds[2] - bounds[0], bounds[3] - bounds[1], 1e-9)
    doc = SvgDocument(bounds, seed, f"sle-trace-svg mode={mode}", scale=400.0 / span,
                      margin=0.05 * span)
    if mode == "radial":
        doc.circle(0.0, 0.0, 1.0, "#999")
    else:
        doc.polyline([(bounds[0], 0.0), (bounds[2], 0.0)], "#999", 1.0)
    doc.polyline([(z.real, z.imag) for z in pts], TRACE_STROKE, 1.0)
    return doc.text()


def loop_arcs_svg(arcs: Sequence[Any], seed: Optional[int] = None) -> str:
    """Loop arcs (objects with ``j`` and ``trace.points``) inside the unit circle."""
    doc = SvgDocument((-1.0, -1.0, 1.0, 1.0), seed, "cle-loops-svg", scale=200.0, margin=0.05)
    doc.circle(0.0, 0.0, 1.0, "#999")
    palette = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    for arc in arcs:
        pts = np.asarray(arc.trace.points, dtype=complex)
        if len(pts) > 1:
            doc.polyline([(z.real, z.imag) for z in pts], palette[(arc.j - 1) % len(palette)], 1.0)
    doc.circle(0.0, 0.0, 0.01, "#000", "#000")
    return doc.text()


__all__ = [
    "atomic_write_text",
    "format_float",
    "metadata_line",
    "csv_text",
    "json_text",
    "SvgDocument",
    "tree_svg",
    "trace_svg",
    "loop_arcs_svg",
]
