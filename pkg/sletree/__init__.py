"""
sletree - Exploration trees, Loewner chains and conformal loop ensembles.

Discrete side: O(n) loop configurations on hexagon patches and the
bijection between colorings and branch-separated exploration trees.
Continuum side: Bessel-type drivers, SLE_kappa(rho) traces and the nested
conformal radii of CLE loops around the origin.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("sletree")
except PackageNotFoundError:
    __version__ = "0.1.0"

from sletree.core.cle import conformal_radius_sample, nested_radius_sequence
from sletree.core.exploration import (
    coloring_from_tree,
    exploration_tree,
    height_function,
    is_branch_separated,
)
from sletree.core.hexgrid import HexPatch, build_patch, named_patch
from sletree.core.loewner import chordal_trace, radial_trace, sle_driver, sle_kr_driver
from sletree.core.loops import Coloring, loops_from_coloring
from sletree.core.observability import RunLogger
from sletree.core.onmodel import OnParams, on_exact_distribution, run_chain

__all__ = [
    "HexPatch",
    "build_patch",
    "named_patch",
    "Coloring",
    "loops_from_coloring",
    "exploration_tree",
    "coloring_from_tree",
    "is_branch_separated",
    "height_function",
    "OnParams",
    "on_exact_distribution",
    "run_chain",
    "sle_driver",
    "sle_kr_driver",
    "chordal_trace",
    "radial_trace",
    "conformal_radius_sample",
    "nested_radius_sequence",
    "RunLogger",
]
