"""sletree core modules."""

from sletree.core.errors import SletreeError
from sletree.core.hexgrid import HexPatch, build_patch, named_patch
from sletree.core.loops import Coloring, LoopEnsemble, loops_from_coloring
from sletree.core.exploration import ExplorationTree, exploration_tree, height_function
from sletree.core.observability import RunLogger
from sletree.core.onmodel import OnParams, run_chain
from sletree.core.stochastic import BesselParams, bessel_path, eps_bessel_batch
from sletree.core.stable import StableParams, stable_check
from sletree.core.loewner import Driver, sle_kr_driver
from sletree.core.cle import conformal_radius_sample

__all__ = [
    "SletreeError",
    "HexPatch",
    "build_patch",
    "named_patch",
    "Coloring",
    "LoopEnsemble",
    "loops_from_coloring",
    "ExplorationTree",
    "exploration_tree",
    "height_function",
    "RunLogger",
    "OnParams",
    "run_chain",
    "BesselParams",
    "bessel_path",
    "eps_bessel_batch",
    "StableParams",
    "stable_check",
    "Driver",
    "sle_kr_driver",
    "conformal_radius_sample",
]
