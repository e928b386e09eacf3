"""O(n) loop measure on hexagon graphs: weights, exact tables and Metropolis chains.

A coloring gets weight ``n**N * x**L`` where ``N`` counts its loops and ``L``
its separating edges (chordal path included in ``L`` only).
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sletree.core.errors import OutOfRange, TooLarge
from sletree.core.exploration import ExplorationTree, exploration_tree
from sletree.core.hexgrid import HexPatch
from sletree.core.loops import AllWhiteOutside, BoundaryCondition, Coloring, loops_from_coloring

EXACT_FACE_LIMIT = 20


class OnParams(BaseModel):
    """Loop fugacity ``n``, edge weight ``x`` and the boundary condition."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: float = Field(gt=0)
    x: float = Field(gt=0)
    boundary_condition: BoundaryCondition = Field(default_factory=AllWhiteOutside)


def on_log_weight(c: Coloring, p: OnParams) -> float:
    """``N log n + L log x`` for the loops of ``c``."""
    e = loops_from_coloring(c)
    return e.loop_count * math.log(p.n) + e.edge_count * math.log(p.x)


def tree_loop_weight(c: Coloring, p: OnParams, tree: Optional[ExplorationTree] = None) -> float:
    """Same weight with ``N`` counted as the loop edges missing from the exploration tree."""
    e = loops_from_coloring(c)
    t = tree if tree is not None else exploration_tree(c)
    tree_edges = t.edges()
    missing = sum(1 for lp in e.loops for u, v in lp if frozenset((u, v)) not in tree_edges)
    return missing * math.log(p.n) + e.edge_count * math.log(p.x)


def on_exact_distribution(patch: HexPatch, p: OnParams) -> Dict[int, float]:
    """Normalized probability of every coloring, keyed by its face mask.

    Raises:
        TooLarge: more than ``EXACT_FACE_LIMIT`` faces
    """
    if len(patch.faces) > EXACT_FACE_LIMIT:
        raise TooLarge(
            f"exact enumeration limited to {EXACT_FACE_LIMIT} faces, patch has {len(patch.faces)}"
        )
    masks = range(1 << len(patch.faces))
    logw = np.array(
        [on_log_weight(Coloring.from_mask(patch, m, p.boundary_condition), p) for m in masks]
    )
    w = np.exp(logw - logw.max())
    w /= w.sum()
    return {m: float(w[m]) for m in masks}


def critical_x(n: float) -> float:
    """``[2 + sqrt(2 - n)]**(-1/2)`` for ``0 < n <= 2``."""
    if not 0 < n <= 2:
        raise OutOfRange(f"critical_x needs 0 < n <= 2, got {n}")
    return (2.0 + math.sqrt(2.0 - n)) ** -0.5


# -------------------------
# Metropolis chain
# -------------------------


@dataclass
class ChainResult:
    """Final state and empirical statistics of one single-face-flip chain.

    ``attempts`` and ``flows`` count proposed and accepted moves per ordered
    pair of face masks; ``visits`` counts recorded states.
    """

    final: Coloring
    proposals: int
    accepted: int
    recorded: int = 0
    face_counts: Optional[np.ndarray] = None
    visits: Dict[int, int] = field(default_factory=dict)
    attempts: Dict[Tuple[int, int], int] = field(default_factory=dict)
    flows: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0

    def empirical(self) -> Dict[int, float]:
        total = sum(self.visits.values())
        return {m: k / total for m, k in self.visits.items()} if total else {}

    def marginals(self) -> List[float]:
        if not self.recorded or self.face_counts is None:
            return []
        return [float(k) / self.recorded for k in self.face_counts]


def run_chain(
    patch: HexPatch,
    p: OnParams,
    sweeps: int,
    seed: Union[int, np.random.Generator, None] = None,
    burn_in: Optional[int] = None,
    track_states: bool = True,
    initial: Optional[Coloring] = None,
) -> ChainResult:
    """Single-face-flip Metropolis chain targeting the O(n) measure.

    One sweep is ``len(faces)`` proposals; the first ``burn_in`` sweeps
    (default ``sweeps // 2``) are not recorded. Starts all white unless
    ``initial`` is given. Loop weights are memoized per face mask.
    """
    if sweeps < 1:
        raise ValueError(f"sweeps must be >= 1, got {sweeps}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    nf = len(patch.faces)
    burn = sweeps // 2 if burn_in is None else burn_in
    state = initial if initial is not None else Coloring(patch, frozenset(), p.boundary_condition)
    mask = state.mask
    bits = np.array([mask >> i & 1 for i in range(nf)], dtype=np.int64)

    cache: Dict[int, float] = {}

    def log_weight(m: int) -> float:
        if m not in cache:
            cache[m] = on_log_weight(Coloring.from_mask(patch, m, p.boundary_condition), p)
        return cache[m]

    result = ChainResult(
        final=state, proposals=0, accepted=0, face_counts=np.zeros(nf, dtype=np.int64)
    )
    total = sweeps * nf
    picks = rng.integers(0, nf, size=total)
    coins = rng.random(total)
    current = log_weight(mask)
    for step in range(total):
        face = int(picks[step])
        proposal = mask ^ (1 << face)
        delta = log_weight(proposal) - current
        accept = delta >= 0 or coins[step] < math.exp(delta)
        recording = step >= burn * nf
        if recording and track_states:
            key = (mask, proposal)
            result.attempts[key] = result.attempts.get(key, 0) + 1
            if accept:
                result.flows[key] = result.flows.get(key, 0) + 1
        if accept:
            mask = proposal
            bits[face] ^= 1
            current += delta
            result.accepted += 1
        result.proposals += 1
        if recording:
            result.recorded += 1
            result.face_counts += bits
            if track_states:
                result.visits[mask] = result.visits.get(mask, 0) + 1
    result.final = Coloring.from_mask(patch, mask, p.boundary_condition)
    return result


def on_mcmc_sample(
    patch: HexPatch, p: OnParams, sweeps: int, seed: Union[int, np.random.Generator, None] = None
) -> Coloring:
    return run_chain(patch, p, sweeps, seed, track_states=False).final


def total_variation(a: Dict[int, float], b: Dict[int, float]) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


__all__ = [
    "OnParams",
    "ChainResult",
    "on_log_weight",
    "tree_loop_weight",
    "on_exact_distribution",
    "on_mcmc_sample",
    "run_chain",
    "critical_x",
    "total_variation",
    "EXACT_FACE_LIMIT",
]
