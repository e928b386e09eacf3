"""CLE statistics from the radial exploration toward an interior point.

The exploration is radial SLE_kappa(kappa - 6) started with its force point
at the driving point. Its lifted angle ``theta`` carries everything used
here: a loop around the target closes whenever ``theta`` reaches a multiple
of ``2 pi`` other than the current anchor, and radial capacity time is
``-log`` of the conformal radius seen from the target.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from sletree.core.config import run_chunks
from sletree.core.errors import InadmissibleParams
from sletree.core.loewner import (
    Driver,
    TracePath,
    check_admissible,
    lifted_angle_batch,
    radial_trace,
)
from sletree.core.stochastic import Seed, split_seed
from sletree.core.validation import validate_kappa

KAPPA_RANGE = (8.0 / 3.0, 8.0)
DEFAULT_T_MAX = 200.0
CHUNK = 1000


def check_cle_params(kappa: float, beta: float) -> None:
    """Raises InadmissibleParams unless ``8/3 < kappa < 8`` and ``beta`` suits ``kappa``."""
    lo, hi = KAPPA_RANGE
    ok, msg = validate_kappa(kappa, lo, hi)
    if not ok:
        raise InadmissibleParams(f"CLE exploration: {msg}")
    check_admissible(kappa, kappa - 6.0, "eps", beta, 0.0)


@dataclass
class ThetaPath:
    """Lifted angle of one exploration with its anchors and loop closures.

    ``closure_times`` are ``(s_j, t_j)`` in time units: ``t_j`` is the first
    hit of a new multiple of ``2 pi`` and ``s_j`` the last prior hit of the
    old anchor.
    """

    dt: float
    theta: np.ndarray
    anchor: np.ndarray
    closure_times: List[Tuple[float, float]]
    kappa: float
    beta: float
    epsilon: float
    closure_indices: List[Tuple[int, int]] = field(default_factory=list)
    arg_o: Optional[np.ndarray] = None

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.theta)) * self.dt

    def driver(self) -> Driver:
        """Radial SLE_kappa(kappa - 6) driver rebuilt from the angle and the force point."""
        arg_o = self.arg_o if self.arg_o is not None else np.zeros_like(self.theta)
        return Driver(
            dt=self.dt,
            W=np.exp(1j * (arg_o + self.theta)),
            mode="radial",
            O=np.exp(1j * arg_o),
            hat_o=self.theta,
            kappa=self.kappa,
            rho=self.kappa - 6.0,
        )


@dataclass
class RadiusSample:
    """``T`` is the first gap: ``-log`` conformal radius of the first loop's inside."""

    T: float
    gaps: List[float]


def theta_path(
    kappa: float,
    beta: float,
    epsilon: float,
    dt: float,
    T_max: float,
    seed: Seed = None,
    j_max: Optional[int] = None,
) -> ThetaPath:
    """Lifted angle from ``theta_0 = 0``, stopped after ``j_max`` closures if given.

    Raises:
        InadmissibleParams: kappa outside (8/3, 8) or beta not allowed for kappa
    """
    check_cle_params(kappa, beta)
    a = lifted_angle_batch(
        kappa, kappa - 6.0, beta, epsilon, dt, T_max, 1, seed, stop_after=j_max, record=True
    )
    theta, anchors, arg_o = a.theta[0], a.anchors[0], a.arg_o[0]  # type: ignore[index]
    closures = a.closures[0]
    end = len(theta)
    if j_max is not None and len(closures) >= j_max:
        end = closures[j_max - 1][1] + 1
    return ThetaPath(
        dt=dt,
        theta=theta[:end],
        anchor=anchors[:end],
        closure_times=[(s * dt, t * dt) for s, t, _ in closures],
        closure_indices=[(s, t) for s, t, _ in closures],
        kappa=kappa,
        beta=beta,
        epsilon=epsilon,
        arg_o=arg_o[:end],
    )


def _first_closure_chunk(args: Tuple) -> np.ndarray:
    kappa, beta, epsilon, dt, count, seed, T_max = args
    a = lifted_angle_batch(
        kappa, kappa - 6.0, beta, epsilon, dt, T_max, count, seed, stop_after=1
    )
    return np.array([c[0][1] * dt if c else np.nan for c in a.closures])


def _gap_chunk(args: Tuple) -> np.ndarray:
    kappa, beta, epsilon, dt, count, seed, T_max, j_max = args
    a = lifted_angle_batch(
        kappa, kappa - 6.0, beta, epsilon, dt, T_max, count, seed, stop_after=j_max
    )
    out = np.full((count, j_max), np.nan)
    for i, cl in enumerate(a.closures):
        ends = [0] + [t for _, t, _ in cl[:j_max]]
        g = np.diff(ends) * dt
        out[i, : len(g)] = g
    return out


def _chunked(worker, head: Tuple, count: int, seed: Seed, tail: Tuple, jobs: int):
    sizes = [min(CHUNK, count - i) for i in range(0, count, CHUNK)]
    seeds = split_seed(seed, len(sizes))
    tasks = [head + (n, s) + tail for n, s in zip(sizes, seeds)]
    return run_chunks(worker, tasks, jobs)


def conformal_radius_sample(
    kappa: float,
    beta: float,
    epsilon: float,
    dt: float,
    count: int,
    seed: Seed = None,
    T_max: float = DEFAULT_T_MAX,
    jobs: int = 1,
) -> np.ndarray:
    """``count`` draws of ``T``, the first time ``|theta|`` reaches ``2 pi``.

    Samples are drawn in fixed chunks of independent seed streams, so the
    result does not depend on ``jobs``. Paths still open at ``T_max`` give NaN.
    """
    check_cle_params(kappa, beta)
    parts = _chunked(
        _first_closure_chunk, (kappa, beta, epsilon, dt), count, seed, (T_max,), jobs
    )
    return np.concatenate(parts)


def nested_radius_batch(
    kappa: float,
    beta: float,
    epsilon: float,
    dt: float,
    j_max: int,
    count: int,
    seed: Seed = None,
    T_max: float = DEFAULT_T_MAX,
    jobs: int = 1,
) -> np.ndarray:
    """``(count, j_max)`` array of successive closure gaps; NaN where not reached."""
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    check_cle_params(kappa, beta)
    parts = _chunked(
        _gap_chunk, (kappa, beta, epsilon, dt), count, seed, (T_max, j_max), jobs
    )
    return np.concatenate(parts)


def nested_radius_sequence(
    kappa: float,
    beta: float,
    epsilon: float,
    dt: float,
    j_max: int,
    seed: Seed = None,
    T_max: float = DEFAULT_T_MAX,
) -> RadiusSample:
    """Gaps ``t_j - t_{j-1}`` between the first ``j_max`` closures of one exploration."""
    if j_max < 2:
        raise ValueError(f"j_max must be >= 2, got {j_max}")
    row = nested_radius_batch(kappa, beta, epsilon, dt, j_max, 1, seed, T_max)[0]
    gaps = [float(g) for g in row if np.isfinite(g)]
    return RadiusSample(T=gaps[0] if gaps else math.nan, gaps=gaps)


def reflected_exit_cdf(t, level: float = math.pi, terms: int = 200):
    """CDF of the first time ``|B|`` reaches ``level``, with mean ``level**2``.

    At ``kappa = 4`` the angle is ``2B``, so this is the law of ``T``.
    """
    t = np.asarray(t, dtype=float)
    k = np.arange(terms)[:, None]
    odd = 2 * k + 1
    tail = (4.0 / math.pi) * np.sum(
        (-1.0) ** k / odd * np.exp(-(odd**2) * math.pi**2 * np.maximum(t, 0.0) / (8 * level**2)),
        axis=0,
    )
    return np.clip(1.0 - tail.reshape(t.shape), 0.0, 1.0)


# -------------------------
# Loop arcs
# -------------------------


@dataclass
class LoopArc:
    """Trace of the exploration between ``s_j`` and ``t_j``."""

    j: int
    s: float
    t: float
    anchor: int
    trace: TracePath


def cle_loop_arcs(
    kappa: float,
    beta: float,
    epsilon: float,
    dt: float,
    j_max: int,
    seed: Seed = None,
    T_max: float = DEFAULT_T_MAX,
    stride: int = 1,
) -> List[LoopArc]:
    """Arcs of the first ``j_max`` loops around 0, cut from the radial trace.

    Arc ``j`` holds the trace points with step index in ``[s_j, t_j)`` (at the
    given stride).
    """
    path = theta_path(kappa, beta, epsilon, dt, T_max, seed, j_max=j_max)
    if not path.closure_indices:
        return []
    trace = radial_trace(path.driver(), stride=stride)
    idx = trace.indices if trace.indices is not None else np.arange(len(trace.points))
    arcs = []
    for j, (s, t) in enumerate(path.closure_indices[:j_max], start=1):
        keep = (idx >= s) & (idx < t)
        arcs.append(
            LoopArc(
                j=j,
                s=s * dt,
                t=t * dt,
                anchor=int(path.anchor[min(t, len(path.anchor) - 1)]),
                trace=TracePath(dt=dt, points=trace.points[keep], mode="radial", indices=idx[keep]),
            )
        )
    return arcs


# -------------------------
# Target invariance
# -------------------------


def mobius_to_target(z: complex):
    """Disk automorphism sending 0 to ``z`` and fixing 1."""
    rot = (1 - z) / (1 - np.conj(z))

    def f(v):
        v = np.asarray(v, dtype=complex) * rot
        return (v + z) / (1 + np.conj(z) * v)

    return f


@dataclass
class TargetInvarianceReport:
    kappa: float
    beta: float
    z1: complex
    z2: complex
    samples: int
    radius: float
    exits1: int
    exits2: int
    ks_statistic: float
    ks_pvalue: float
    seed: Optional[int] = None
    alpha: float = 0.01

    @property
    def passed(self) -> bool:
        return self.ks_pvalue >= self.alpha

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["z1"] = [self.z1.real, self.z1.imag]
        d["z2"] = [self.z2.real, self.z2.imag]
        d["passed"] = self.passed
        return d


def _exit_angles(
    kappa: float,
    beta: float,
    epsilon: float,
    dt: float,
    T: float,
    z: complex,
    radius: float,
    count: int,
    seed: Seed,
) -> np.ndarray:
    to_z = mobius_to_target(z)
    out = []
    for s in split_seed(seed, count):
        a = lifted_angle_batch(kappa, kappa - 6.0, beta, epsilon, dt, T, 1, s, record=True)
        d = Driver(
            dt=dt,
            W=np.exp(1j * (a.arg_o[0] + a.theta[0])),  # type: ignore[index]
            mode="radial",
        )
        pts = to_z(radial_trace(d).points)
        away = np.flatnonzero(np.abs(pts - 1.0) >= radius)
        if len(away):
            out.append(float(np.angle(pts[away[0]] - 1.0)))
    return np.array(out)


def target_invariance_check(
    kappa: float,
    z1: complex,
    z2: complex,
    epsilon: float,
    dt: float,
    count: int,
    seed: Optional[int] = None,
    beta: Optional[float] = None,
    radius: float = 0.3,
    T: float = 0.5,
    alpha: float = 0.01,
) -> TargetInvarianceReport:
    """KS test on where explorations aimed at ``z1`` and ``z2`` leave ``B(1, radius)``.

    Both explorations start at 1; the curve aimed at ``z`` is the image of
    the one aimed at 0 under :func:`mobius_to_target`. Targets outside the
    ball are not separated before the exit, so the exit angle has one law.
    Equal targets share a seed stream.
    """
    for z in (z1, z2):
        if abs(z) >= 1:
            raise ValueError(f"targets must lie in the open disk, got {z}")
    b = (0.0 if kappa == 4 else 1.0) if beta is None else beta
    check_cle_params(kappa, b)
    s1, s2 = split_seed(seed, 2)
    e1 = _exit_angles(kappa, b, epsilon, dt, T, z1, radius, count, s1)
    e2 = e1 if z1 == z2 else _exit_angles(kappa, b, epsilon, dt, T, z2, radius, count, s2)
    if len(e1) and len(e2):
        ks = stats.ks_2samp(e1, e2)
        ks_stat, ks_p = float(ks.statistic), float(ks.pvalue)
    else:
        ks_stat, ks_p = math.nan, math.nan
    return TargetInvarianceReport(
        kappa=kappa,
        beta=b,
        z1=complex(z1),
        z2=complex(z2),
        samples=count,
        radius=radius,
        exits1=len(e1),
        exits2=len(e2),
        ks_statistic=ks_stat,
        ks_pvalue=ks_p,
        seed=seed,
        alpha=alpha,
    )


__all__ = [
    "KAPPA_RANGE",
    "ThetaPath",
    "RadiusSample",
    "LoopArc",
    "TargetInvarianceReport",
    "check_cle_params",
    "theta_path",
    "conformal_radius_sample",
    "nested_radius_batch",
    "nested_radius_sequence",
    "reflected_exit_cdf",
    "cle_loop_arcs",
    "mobius_to_target",
    "target_invariance_check",
]
