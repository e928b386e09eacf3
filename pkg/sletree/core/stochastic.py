"""Sampled Brownian, Bessel, epsilon-jumping Bessel and skew Bessel paths.

All samplers step a batch of independent paths at once and are pure
functions of ``(params, seed)``. Passing ``noise`` (Brownian increments of
shape ``(paths, steps)``) replays a previous run exactly; with
``record=True`` the increments used are stored on the result.

Bessel companions:

- ``delta != 1``: ``Y = 2 / (delta - 1) * (X - X0 - B)`` (principal value).
- ``delta == 1``: ``Y = 2 * (X - X0 - B)`` (zero local time).
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import special

from sletree.core.errors import DegenerateDelta, InvalidSkewCombo
from sletree.core.validation import validate_positive

Seed = Union[int, np.random.Generator, np.random.SeedSequence, None]

SCHEMES = ("besq", "direct")


def as_generator(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def step_count(dt: float, T: float) -> int:
    for name, value in (("dt", dt), ("T", T)):
        ok, msg = validate_positive(name, value)
        if not ok:
            raise ValueError(msg)
    return max(1, int(round(T / dt)))


class BesselParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float = Field(gt=0)
    x0: float = 0.0
    epsilon: Optional[float] = Field(default=None, gt=0)
    beta: float = Field(default=1.0, ge=-1.0, le=1.0)
    mu: float = 0.0


@dataclass(frozen=True)
class SampledPath:
    """One sampled path on the grid ``k * dt``.

    ``jump_events`` holds ``(index, size)`` pairs with strictly increasing
    indices; ``driver_noise`` replays the path bit for bit.
    """

    dt: float
    values: np.ndarray
    driver_noise: Optional[np.ndarray] = None
    jump_events: Tuple[Tuple[int, float], ...] = ()
    brownian: Optional[np.ndarray] = None
    companion: Optional[np.ndarray] = None
    jumps: Optional[np.ndarray] = None
    signs: Optional[np.ndarray] = None
    upcrossings: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.dt


@dataclass
class PathBatch:
    """A batch of paths; full trajectories are kept only when recorded."""

    dt: float
    steps: int
    final: np.ndarray
    final_brownian: np.ndarray
    values: Optional[np.ndarray] = None
    brownian: Optional[np.ndarray] = None
    companion: Optional[np.ndarray] = None
    jumps: Optional[np.ndarray] = None
    signs: Optional[np.ndarray] = None
    noise: Optional[np.ndarray] = None
    final_companion: Optional[np.ndarray] = None
    final_jumps: Optional[np.ndarray] = None
    jump_counts: Optional[np.ndarray] = None
    jump_square_sum: Optional[np.ndarray] = None
    upcrossings: Optional[np.ndarray] = None
    reference: Optional[np.ndarray] = None
    jump_events: List[List[Tuple[int, float]]] = field(default_factory=list)

    @property
    def paths(self) -> int:
        return len(self.final)

    def path(self, i: int = 0) -> SampledPath:
        if self.values is None:
            raise ValueError("batch was sampled without recording trajectories")

        def row(a: Optional[np.ndarray]) -> Optional[np.ndarray]:
            return None if a is None else a[i]

        return SampledPath(
            dt=self.dt,
            values=self.values[i],
            driver_noise=row(self.noise),
            jump_events=tuple(self.jump_events[i]) if self.jump_events else (),
            brownian=row(self.brownian),
            companion=row(self.companion),
            jumps=row(self.jumps),
            signs=row(self.signs),
            upcrossings=int(self.upcrossings[i]) if self.upcrossings is not None else 0,
        )


class _Noise:
    """Brownian increments, drawn step by step or replayed."""

    def __init__(
        self,
        seed: Seed,
        paths: int,
        steps: int,
        dt: float,
        noise: Optional[np.ndarray] = None,
        record: bool = False,
    ):
        self.sqdt = math.sqrt(dt)
        self.paths = paths
        self.replay = None if noise is None else np.asarray(noise, dtype=float)
        if self.replay is not None and self.replay.shape != (paths, steps):
            raise ValueError(f"noise must have shape {(paths, steps)}, got {self.replay.shape}")
        self.rng = as_generator(seed) if self.replay is None else None
        self.kept = np.empty((paths, steps)) if record and self.replay is None else None

    def __call__(self, k: int) -> np.ndarray:
        if self.replay is not None:
            return self.replay[:, k]
        db = self.rng.standard_normal(self.paths) * self.sqdt  # type: ignore[union-attr]
        if self.kept is not None:
            self.kept[:, k] = db
        return db

    @property
    def used(self) -> Optional[np.ndarray]:
        return self.replay if self.replay is not None else self.kept


# -------------------------
# Brownian motion and Bessel processes
# -------------------------


def brownian_batch(
    dt: float, T: float, paths: int = 1, seed: Seed = None, record: bool = True
) -> PathBatch:
    n = step_count(dt, T)
    src = _Noise(seed, paths, n, dt, record=record)
    b = np.zeros(paths)
    hist = np.zeros((paths, n + 1)) if record else None
    for k in range(n):
        b = b + src(k)
        if hist is not None:
            hist[:, k + 1] = b
    return PathBatch(
        dt=dt, steps=n, final=b, final_brownian=b, values=hist, brownian=hist, noise=src.used
    )


def brownian_path(dt: float, T: float, seed: Seed = None) -> SampledPath:
    return brownian_batch(dt, T, 1, seed).path(0)


def principal_value(x, x0, b, delta: float):
    """``2 / (delta - 1) * (x - x0 - b)``; undefined at ``delta == 1``."""
    if delta == 1:
        raise DegenerateDelta("principal value identity needs delta != 1; use the local time form")
    return 2.0 / (delta - 1.0) * (np.asarray(x) - x0 - np.asarray(b))


def bessel_companion(x, x0, b, delta: float):
    if delta == 1:
        return 2.0 * (np.asarray(x) - x0 - np.asarray(b))
    return principal_value(x, x0, b, delta)


def _drift_floor(dt: float) -> float:
    return math.sqrt(dt)


def bessel_batch(
    p: BesselParams,
    dt: float,
    T: float,
    paths: int = 1,
    seed: Seed = None,
    scheme: str = "besq",
    noise: Optional[np.ndarray] = None,
    record: bool = True,
) -> PathBatch:
    """Euler paths of the Bessel process of dimension ``p.delta`` started at ``p.x0``.

    ``besq`` steps ``Z = X**2`` as ``|Z + delta dt + 2 sqrt(Z) dB|``;
    ``direct`` steps ``|X + (delta - 1) / (2 max(X, sqrt(dt))) dt + dB|``; the
    floor keeps each drift step of order ``sqrt(dt)``. Below dimension 1 the
    reflected ``direct`` path stays tied to ``B`` near 0 and biases the
    companion, so ``besq`` is the scheme for ``delta < 1``.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"Unknown scheme '{scheme}'. Use one of {SCHEMES}")
    if p.x0 < 0:
        raise ValueError(f"x0 must be >= 0, got {p.x0}")
    n = step_count(dt, T)
    src = _Noise(seed, paths, n, dt, noise, record)
    delta, floor = p.delta, _drift_floor(dt)
    x = np.full(paths, float(p.x0))
    z = x * x
    b = np.zeros(paths)
    xs = np.empty((paths, n + 1)) if record else None
    bs = np.empty((paths, n + 1)) if record else None
    if record:
        xs[:, 0], bs[:, 0] = x, 0.0  # type: ignore[index]
    for k in range(n):
        db = src(k)
        if scheme == "besq":
            z = np.abs(z + delta * dt + 2.0 * np.sqrt(z) * db)
            x = np.sqrt(z)
        else:
            x = np.abs(x + (delta - 1.0) / (2.0 * np.maximum(x, floor)) * dt + db)
        b = b + db
        if record:
            xs[:, k + 1], bs[:, k + 1] = x, b  # type: ignore[index]
    return PathBatch(
        dt=dt,
        steps=n,
        final=x,
        final_brownian=b,
        values=xs,
        brownian=bs,
        companion=None if xs is None else bessel_companion(xs, p.x0, bs, delta),
        final_companion=bessel_companion(x, p.x0, b, delta),
        noise=src.used,
    )


def bessel_path(
    p: BesselParams,
    dt: float,
    T: float,
    seed: Seed = None,
    scheme: str = "besq",
    noise: Optional[np.ndarray] = None,
) -> SampledPath:
    return bessel_batch(p, dt, T, 1, seed, scheme, noise).path(0)


def besq_exact_step(delta: float, z0, h: float, seed: Seed = None, size=None):
    """Exact squared-Bessel transition: ``2h * Gamma(delta/2 + N)``, ``N ~ Poisson(z0 / 2h)``."""
    if delta <= 0 or np.any(np.asarray(z0) < 0) or h <= 0:
        raise ValueError(f"need delta > 0, z0 >= 0, h > 0; got {delta}, {z0}, {h}")
    rng = as_generator(seed)
    n = rng.poisson(np.asarray(z0) / (2.0 * h), size=size)
    return 2.0 * h * rng.gamma(delta / 2.0 + n)


def bridge_zero_probability(delta: float, x, y, h: float):
    """Chance that ``BES(delta)`` from ``x`` to ``y`` over time ``h`` touches 0 in between.

    ``1 - I_a(xy/h) / I_{-a}(xy/h)`` with ``a = 1 - delta/2``; zero for ``delta >= 2``.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if delta >= 2:
        return np.zeros(np.broadcast(x, y).shape)
    a = 1.0 - delta / 2.0
    z = x * y / h
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        survive = special.ive(a, z) / special.ive(-a, z)
    return np.where(z > 0, 1.0 - np.nan_to_num(survive, nan=1.0), 1.0)


def exact_bessel_grid(
    p: BesselParams, dt: float, T: float, paths: int = 1, seed: Seed = None, record: bool = True
) -> Tuple[Optional[np.ndarray], np.ndarray, np.ndarray]:
    """Grid values of ``BES(p.delta)`` from exact squared-Bessel steps.

    Returns ``(values, final, first_zero)``: ``values`` is ``None`` unless
    ``record``; ``first_zero[i]`` is the step ending the first interval in
    which path ``i`` touches 0, drawn from the bridge probability, or ``-1``.
    """
    if p.x0 < 0:
        raise ValueError(f"x0 must be >= 0, got {p.x0}")
    n = step_count(dt, T)
    rng = as_generator(seed)
    z = np.full(paths, float(p.x0) ** 2)
    first = np.full(paths, -1, dtype=np.int64)
    xs = np.empty((paths, n + 1)) if record else None
    if record:
        xs[:, 0] = np.sqrt(z)  # type: ignore[index]
    for k in range(n):
        z_new = besq_exact_step(p.delta, z, dt, rng)
        fresh = first < 0
        if fresh.any():
            prob = bridge_zero_probability(p.delta, np.sqrt(z[fresh]), np.sqrt(z_new[fresh]), dt)
            touched = rng.random(int(fresh.sum())) < prob
            first[np.flatnonzero(fresh)[touched]] = k + 1
        z = z_new
        if record:
            xs[:, k + 1] = np.sqrt(z)  # type: ignore[index]
    return xs, np.sqrt(z), first


def count_upcrossings(values: np.ndarray, low: float, high: float):
    """Number of passages from ``<= low`` to ``>= high`` along the last axis."""
    v = np.atleast_2d(np.asarray(values, dtype=float))
    armed = v[:, 0] <= low
    count = np.zeros(v.shape[0], dtype=np.int64)
    for k in range(1, v.shape[1]):
        up = armed & (v[:, k] >= high)
        count += up
        armed = (armed & ~up) | (v[:, k] <= low)
    return count if np.ndim(values) > 1 else int(count[0])


# -------------------------
# Epsilon-jumping Bessel process
# -------------------------


def eps_bessel_batch(
    p: BesselParams,
    dt: float,
    T: float,
    paths: int = 1,
    seed: Seed = None,
    noise: Optional[np.ndarray] = None,
    record: bool = True,
) -> PathBatch:
    """Bessel evolution that jumps up by multiples of ``p.epsilon`` instead of reflecting.

    A step landing at ``y <= 0`` moves to ``y + k eps`` with the least ``k``
    making it positive, counted as ``k`` jumps of size ``eps``, so that
    ``X = X0 + B + drift + J`` holds exactly. The reference ordinary Bessel
    path (``direct`` scheme, same noise) supplies the upcrossing counts of
    ``[sqrt(dt), eps]``.
    """
    if p.epsilon is None:
        raise ValueError("eps_bessel needs epsilon")
    if p.x0 < 0:
        raise ValueError(f"x0 must be >= 0, got {p.x0}")
    eps, delta = float(p.epsilon), p.delta
    n = step_count(dt, T)
    src = _Noise(seed, paths, n, dt, noise, record)
    floor = _drift_floor(dt)
    low = floor

    x = np.full(paths, float(p.x0))
    counts = np.zeros(paths, dtype=np.int64)
    events: List[List[Tuple[int, float]]] = [[] for _ in range(paths)] if record else []
    start = x <= 0
    if start.any():
        k0 = np.floor(-x[start] / eps).astype(np.int64) + 1
        x[start] = x[start] + k0 * eps
        counts[start] = k0
        if record:
            for i, k in zip(np.flatnonzero(start), k0):
                events[i].append((0, float(k * eps)))
    ref = np.full(paths, float(p.x0))
    armed = ref <= low
    ups = np.zeros(paths, dtype=np.int64)
    b = np.zeros(paths)

    xs = np.empty((paths, n + 1)) if record else None
    bs = np.empty((paths, n + 1)) if record else None
    js = np.empty((paths, n + 1)) if record else None
    rs = np.empty((paths, n + 1)) if record else None
    if record:
        xs[:, 0], bs[:, 0], js[:, 0], rs[:, 0] = x, 0.0, counts * eps, ref  # type: ignore[index]
    for k in range(n):
        db = src(k)
        y = x + (delta - 1.0) / (2.0 * np.maximum(x, floor)) * dt + db
        hit = y <= 0
        if hit.any():
            kk = np.floor(-y[hit] / eps).astype(np.int64) + 1
            y[hit] = y[hit] + kk * eps
            counts[hit] += kk
            if record:
                for i, kj in zip(np.flatnonzero(hit), kk):
                    events[i].append((k + 1, float(kj * eps)))
        x = y
        ref = np.abs(ref + (delta - 1.0) / (2.0 * np.maximum(ref, floor)) * dt + db)
        up = armed & (ref >= eps)
        ups += up
        armed = (armed & ~up) | (ref <= low)
        b = b + db
        if record:
            xs[:, k + 1], bs[:, k + 1] = x, b  # type: ignore[index]
            js[:, k + 1], rs[:, k + 1] = counts * eps, ref  # type: ignore[index]
    j = counts * eps
    return PathBatch(
        dt=dt,
        steps=n,
        final=x,
        final_brownian=b,
        values=xs,
        brownian=bs,
        jumps=js,
        noise=src.used,
        final_jumps=j,
        jump_counts=counts,
        jump_square_sum=counts * eps * eps,
        upcrossings=ups,
        reference=rs if record else ref,
        final_companion=bessel_companion(ref, p.x0, b, delta),
        jump_events=events,
    )


def eps_bessel_path(
    p: BesselParams, dt: float, T: float, seed: Seed = None, noise: Optional[np.ndarray] = None
) -> SampledPath:
    return eps_bessel_batch(p, dt, T, 1, seed, noise).path(0)


# -------------------------
# Skew Bessel process
# -------------------------


def check_skew_combo(delta: float, beta: float, mu: float) -> None:
    """Accept delta in (0,1)u(1,2) with mu = 0, or delta = 1 with beta = 0."""
    if delta == 1:
        if beta != 0:
            raise InvalidSkewCombo(f"delta = 1 needs beta = 0, got beta = {beta}")
        return
    if not (0 < delta < 2):
        raise InvalidSkewCombo(f"skew Bessel needs 0 < delta < 2, got {delta}")
    if mu != 0:
        raise InvalidSkewCombo(f"mu must be 0 unless delta = 1, got mu = {mu}")


def excursion_signs(
    magnitude: np.ndarray, x0: float, beta: float, resolution: float, coins: np.random.Generator
) -> np.ndarray:
    """Per-index signs: one fair-or-biased coin per excursion above ``resolution``.

    Near-zero indices take the sign of the following excursion; the first
    excursion keeps the sign of ``x0`` when ``x0 != 0``.
    """
    m = np.atleast_2d(magnitude)
    paths, length = m.shape
    signs = np.ones((paths, length))
    p_plus = (1.0 + beta) / 2.0
    for i in range(paths):
        away = m[i] >= resolution
        starts = np.flatnonzero(away & ~np.concatenate(([False], away[:-1])))
        draws = np.where(coins.random(len(starts)) < p_plus, 1.0, -1.0)
        if len(starts) and starts[0] == 0 and x0 != 0:
            draws[0] = math.copysign(1.0, x0)
        if not len(starts):
            signs[i, :] = math.copysign(1.0, x0) if x0 != 0 else 1.0
            continue
        # Every index takes the sign of the next excursion start at or after it.
        owner = np.searchsorted(starts, np.arange(length), side="left")
        owner = np.minimum(owner, len(starts) - 1)
        in_exc = np.maximum(np.searchsorted(starts, np.arange(length), side="right") - 1, 0)
        pick = np.where(away, in_exc, owner)
        signs[i] = draws[pick]
    return signs if np.ndim(magnitude) > 1 else signs[0]


def skew_bessel_batch(
    p: BesselParams,
    dt: float,
    T: float,
    paths: int = 1,
    seed: Seed = None,
    noise: Optional[np.ndarray] = None,
    resolution: Optional[float] = None,
) -> PathBatch:
    """Signed Bessel paths: excursions of ``|X|`` signed + with probability ``(1 + beta) / 2``.

    ``|X|`` follows the ``direct`` Bessel scheme from ``|x0|``; excursion
    coins come from a stream separate from the Brownian noise. The companion
    is ``2 / (delta - 1) (X - X0 - Bs)`` with ``Bs`` the signed Brownian
    motion, and for ``delta = 1`` it is ``2 (X - X0 - Bs) + mu * l`` with
    ``l = 2 (|X| - |X0| - B)``.

    Raises:
        InvalidSkewCombo: unsupported (delta, beta, mu)
    """
    check_skew_combo(p.delta, p.beta, p.mu)
    noise_seq, coin_seq = split_seed(seed, 2)
    base = BesselParams(delta=p.delta, x0=abs(p.x0))
    mag = bessel_batch(
        base, dt, T, paths, np.random.default_rng(noise_seq), "direct", noise, record=True
    )
    res = math.sqrt(dt) if resolution is None else resolution
    signs = excursion_signs(mag.values, p.x0, p.beta, res, np.random.default_rng(coin_seq))
    x = signs * mag.values
    db = np.diff(mag.brownian, axis=1)  # type: ignore[arg-type]
    bs = np.concatenate((np.zeros((paths, 1)), np.cumsum(signs[:, :-1] * db, axis=1)), axis=1)
    if p.delta == 1:
        local = 2.0 * (mag.values - abs(p.x0) - mag.brownian)
        y = 2.0 * (x - p.x0 - bs) + p.mu * local
    else:
        y = principal_value(x, p.x0, bs, p.delta)
    return PathBatch(
        dt=dt,
        steps=mag.steps,
        final=x[:, -1],
        final_brownian=mag.final_brownian,
        values=x,
        brownian=mag.brownian,
        companion=y,
        signs=signs,
        noise=mag.noise,
        final_companion=y[:, -1],
    )


def split_seed(seed: Seed, k: int) -> List[np.random.SeedSequence]:
    """``k`` independent child seed sequences of ``seed``."""
    if isinstance(seed, np.random.SeedSequence):
        return seed.spawn(k)
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(0, 2**63))).spawn(k)
    return np.random.SeedSequence(seed).spawn(k)


def skew_bessel_path(
    p: BesselParams, dt: float, T: float, seed: Seed = None, noise: Optional[np.ndarray] = None
) -> SampledPath:
    return skew_bessel_batch(p, dt, T, 1, seed, noise).path(0)


__all__ = [
    "BesselParams",
    "SampledPath",
    "PathBatch",
    "SCHEMES",
    "as_generator",
    "split_seed",
    "step_count",
    "brownian_batch",
    "brownian_path",
    "bessel_batch",
    "bessel_path",
    "bessel_companion",
    "besq_exact_step",
    "bridge_zero_probability",
    "exact_bessel_grid",
    "principal_value",
    "count_upcrossings",
    "eps_bessel_batch",
    "eps_bessel_path",
    "check_skew_combo",
    "excursion_signs",
    "skew_bessel_batch",
    "skew_bessel_path",
]
