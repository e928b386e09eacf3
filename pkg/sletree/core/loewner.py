"""Numerical Loewner chains.

Chordal maps are advanced one step at a time with the driving value held
constant, which makes every step an explicit vertical slit map:
``g -> W + sqrt((g - W)**2 + 4 dt)``. Radial maps integrate
``dg/dt = Psi(W, g) = -g (g + W) / (g - W)`` with RK4 substeps.

SLE_kappa(rho) drivers come in two variants. ``exact`` couples to a Bessel
path of dimension ``1 + 2 (rho + 2) / kappa`` and reads the force point off
its principal-value companion. ``eps`` restarts the Bessel path at the
epsilon scale after every collision and moves ``W`` and ``O`` by the
jump matrix returned by :func:`jump_matrix`.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import stats

from sletree.core.errors import InadmissibleParams, InvalidSkewCombo
from sletree.core.stochastic import (
    BesselParams,
    Seed,
    as_generator,
    bessel_batch,
    brownian_batch,
    check_skew_combo,
    eps_bessel_batch,
    split_seed,
    step_count,
)
from sletree.core.validation import validate_beta

MODES = ("chordal", "radial")
VARIANTS = ("exact", "eps")
SWALLOW_TOL = 1e-6
RADIAL_TRACE_SUBSTEPS = 10
TWO_PI = 2.0 * math.pi

JumpEvent = Tuple[int, float, float]


@dataclass(frozen=True)
class Driver:
    """Driving function sampled on ``k * dt``.

    Chordal drivers hold real ``W`` and ``O``; radial drivers hold
    unit-modulus ``W`` and ``O`` and the lifted angle ``hat_o`` between
    them. ``jump_events`` are ``(index, W jump, O jump)``.
    """

    dt: float
    W: np.ndarray
    mode: str = "chordal"
    O: Optional[np.ndarray] = None
    hat_o: Optional[np.ndarray] = None
    jump_events: Tuple[JumpEvent, ...] = ()
    kappa: Optional[float] = None
    rho: Optional[float] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"Unknown mode '{self.mode}'. Use one of {MODES}")

    @property
    def steps(self) -> int:
        return len(self.W) - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.W)) * self.dt

    @property
    def T(self) -> float:
        return self.steps * self.dt

    def reversed(self) -> "Driver":
        """Driving values run backwards in time, force point dropped."""
        return Driver(dt=self.dt, W=self.W[::-1].copy(), mode=self.mode)

    def rotated(self, phi: float) -> "Driver":
        if self.mode != "radial":
            raise ValueError("only radial drivers rotate")
        turn = np.exp(1j * phi)
        return Driver(
            dt=self.dt,
            W=self.W * turn,
            mode="radial",
            O=None if self.O is None else self.O * turn,
            hat_o=self.hat_o,
            jump_events=self.jump_events,
            kappa=self.kappa,
            rho=self.rho,
        )


@dataclass(frozen=True)
class TracePath:
    dt: float
    points: np.ndarray
    mode: str
    indices: Optional[np.ndarray] = None

    @property
    def times(self) -> np.ndarray:
        idx = np.arange(len(self.points)) if self.indices is None else self.indices
        return idx * self.dt


@dataclass
class ForwardResult:
    """Trajectory of ``g_t(z)``; ``swallow_time`` is None when ``z`` survives."""

    times: np.ndarray
    values: np.ndarray
    swallow_time: Optional[float] = None
    log_derivative: Optional[np.ndarray] = None

    @property
    def final(self) -> complex:
        return complex(self.values[-1])


def constant_driver(value, dt: float, T: float, mode: str = "chordal") -> Driver:
    n = step_count(dt, T)
    dtype = complex if mode == "radial" else float
    return Driver(dt=dt, W=np.full(n + 1, value, dtype=dtype), mode=mode)


# -------------------------
# Chordal maps
# -------------------------


def _upper_root(q, w):
    """Square root of ``q`` in the closed upper half-plane; real roots take the sign of ``w``."""
    r = np.sqrt(np.asarray(q, dtype=complex))
    flip = (r.imag < 0) | ((r.imag == 0) & (np.real(w) < 0))
    return np.where(flip, -r, r)


def chordal_forward(
    d: Driver, z: complex, until: Optional[float] = None, tol: float = SWALLOW_TOL
) -> ForwardResult:
    """``g_t(z)`` under ``dg/dt = 2 / (g - W)`` with ``W`` constant on each step.

    ``z`` is swallowed at the first time ``|g_t(z) - W|`` drops to ``tol``;
    within a step that time is located exactly from ``(g - W)**2 + 4 s``.
    """
    if z.imag < 0:
        raise ValueError(f"chordal_forward needs Im z >= 0, got {z}")
    n = d.steps if until is None else min(d.steps, step_count(d.dt, until))
    dt = d.dt
    g = complex(z)
    values = [g]
    for k in range(n):
        w = g - float(d.W[k])
        sq = w * w
        s_star = min(max(-sq.real / 4.0, 0.0), dt)
        if abs(sq + 4.0 * s_star) <= tol * tol:
            return ForwardResult(
                times=np.arange(k + 1) * dt,
                values=np.array(values),
                swallow_time=k * dt + s_star,
            )
        g = complex(float(d.W[k]) + _upper_root(sq + 4.0 * dt, w))
        values.append(g)
    return ForwardResult(times=np.arange(n + 1) * dt, values=np.array(values))


def half_plane_capacity(d: Driver, z: complex = 1000j) -> float:
    """``Re z (g_T(z) - z) / 2``, which tends to ``T`` as ``|z|`` grows."""
    g = chordal_forward(d, z).final
    return float((z * (g - z)).real / 2.0)


def chordal_trace(d: Driver, stride: int = 1) -> TracePath:
    """Trace by composing inverse slit maps back to time 0.

    The tip at step ``k`` is ``W[k-1] + 2i sqrt(dt)`` pulled back through
    ``f_j^{-1}(w) = W[j-1] + sqrt((w - W[j-1])**2 - 4 dt)`` for
    ``j = k-1, ..., 1``. All selected tips are pulled back together.
    """
    if d.mode != "chordal":
        raise ValueError("chordal_trace needs a chordal driver")
    n, dt = d.steps, d.dt
    W = np.asarray(d.W, dtype=float)
    ks = np.arange(stride, n + 1, stride)
    if len(ks) == 0 or ks[-1] != n:
        ks = np.append(ks, n)
    pts = W[ks - 1] + 2j * math.sqrt(dt)
    for j in range(n - 1, 0, -1):
        sel = ks > j
        if not sel.any():
            continue
        first = int(np.argmax(sel))
        w = pts[first:] - W[j - 1]
        pts[first:] = W[j - 1] + _upper_root(w * w - 4.0 * dt, w)
    points = np.concatenate(([complex(W[0])], pts))
    return TracePath(dt=dt, points=points, mode="chordal", indices=np.concatenate(([0], ks)))


# -------------------------
# Radial maps
# -------------------------


def radial_field(w, z):
    return -z * (z + w) / (z - w)


def radial_field_dz(w, z):
    return -(z * z - 2.0 * z * w - w * w) / (z - w) ** 2


def _rk4(f, z, h: float, substeps: int):
    s = h / substeps
    for _ in range(substeps):
        k1 = f(z)
        k2 = f(z + 0.5 * s * k1)
        k3 = f(z + 0.5 * s * k2)
        k4 = f(z + s * k3)
        z = z + s / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return z


def radial_forward(
    d: Driver,
    z: complex,
    until: Optional[float] = None,
    substeps: int = 4,
    tol: float = SWALLOW_TOL,
) -> ForwardResult:
    """``g_t(z)`` under ``dg/dt = Psi(W, g)`` with ``log|g_t'(z)|`` from the variational ODE."""
    if abs(z) > 1 + 1e-12:
        raise ValueError(f"radial_forward needs |z| <= 1, got {z}")
    if d.mode != "radial":
        raise ValueError("radial_forward needs a radial driver")
    n = d.steps if until is None else min(d.steps, step_count(d.dt, until))
    dt = d.dt
    state = np.array([complex(z), 0.0 + 0.0j])
    values, logd = [state[0]], [0.0]
    for k in range(n):
        w = complex(d.W[k])
        if abs(state[0] - w) <= tol:
            return ForwardResult(
                times=np.arange(k + 1) * dt,
                values=np.array(values),
                swallow_time=k * dt,
                log_derivative=np.array(logd),
            )

        def flow(s, w=w):
            return np.array([radial_field(w, s[0]), radial_field_dz(w, s[0])])

        state = _rk4(flow, state, dt, substeps)
        if not np.all(np.isfinite(state)):
            return ForwardResult(
                times=np.arange(k + 1) * dt,
                values=np.array(values),
                swallow_time=(k + 1) * dt,
                log_derivative=np.array(logd),
            )
        values.append(state[0])
        logd.append(state[1].real)
    return ForwardResult(
        times=np.arange(n + 1) * dt, values=np.array(values), log_derivative=np.array(logd)
    )


def radial_slit_tip(dt: float) -> float:
    """Tip ``x`` of the radial slit ``[x, 1]`` whose complement has conformal radius ``e**-dt``."""
    q = math.exp(-dt)
    return ((2.0 - q) - 2.0 * math.sqrt(1.0 - q)) / q


def radial_trace(d: Driver, stride: int = 1, substeps: int = RADIAL_TRACE_SUBSTEPS) -> TracePath:
    """Trace by backward integration of ``-Psi`` from the one-step slit tip.

    The tip at step ``k`` starts at ``W[k-1] * radial_slit_tip(dt)`` and flows
    back through steps ``k-1, ..., 1``; points are clamped to the closed disk.
    """
    if d.mode != "radial":
        raise ValueError("radial_trace needs a radial driver")
    n, dt = d.steps, d.dt
    W = np.asarray(d.W, dtype=complex)
    ks = np.arange(stride, n + 1, stride)
    if len(ks) == 0 or ks[-1] != n:
        ks = np.append(ks, n)
    pts = W[ks - 1] * radial_slit_tip(dt)
    for j in range(n - 1, 0, -1):
        sel = ks > j
        if not sel.any():
            continue
        first = int(np.argmax(sel))
        w = W[j - 1]
        z = _rk4(lambda u, w=w: -radial_field(w, u), pts[first:], dt, substeps)
        r = np.abs(z)
        pts[first:] = np.where(r > 1.0, z / np.where(r > 0, r, 1.0), z)
    points = np.concatenate(([W[0]], pts))
    return TracePath(dt=dt, points=points, mode="radial", indices=np.concatenate(([0], ks)))


# -------------------------
# Drivers
# -------------------------


def sle_driver(
    kappa: float, mode: str = "chordal", dt: float = 1e-3, T: float = 1.0, seed: Seed = None
) -> Driver:
    """``sqrt(kappa) B`` (chordal) or ``exp(i sqrt(kappa) B)`` (radial)."""
    if kappa < 0:
        raise InadmissibleParams(f"kappa must be >= 0, got {kappa}")
    if mode not in MODES:
        raise ValueError(f"Unknown mode '{mode}'. Use one of {MODES}")
    b = brownian_batch(dt, T, 1, seed).values[0]  # type: ignore[index]
    w = math.sqrt(kappa) * b
    if mode == "radial":
        return Driver(dt=dt, W=np.exp(1j * w), mode="radial", kappa=kappa)
    return Driver(dt=dt, W=w, mode="chordal", kappa=kappa)


def delta_of(kappa: float, rho: float) -> float:
    """Bessel dimension ``1 + 2 (rho + 2) / kappa`` of ``(W - O) / sqrt(kappa)``."""
    if kappa <= 0:
        raise InadmissibleParams(f"kappa must be > 0, got {kappa}")
    return 1.0 + 2.0 * (rho + 2.0) / kappa


def jump_matrix(kappa: float, rho: float) -> Tuple[float, float]:
    """``(W, O)`` jumps per unit epsilon jump of the Bessel coordinate.

    Their difference is always ``sqrt(kappa)``; for ``rho >= -2`` only ``O`` moves.
    """
    sk = math.sqrt(kappa)
    if rho < -2:
        return sk * rho / (rho + 2.0), -2.0 * sk / (rho + 2.0)
    return 0.0, -sk


def check_admissible(
    kappa: float, rho: float, variant: str = "exact", beta: float = 1.0, mu: float = 0.0
) -> float:
    """Dimension of the driver, after checking the (variant, beta, mu, delta) combination.

    Raises:
        InadmissibleParams: non-positive dimension or an unsupported skew combination
    """
    if variant not in VARIANTS:
        raise ValueError(f"Unknown variant '{variant}'. Use one of {VARIANTS}")
    ok, msg = validate_beta(beta)
    if not ok:
        raise InadmissibleParams(msg)
    delta = delta_of(kappa, rho)
    if delta <= 0:
        raise InadmissibleParams(f"need 1 + 2 (rho + 2) / kappa > 0, got {delta}")
    if variant == "exact" and (beta != 1 or mu != 0):
        raise InadmissibleParams("the exact variant needs beta = 1 and mu = 0")
    if beta == 1 and mu == 0:
        return delta
    try:
        check_skew_combo(delta, beta, mu)
    except InvalidSkewCombo as e:
        raise InadmissibleParams(str(e)) from e
    return delta


@dataclass
class DriverBatch:
    """Final values of many independent chordal SLE_kappa(rho) drivers."""

    kappa: float
    rho: float
    T: float
    dt: float
    W: np.ndarray
    O: np.ndarray
    W0: float


def _epsilon_for(variant: str, epsilon: Optional[float]) -> Optional[float]:
    if variant == "eps" and (epsilon is None or epsilon <= 0):
        raise InadmissibleParams("the eps variant needs epsilon > 0")
    return epsilon


def _chordal_exact(kappa, rho, delta, x0, dt, T, paths, seed, noise, record):
    """Exact-variant driver from one Bessel batch; ``delta < 1`` steps the square."""
    sk = math.sqrt(kappa)
    scheme = "besq" if delta < 1 else "direct"
    batch = bessel_batch(
        BesselParams(delta=delta, x0=x0), dt, T, paths, seed, scheme, noise, record
    )
    if record:
        o = -(2.0 / sk) * batch.companion  # type: ignore[operator]
        return o + sk * batch.values, o, ()
    o = -(2.0 / sk) * batch.final_companion  # type: ignore[operator]
    return o + sk * batch.final, o, ()


def _chordal_eps(kappa, rho, delta, epsilon, beta, mu, x0, dt, T, paths, seed, noise):
    """Recorded eps-variant paths with beta-randomized jump signs."""
    sk = math.sqrt(kappa)
    w_coef, o_coef = jump_matrix(kappa, rho)
    path_seed, coin_seed = split_seed(seed, 2)
    batch = eps_bessel_batch(
        BesselParams(delta=delta, x0=x0, epsilon=epsilon),
        dt,
        T,
        paths,
        np.random.default_rng(path_seed),
        noise,
    )
    coins = np.random.default_rng(coin_seed)
    x = batch.values
    signs = np.ones_like(x)
    o_jumps = np.zeros_like(x)
    events: List[List[JumpEvent]] = []
    p_plus = (1.0 + beta) / 2.0
    for i in range(paths):
        row: List[JumpEvent] = []
        s = 1.0
        last = 0
        for idx, size in batch.jump_events[i]:
            signs[i, last:idx] = s
            s = 1.0 if coins.random() < p_plus else -1.0
            last = idx
            o_jumps[i, idx] += o_coef * s * size
            row.append((idx, w_coef * s * size, o_coef * s * size))
        signs[i, last:] = s
        events.append(row)
    floor = math.sqrt(dt)
    inv = np.zeros_like(x)
    inv[:, 1:] = np.cumsum(signs[:, :-1] * dt / np.maximum(x[:, :-1], floor), axis=1)
    local = batch.jumps if mu != 0 else 0.0
    o = -(2.0 / sk) * (inv + mu * local) + np.cumsum(o_jumps, axis=1)
    w = o + sk * signs * x
    return w, o, events


def chordal_kr_batch(
    kappa: float,
    rho: float,
    variant: str = "exact",
    epsilon: Optional[float] = None,
    beta: float = 1.0,
    mu: float = 0.0,
    x0: float = 0.0,
    dt: float = 1e-3,
    T: float = 1.0,
    paths: int = 1000,
    seed: Seed = None,
) -> DriverBatch:
    """Final ``W_T`` and ``O_T`` of ``paths`` independent chordal drivers.

    The eps variant with ``beta = 1`` and ``mu = 0`` uses the closed form
    ``int 1/X = 2 / (delta - 1) (X - X0 - B - J)`` so nothing is recorded.
    """
    delta = check_admissible(kappa, rho, variant, beta, mu)
    epsilon = _epsilon_for(variant, epsilon)
    sk = math.sqrt(kappa)
    if variant == "exact":
        w, o, _ = _chordal_exact(kappa, rho, delta, x0, dt, T, paths, seed, None, False)
    elif beta == 1 and mu == 0 and delta != 1:
        b = eps_bessel_batch(
            BesselParams(delta=delta, x0=x0, epsilon=epsilon), dt, T, paths, seed, record=False
        )
        _, o_coef = jump_matrix(kappa, rho)
        integral = 2.0 / (delta - 1.0) * (b.final - x0 - b.final_brownian - b.final_jumps)
        o = -(2.0 / sk) * integral + o_coef * b.final_jumps
        w = o + sk * b.final
    else:
        w_all, o_all, _ = _chordal_eps(
            kappa, rho, delta, epsilon, beta, mu, x0, dt, T, paths, seed, None
        )
        w, o = w_all[:, -1], o_all[:, -1]
    return DriverBatch(kappa=kappa, rho=rho, T=T, dt=dt, W=w, O=o, W0=sk * x0)


def variance_rate(driver: DriverBatch) -> Tuple[float, float]:
    """``Var(W_T - W_0) / T`` with its standard error."""
    x = driver.W - driver.W0
    n = len(x)
    var = float(np.var(x, ddof=1))
    fourth = float(np.mean((x - x.mean()) ** 4))
    se = math.sqrt(max(fourth - var * var, 0.0) / n)
    return var / driver.T, se / driver.T


def sle_kr_driver(
    kappa: float,
    rho: float,
    mode: str = "chordal",
    variant: str = "exact",
    epsilon: Optional[float] = None,
    beta: float = 1.0,
    mu: float = 0.0,
    x0: float = 0.0,
    dt: float = 1e-3,
    T: float = 1.0,
    seed: Seed = None,
    noise: Optional[np.ndarray] = None,
) -> Driver:
    """One SLE_kappa(rho) driver with ``W_0 - O_0 = sqrt(kappa) x0`` and ``O_0 = 0``.

    Radial drivers take ``x0`` as the initial angle ``arg W - arg O``.

    Raises:
        InadmissibleParams: see :func:`check_admissible`
    """
    if mode not in MODES:
        raise ValueError(f"Unknown mode '{mode}'. Use one of {MODES}")
    if mode == "radial":
        return radial_kr_driver(kappa, rho, variant, epsilon, beta, x0, dt, T, seed, noise)
    delta = check_admissible(kappa, rho, variant, beta, mu)
    epsilon = _epsilon_for(variant, epsilon)
    if noise is not None:
        noise = np.atleast_2d(noise)
    if variant == "exact":
        w, o, events = _chordal_exact(kappa, rho, delta, x0, dt, T, 1, seed, noise, True)
        return Driver(dt=dt, W=w[0], O=o[0], kappa=kappa, rho=rho)
    w, o, ev = _chordal_eps(kappa, rho, delta, epsilon, beta, mu, x0, dt, T, 1, seed, noise)
    return Driver(dt=dt, W=w[0], O=o[0], jump_events=tuple(ev[0]), kappa=kappa, rho=rho)


# -------------------------
# Lifted angle between W and O (radial)
# -------------------------


@dataclass
class AngleBatch:
    """Lifted angles ``theta = arg W - arg O`` of a batch of radial explorations.

    ``collisions[i]`` lists ``(index, multiple, jump)`` for every hit of a
    multiple of ``2 pi``; ``closures[i]`` lists ``(s, t, anchor)`` index pairs
    for hits of a multiple other than the current anchor.
    """

    dt: float
    steps: int
    final: np.ndarray
    anchor: np.ndarray
    closure_counts: np.ndarray
    closures: List[List[Tuple[int, int, int]]]
    collisions: List[List[Tuple[int, int, float]]]
    theta: Optional[np.ndarray] = None
    arg_o: Optional[np.ndarray] = None
    anchors: Optional[np.ndarray] = None
    at_anchor_steps: Optional[np.ndarray] = None


def lifted_angle_batch(
    kappa: float,
    rho: float,
    beta: float,
    epsilon: Optional[float],
    dt: float,
    T: float,
    paths: int = 1,
    seed: Seed = None,
    theta0: float = 0.0,
    stop_after: Optional[int] = None,
    record: bool = False,
    noise: Optional[np.ndarray] = None,
) -> AngleBatch:
    """Euler steps of ``dtheta = sqrt(kappa) dB + (rho + 2) / 2 cot(theta / 2) dt``.

    ``cot`` is evaluated with ``theta mod 2 pi`` clamped away from the multiples
    by ``sqrt(kappa dt)`` or ``epsilon / 10``, whichever is larger, so a
    drift step stays of order ``sqrt(dt)``. A step that crosses the multiple
    ``2 pi m`` by ``o`` restarts at ``2 pi m + s (k eps - o)`` with the least ``k`` making that
    positive and ``s = +1`` with probability ``(1 + beta) / 2``. With
    ``epsilon=None`` the angle is mirrored back instead. ``arg O`` drifts by
    ``-cot(theta / 2) dt`` and jumps by the radial column of the jump matrix.
    Paths stop after ``stop_after`` closures.
    """
    n = step_count(dt, T)
    sk = math.sqrt(kappa)
    coef = (rho + 2.0) / 2.0
    o_per_theta = jump_matrix(kappa, rho)[1] / sk
    floor = max(sk * math.sqrt(dt), (epsilon or 0.0) / 10.0)
    p_plus = (1.0 + beta) / 2.0
    noise_seq, coin_seq = split_seed(seed, 2)
    rng = np.random.default_rng(noise_seq)
    coins = np.random.default_rng(coin_seq)
    replay = None if noise is None else np.atleast_2d(np.asarray(noise, dtype=float))

    theta = np.full(paths, float(theta0))
    arg_o = np.full(paths, -float(theta0))
    anchor = np.full(paths, int(round(theta0 / TWO_PI)), dtype=np.int64)
    last_at_anchor = np.zeros(paths, dtype=np.int64)
    counts = np.zeros(paths, dtype=np.int64)
    near = np.zeros(paths, dtype=np.int64)
    closures: List[List[Tuple[int, int, int]]] = [[] for _ in range(paths)]
    collisions: List[List[Tuple[int, int, float]]] = [[] for _ in range(paths)]
    th_hist = np.full((paths, n + 1), np.nan) if record else None
    o_hist = np.full((paths, n + 1), np.nan) if record else None
    m_hist = np.zeros((paths, n + 1), dtype=np.int64) if record else None

    def restart(idx: np.ndarray, pre: np.ndarray, mult: np.ndarray, step: int) -> np.ndarray:
        base = TWO_PI * mult
        over = np.abs(pre - base)
        if epsilon is None:
            side = np.where(pre < base, 1.0, -1.0)
            return base + side * over
        k = np.floor(over / epsilon) + 1.0
        side = np.where(coins.random(len(idx)) < p_plus, 1.0, -1.0)
        new = base + side * (k * epsilon - over)
        jump = new - pre
        arg_o[idx] += o_per_theta * jump
        for i, mm, jj in zip(idx, mult, jump):
            collisions[i].append((step, int(mm), float(jj)))
        return new

    start = np.flatnonzero(np.mod(theta, TWO_PI) == 0)
    if len(start):
        theta[start] = restart(start, theta[start], anchor[start], 0)
    if record:
        th_hist[:, 0], o_hist[:, 0], m_hist[:, 0] = theta, arg_o, anchor  # type: ignore[index]

    active = np.arange(paths)
    for k in range(n):
        if len(active) == 0:
            break
        th = theta[active]
        cell = np.floor(th / TWO_PI)
        r = np.clip(th - TWO_PI * cell, floor, TWO_PI - floor)
        cot = 1.0 / np.tan(r / 2.0)
        if replay is not None:
            db = replay[active, k]
        else:
            db = rng.standard_normal(len(active)) * math.sqrt(dt)
        new = th + coef * cot * dt + sk * db
        arg_o[active] -= cot * dt
        lo, hi = TWO_PI * cell, TWO_PI * (cell + 1)
        hit = (new <= lo) | (new >= hi)
        if hit.any():
            hidx = active[hit]
            mult = np.where(new[hit] <= lo[hit], cell[hit], cell[hit] + 1).astype(np.int64)
            new[hit] = restart(hidx, new[hit], mult, k + 1)
            same = mult == anchor[hidx]
            last_at_anchor[hidx[same]] = k + 1
            moved = hidx[~same]
            for i, mm in zip(moved, mult[~same]):
                closures[i].append((int(last_at_anchor[i]), k + 1, int(mm)))
            anchor[moved] = mult[~same]
            last_at_anchor[moved] = k + 1
            counts[moved] += 1
        theta[active] = new
        near[active] += np.abs(new - TWO_PI * anchor[active]) < (epsilon or math.sqrt(dt))
        if record:
            th_hist[active, k + 1] = new  # type: ignore[index]
            o_hist[active, k + 1] = arg_o[active]  # type: ignore[index]
            m_hist[active, k + 1] = anchor[active]  # type: ignore[index]
        if stop_after is not None and hit.any():
            active = active[counts[active] < stop_after]
    return AngleBatch(
        dt=dt,
        steps=n,
        final=theta,
        anchor=anchor,
        closure_counts=counts,
        closures=closures,
        collisions=collisions,
        theta=th_hist,
        arg_o=o_hist,
        anchors=m_hist,
        at_anchor_steps=near,
    )


def radial_kr_driver(
    kappa: float,
    rho: float,
    variant: str = "eps",
    epsilon: Optional[float] = None,
    beta: float = 1.0,
    theta0: float = 0.0,
    dt: float = 1e-3,
    T: float = 1.0,
    seed: Seed = None,
    noise: Optional[np.ndarray] = None,
) -> Driver:
    """Radial SLE_kappa(rho) from the lifted angle, with ``arg W_0 = 0``.

    The exact variant mirrors the angle at multiples of ``2 pi``; the eps
    variant restarts at the epsilon scale and records the jumps.
    """
    check_admissible(kappa, rho, variant, beta, 0.0)
    epsilon = _epsilon_for(variant, epsilon)
    a = lifted_angle_batch(
        kappa,
        rho,
        beta,
        epsilon if variant == "eps" else None,
        dt,
        T,
        1,
        seed,
        theta0=theta0,
        record=True,
        noise=noise,
    )
    theta, arg_o = a.theta[0], a.arg_o[0]  # type: ignore[index]
    w_per, o_per = (c / math.sqrt(kappa) for c in jump_matrix(kappa, rho))
    events = tuple((i, w_per * j, o_per * j) for i, _, j in a.collisions[0])
    return Driver(
        dt=dt,
        W=np.exp(1j * (arg_o + theta)),
        mode="radial",
        O=np.exp(1j * arg_o),
        hat_o=theta,
        jump_events=events,
        kappa=kappa,
        rho=rho,
    )


def drift_regression(theta: np.ndarray, dt: float, floor: float = 1e-2) -> Tuple[float, float]:
    """Regress angle increments on ``cot(theta / 2) dt`` away from collisions.

    Returns ``(slope, standard error)``; the slope estimates ``(rho + 2) / 2``.
    """
    th = np.asarray(theta, dtype=float)
    inc = np.diff(th)
    r = np.mod(th[:-1], TWO_PI)
    cell = np.floor(th / TWO_PI)
    keep = (r > floor) & (r < TWO_PI - floor) & (cell[1:] == cell[:-1])
    x = 1.0 / np.tan(r[keep] / 2.0) * dt
    y = inc[keep]
    fit = stats.linregress(x, y)
    return float(fit.slope), float(fit.stderr)


# -------------------------
# Discrete exploration paths as Loewner chains
# -------------------------


def zipper_driver(points: np.ndarray, min_height: float = 1e-9) -> Tuple[np.ndarray, np.ndarray]:
    """Driving values and capacity times of a polygonal path in the upper half-plane.

    Each point is mapped down by the current map and erased by the vertical
    slit map ``a + sqrt((z - a)**2 + b**2)``, which adds capacity ``b**2 / 4``.
    """
    z = np.asarray(points, dtype=complex).copy()
    z = z - z[0]
    times = [0.0]
    drive = [0.0]
    t = 0.0
    for k in range(1, len(z)):
        w = z[k]
        a, b = w.real, max(w.imag, min_height)
        t += b * b / 4.0
        times.append(t)
        drive.append(a)
        rest = z[k + 1:] - a
        z[k + 1:] = a + _upper_root(rest * rest + b * b, rest)
    return np.array(drive), np.array(times)


@dataclass
class DiscreteDriverReport:
    side: int
    samples: int
    seed: Optional[int]
    slope: float
    r_squared: float
    grid_points: int

    @property
    def passed(self) -> bool:
        return self.r_squared > 0.9

    def to_dict(self):
        return {
            "side": self.side,
            "samples": self.samples,
            "seed": self.seed,
            "slope": self.slope,
            "r_squared": self.r_squared,
            "grid_points": self.grid_points,
            "passed": self.passed,
        }


def discrete_driver_check(
    side: int = 20, samples: int = 40, seed: Optional[int] = None, grid_points: int = 20
) -> DiscreteDriverReport:
    """Variance of the zipper driver of uniform-coloring exploration paths versus capacity.

    Colorings are uniform (``n = 1, x = 1``) on a ``side x side`` rhombus with
    a chordal arc from the lowest boundary vertex to the opposite one. The
    lowest vertex sits at 0 and the patch is treated as a region of the upper
    half-plane.
    """
    from sletree.core.exploration import exploration_path
    from sletree.core.hexgrid import build_patch, rhombus
    from sletree.core.loops import ChordalArc, Coloring

    patch = build_patch(rhombus(side))
    cycle = patch.boundary_cycle
    target = cycle[len(cycle) // 2]
    bc = ChordalArc(patch.root, target)
    faces = patch.sorted_faces
    rng = as_generator(seed)
    drives, caps = [], []
    for _ in range(samples):
        bits = rng.random(len(faces)) < 0.5
        c = Coloring(patch, frozenset(f for f, on in zip(faces, bits) if on), bc)
        path = exploration_path(c, target)
        pts = np.array([complex(*patch.embedding[v]) for v in path])
        w, t = zipper_driver(pts)
        drives.append(w)
        caps.append(t)
    horizon = 0.8 * min(t[-1] for t in caps)
    grid = np.linspace(horizon / grid_points, horizon, grid_points)
    values = np.array([np.interp(grid, t, w) for w, t in zip(drives, caps)])
    var = values.var(axis=0, ddof=1)
    fit = stats.linregress(grid, var)
    return DiscreteDriverReport(
        side=side,
        samples=samples,
        seed=seed,
        slope=float(fit.slope),
        r_squared=float(fit.rvalue**2),
        grid_points=grid_points,
    )


__all__ = [
    "MODES",
    "VARIANTS",
    "SWALLOW_TOL",
    "Driver",
    "DriverBatch",
    "TracePath",
    "ForwardResult",
    "AngleBatch",
    "DiscreteDriverReport",
    "constant_driver",
    "chordal_forward",
    "chordal_trace",
    "half_plane_capacity",
    "radial_field",
    "radial_forward",
    "radial_slit_tip",
    "radial_trace",
    "sle_driver",
    "delta_of",
    "jump_matrix",
    "check_admissible",
    "sle_kr_driver",
    "chordal_kr_batch",
    "radial_kr_driver",
    "lifted_angle_batch",
    "variance_rate",
    "drift_regression",
    "zipper_driver",
    "discrete_driver_check",
]
