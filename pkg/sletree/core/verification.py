"""Acceptance suites: exhaustive discrete checks and Monte Carlo oracle comparisons.

Each suite returns :class:`CheckResult` records. Gating checks decide the
``verify`` exit code; exploratory ones are reported only. ``quick`` runs use
smaller samples with tolerances widened to match.
"""

import itertools
import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from scipy import stats

from sletree.core import cle, loewner, stable
from sletree.core.exploration import (
    all_colorings,
    boundary_path_from_loops,
    coloring_from_tree,
    exploration_path,
    exploration_tree,
    height_function,
    is_branch_separated,
    loop_edges_outside_tree,
    normal_spanning_tree_count,
)
from sletree.core.hexgrid import build_patch, face_neighbors, named_patch
from sletree.core.loops import ChordalArc, Coloring, loops_from_coloring
from sletree.core.observability import RunLogger
from sletree.core.onmodel import (
    OnParams,
    critical_x,
    on_exact_distribution,
    on_log_weight,
    run_chain,
    total_variation,
    tree_loop_weight,
)
from sletree.core.stochastic import BesselParams, bessel_batch, eps_bessel_batch

SUITES = ("discrete", "onmodel", "stochastic", "loewner", "cle", "exploratory")


@dataclass
class CheckResult:
    name: str
    suite: str
    passed: bool
    statistic: Optional[float] = None
    threshold: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)
    gating: bool = True
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SuiteReport:
    suites: List[str]
    seed: int
    quick: bool
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.gating and not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suites": self.suites,
            "seed": self.seed,
            "quick": self.quick,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def check_seed(seed: int, name: str) -> int:
    """Per-check seed: stable across runs and distinct between checks."""
    return (seed * 1_000_003 + zlib.crc32(name.encode("utf-8"))) % 2**63


def _patch(name: str):
    return build_patch(named_patch(name))


def _strictly(values: List[float], decreasing: bool) -> bool:
    pairs = zip(values, values[1:])
    return all(a > b for a, b in pairs) if decreasing else all(a < b for a, b in pairs)


# -------------------------
# Discrete
# -------------------------


def _bijection(seed: int, quick: bool) -> List[CheckResult]:
    patch = _patch("flower7")
    identity, separated = True, True
    keys = set()
    for c in all_colorings(patch):
        t = exploration_tree(c)
        keys.add(t.key)
        separated &= is_branch_separated(patch, t)
        identity &= coloring_from_tree(patch, t).black == c.black
    out = [
        CheckResult(
            "bijection_flower7",
            "discrete",
            identity and separated and len(keys) == 1 << len(patch.faces),
            statistic=float(len(keys)),
            threshold=float(1 << len(patch.faces)),
            details={"identity": identity, "branch_separated": separated},
        )
    ]
    expected = {"hex1": 2, "pair2": 4, "tri3": 8}
    counts = {name: normal_spanning_tree_count(_patch(name)) for name in expected}
    out.append(
        CheckResult(
            "normal_tree_counts",
            "discrete",
            counts == expected,
            details={"counts": counts, "expected": expected},
        )
    )
    return out


def _loop_tree_edges(seed: int, quick: bool) -> List[CheckResult]:
    patch = _patch("flower7")
    bad = 0
    for c in all_colorings(patch):
        missing = loop_edges_outside_tree(loops_from_coloring(c), exploration_tree(c))
        bad += sum(1 for m in missing if m != 1)
    return [CheckResult("loop_tree_edges", "discrete", bad == 0, statistic=float(bad))]


def _boundary_paths(seed: int, quick: bool) -> List[CheckResult]:
    patch = _patch("rect 2 2")
    mismatches, cases = 0, 0
    targets = [v for v in patch.boundary_cycle if v != patch.root]
    for c in all_colorings(patch):
        e = loops_from_coloring(c)
        for target in targets:
            arc = Coloring(patch, c.black, ChordalArc(patch.root, target))
            cases += 1
            if boundary_path_from_loops(c, e, target) != exploration_path(arc, target):
                mismatches += 1
    return [
        CheckResult(
            "boundary_path_equivalence",
            "discrete",
            mismatches == 0,
            statistic=float(mismatches),
            details={"cases": cases},
        )
    ]


def _heights(seed: int, quick: bool) -> List[CheckResult]:
    flower = _patch("flower7")
    worst = 0
    for c in all_colorings(flower):
        h = height_function(c).values
        for f in flower.faces:
            for g in face_neighbors(f):
                if g in h:
                    worst = max(worst, abs(h[f] - h[g]))

    patch = _patch("rect 3 2")
    nf = len(patch.faces)
    heights = [height_function(Coloring.from_mask(patch, m)).values for m in range(1 << nf)]
    nested_bad = 0
    for a, b in itertools.product(range(1 << nf), repeat=2):
        if a & ~b == 0 and any(heights[a][f] > heights[b][f] for f in patch.faces):
            nested_bad += 1

    shifts = [p for p in patch.degree_two_positions() if p != patch.root_position]
    rotation_bad = 0
    for m in range(1 << nf):
        c = Coloring.from_mask(patch, m)
        for p in shifts:
            moved = height_function(c, p).values
            rotation_bad += sum(1 for f in patch.faces if moved[f] < heights[m][f])
    return [
        CheckResult("height_adjacency", "discrete", worst <= 6, float(worst), 6.0),
        CheckResult("height_monotonicity", "discrete", nested_bad == 0, float(nested_bad)),
        CheckResult(
            "height_rotation",
            "discrete",
            rotation_bad == 0,
            float(rotation_bad),
            details={"shifts": shifts},
        ),
    ]


# -------------------------
# O(n) model
# -------------------------

ON_PARAMS = ((1.0, 1.0), (1.5, 0.6), (2.0, 0.7))


def _on_chain(seed: int, quick: bool) -> List[CheckResult]:
    patch = _patch("rect 2 2")
    sweeps = 25_000 if quick else 250_000
    limit = 0.05 if quick else 0.02
    out = []
    for n, x in ON_PARAMS:
        p = OnParams(n=n, x=x)
        name = f"on_chain_tv_n{n:g}_x{x:g}"
        chain = run_chain(patch, p, sweeps, check_seed(seed, name), burn_in=100)
        tv = total_variation(chain.empirical(), on_exact_distribution(patch, p))
        out.append(
            CheckResult(
                name,
                "onmodel",
                tv < limit,
                tv,
                limit,
                details={"proposals": chain.proposals, "acceptance": chain.acceptance_rate},
            )
        )
    flower = _patch("flower7")
    p = OnParams(n=1.5, x=0.6)
    gap = max(
        abs(tree_loop_weight(c, p) - on_log_weight(c, p)) for c in all_colorings(flower)
    )
    out.append(CheckResult("tree_loop_weight", "onmodel", gap < 1e-9, gap, 1e-9))
    xc = critical_x(1.0)
    out.append(
        CheckResult(
            "critical_x_n1", "onmodel", math.isclose(xc, 3**-0.5), xc, 3**-0.5
        )
    )
    return out


# -------------------------
# Stochastic processes
# -------------------------


def _bessel(seed: int, quick: bool) -> List[CheckResult]:
    paths = 2_000 if quick else 10_000
    dt, T = 1e-3, 1.0
    out = []
    b = bessel_batch(
        BesselParams(delta=1.0), dt, T, paths, check_seed(seed, "bessel_ks"), "direct", record=False
    )
    ks = stats.kstest(b.final, stats.halfnorm(scale=math.sqrt(T)).cdf)
    out.append(CheckResult("bessel_delta1_ks", "stochastic", ks.pvalue > 0.01, ks.pvalue, 0.01))
    for delta in (1.0, 5.0 / 3.0, 2.0, 3.0):
        name = f"besq_mean_delta{delta:.3g}"
        # delta = 1 runs the direct scheme: reflected Brownian motion, exact in law
        scheme = "direct" if delta == 1 else "besq"
        x = bessel_batch(
            BesselParams(delta=delta), dt, T, paths, check_seed(seed, name), scheme, record=False
        ).final
        z = x * x
        se = float(z.std(ddof=1) / math.sqrt(paths))
        err = abs(float(z.mean()) - delta * T)
        out.append(
            CheckResult(name, "stochastic", err < 3 * se, err, 3 * se, {"mean": float(z.mean())})
        )
    return out


EPS_LADDER = (0.1, 0.05, 0.025)
CONVERGENCE_KR = (6.0, 2.0)


def _eps_limits(seed: int, quick: bool) -> List[CheckResult]:
    paths = 500 if quick else 2_000
    dt, T = 1e-4, 1.0
    stats_by_delta: Dict[float, Dict[str, List[float]]] = {}
    for delta in (0.5, 1.5, 5.0 / 3.0, 3.0):
        rows: Dict[str, List[float]] = {"jumps": [], "squares": [], "upcrossings": []}
        shared = check_seed(seed, f"eps_limits_{delta:.3g}")
        for eps in EPS_LADDER:
            b = eps_bessel_batch(
                BesselParams(delta=delta, epsilon=eps), dt, T, paths, shared, record=False
            )
            rows["jumps"].append(float(np.mean(b.final_jumps)))
            rows["squares"].append(float(np.mean(b.jump_square_sum)))
            rows["upcrossings"].append(eps * float(np.mean(b.upcrossings)))
        stats_by_delta[delta] = rows

    def result(name: str, values: List[float], decreasing: bool) -> CheckResult:
        return CheckResult(
            name, "stochastic", _strictly(values, decreasing), details={"values": values}
        )

    return [
        result("eps_jumps_vanish_delta3", stats_by_delta[3.0]["jumps"], True),
        result("eps_jumps_grow_delta0.5", stats_by_delta[0.5]["jumps"], False),
        result("eps_squares_vanish_delta0.5", stats_by_delta[0.5]["squares"], True),
        result("eps_squares_vanish_delta1.5", stats_by_delta[1.5]["squares"], True),
        result("eps_upcrossings_delta5/3", stats_by_delta[5.0 / 3.0]["upcrossings"], True),
    ]


STABLE_CASES = ((0.5, 1.0, 0.0), (1.0, 0.0, 0.0), (1.5, 0.7, 0.0), (2.0, 0.0, 0.0))


def _stable(seed: int, quick: bool) -> List[CheckResult]:
    samples = 20_000 if quick else 100_000
    tol = 0.05 if quick else 0.02
    out = []
    for alpha, beta, mu in STABLE_CASES:
        name = f"stable_cf_a{alpha:g}_b{beta:g}"
        r = stable.stable_check(
            stable.StableParams(alpha=alpha, beta=beta, mu=mu),
            samples,
            check_seed(seed, name),
            tol,
        )
        out.append(CheckResult(name, "stochastic", r.passed, r.sup_cf_error, tol, r.to_dict()))
        if alpha == 0.5 and beta == 1.0:
            out.append(
                CheckResult(
                    "stable_positive_support",
                    "stochastic",
                    r.positive_fraction == 1.0,
                    r.positive_fraction,
                    1.0,
                )
            )
    return out


# -------------------------
# Loewner evolution
# -------------------------


def _loewner_oracles(seed: int, quick: bool) -> List[CheckResult]:
    dt = 1e-4
    d = loewner.constant_driver(0.0, dt, 1.0)
    tip = loewner.chordal_trace(d, stride=d.steps).points[-1]
    rel = abs(tip - 2j) / 2.0
    swallow = loewner.chordal_forward(d, 1j).swallow_time
    swallow_err = math.inf if swallow is None else abs(swallow - 0.25)
    radial = loewner.sle_driver(6.0, "radial", 1e-3, 1.0, check_seed(seed, "radial_log_der"))
    log_der = loewner.radial_forward(radial, 0j).log_derivative
    log_err = math.inf if log_der is None else abs(float(log_der[-1]) - 1.0)
    return [
        CheckResult("vertical_slit_tip", "loewner", rel < 1e-3, rel, 1e-3),
        CheckResult("slit_swallow_time", "loewner", swallow_err < 1e-3, swallow_err, 1e-3),
        CheckResult("radial_log_derivative", "loewner", log_err < 1e-3, log_err, 1e-3),
    ]


def _kr_driver(seed: int, quick: bool) -> List[CheckResult]:
    spots = {(6.0, 0.0): 5.0 / 3.0, (4.0, -2.0): 1.0, (8.0, 2.0): 2.0}
    got = {f"{k}": loewner.delta_of(*k) for k in spots}
    delta_ok = all(math.isclose(loewner.delta_of(*k), v) for k, v in spots.items())
    ratios = {}
    for kappa, rho in ((2.0, -4.0), (6.0, -3.0), (3.0, -5.5)):
        w, o = loewner.jump_matrix(kappa, rho)
        ratios[f"{(kappa, rho)}"] = (o / w, -2.0 / rho)
    ratio_ok = all(math.isclose(a, b) for a, b in ratios.values())

    paths = 4 if quick else 12
    dt, T = 1e-4, 1.0
    n = int(round(T / dt))
    rng = np.random.default_rng(check_seed(seed, "eps_driver_convergence"))
    dist = np.zeros(len(EPS_LADDER))
    for _ in range(paths):
        noise = rng.standard_normal(n) * math.sqrt(dt)
        exact = loewner.sle_kr_driver(*CONVERGENCE_KR, dt=dt, T=T, noise=noise)
        for i, eps in enumerate(EPS_LADDER):
            approx = loewner.sle_kr_driver(
                *CONVERGENCE_KR, variant="eps", epsilon=eps, dt=dt, T=T, noise=noise
            )
            dist[i] += float(np.max(np.abs(approx.W - exact.W))) / paths
    values = dist.tolist()
    return [
        CheckResult("delta_spot_values", "loewner", delta_ok, details={"delta": got}),
        CheckResult("jump_ratio", "loewner", ratio_ok, details={"ratios": ratios}),
        CheckResult(
            "eps_driver_convergence",
            "loewner",
            _strictly(values, decreasing=True) and min(values) > 1e-9,
            details={
                "kappa_rho": list(CONVERGENCE_KR),
                "epsilon": list(EPS_LADDER),
                "mean_sup_distance": values,
            },
        ),
    ]


def _angle_drift(seed: int, quick: bool) -> List[CheckResult]:
    kappa = 6.0
    T = 5.0 if quick else 20.0
    a = loewner.lifted_angle_batch(
        kappa, kappa - 6.0, 1.0, 1e-2, 1e-4, T, 1, check_seed(seed, "angle_drift"), record=True
    )
    slope, se = loewner.drift_regression(a.theta[0], 1e-4)  # type: ignore[index]
    target = (kappa - 4.0) / 2.0
    err = abs(slope - target)
    return [
        CheckResult(
            "angle_drift", "loewner", err < 3 * se, err, 3 * se, {"slope": slope, "se": se}
        )
    ]


# -------------------------
# CLE
# -------------------------


def _cle_radius(seed: int, quick: bool, jobs: int = 1) -> List[CheckResult]:
    count = 2_000 if quick else 10_000
    dt = 1e-3 if quick else 1e-4
    tol = 0.05 if quick else 0.02
    t = cle.conformal_radius_sample(
        4.0, 0.0, 1e-3, dt, count, check_seed(seed, "cle_radius_kappa4"), jobs=jobs
    )
    done = t[np.isfinite(t)]
    rel = abs(float(done.mean()) / math.pi**2 - 1.0)
    ks = stats.kstest(done, cle.reflected_exit_cdf)
    details = {"mean": float(done.mean()), "censored": int(count - len(done)), "dt": dt}
    results = [
        CheckResult("cle_radius_mean_kappa4", "cle", rel < tol, rel, tol, details),
        CheckResult("cle_radius_law_kappa4", "cle", ks.pvalue > 0.01, ks.pvalue, 0.01),
    ]
    if quick:
        return results
    # Euler bias is O(sqrt(dt)): quartering dt halves it
    coarse = cle.conformal_radius_sample(
        4.0, 0.0, 1e-3, 4 * dt, count, check_seed(seed, "cle_radius_coarse"), jobs=jobs
    )
    m_coarse = float(np.nanmean(coarse))
    limit = 2.0 * float(done.mean()) - m_coarse
    rel0 = abs(limit / math.pi**2 - 1.0)
    results.append(
        CheckResult(
            "cle_radius_dt_extrapolation", "cle", rel0 < 0.05, rel0, 0.05,
            {"dt": [4 * dt, dt], "mean": [m_coarse, float(done.mean())], "extrapolated": limit},
        )
    )
    return results


def _cle_renewal(seed: int, quick: bool, jobs: int = 1) -> List[CheckResult]:
    count = 2_000 if quick else 10_000
    dt = 1e-3 if quick else 1e-4
    gaps = cle.nested_radius_batch(
        6.0, 1.0, 1e-3, dt, 2, count, check_seed(seed, "cle_renewal_kappa6"), jobs=jobs
    )
    both = gaps[np.all(np.isfinite(gaps), axis=1)]
    ks = stats.ks_2samp(both[:, 0], both[:, 1])
    r = float(np.corrcoef(both[:, 0], both[:, 1])[0, 1])
    bound = 3.0 / math.sqrt(len(both))
    return [
        CheckResult("renewal_gap_law", "cle", ks.pvalue > 0.01, ks.pvalue, 0.01),
        CheckResult("renewal_gap_correlation", "cle", abs(r) < bound, abs(r), bound),
    ]


def _cle_trend(seed: int, quick: bool, jobs: int = 1) -> List[CheckResult]:
    count = 500 if quick else 2_000
    dt = 1e-3 if quick else 1e-4
    shared = check_seed(seed, "kappa_trend")
    means = []
    for kappa in (3.2, 3.0, 2.8):
        t = cle.conformal_radius_sample(kappa, 1.0, 1e-3, dt, count, shared, jobs=jobs)
        means.append(float(np.nanmean(t)))
    batch = loewner.chordal_kr_batch(
        2.7, 2.7 - 6.0, paths=500 if quick else 2_000, dt=1e-3, T=1.0,
        seed=check_seed(seed, "variance_rate"),
    )
    rate, se = loewner.variance_rate(batch)
    rel = abs(rate / 6.0 - 1.0)
    return [
        CheckResult(
            "radius_mean_trend", "cle", _strictly(means, decreasing=False),
            details={"kappa": [3.2, 3.0, 2.8], "mean_T": means},
        ),
        CheckResult(
            "variance_rate_kappa2.7", "cle", rel < 0.1, rel, 0.1, {"rate": rate, "se": se}
        ),
    ]


# -------------------------
# Exploratory
# -------------------------


def _exploratory(seed: int, quick: bool) -> List[CheckResult]:
    d = loewner.discrete_driver_check(
        side=10 if quick else 20,
        samples=20 if quick else 40,
        seed=check_seed(seed, "discrete_driver"),
    )
    inv = cle.target_invariance_check(
        6.0, 0j, 0.5 + 0j, 1e-2, 1e-3, 50 if quick else 200, check_seed(seed, "target")
    )
    ilt = stable.inverse_local_time_check(
        1.0, seed=check_seed(seed, "inverse_local_time"), paths=50 if quick else 200
    )
    return [
        CheckResult(
            "discrete_driver_linearity", "exploratory", d.passed, d.r_squared, 0.9,
            d.to_dict(), gating=False,
        ),
        CheckResult(
            "target_invariance", "exploratory", inv.passed, inv.ks_pvalue, inv.alpha,
            inv.to_dict(), gating=False,
        ),
        CheckResult(
            "inverse_local_time", "exploratory", ilt.passed, ilt.tail_exponent, ilt.alpha,
            ilt.to_dict(), gating=False,
        ),
    ]


CheckFn = Callable[..., List[CheckResult]]

SUITE_CHECKS: Dict[str, List[CheckFn]] = {
    "discrete": [_bijection, _loop_tree_edges, _boundary_paths, _heights],
    "onmodel": [_on_chain],
    "stochastic": [_bessel, _eps_limits, _stable],
    "loewner": [_loewner_oracles, _kr_driver, _angle_drift],
    "cle": [_cle_radius, _cle_renewal, _cle_trend],
    "exploratory": [_exploratory],
}
_PARALLEL = {_cle_radius, _cle_renewal, _cle_trend}


def resolve_suites(suite: str) -> List[str]:
    if suite == "all":
        return list(SUITES)
    if suite not in SUITES:
        raise ValueError(f"Unknown suite '{suite}'. Use one of {SUITES + ('all',)}")
    return [suite]


def run_suite(
    suite: str,
    seed: int = 0,
    quick: bool = False,
    jobs: int = 1,
    logger: Optional[RunLogger] = None,
) -> SuiteReport:
    """Run ``suite`` (or ``all``) and log every check when a logger is given."""
    names = resolve_suites(suite)
    report = SuiteReport(suites=names, seed=seed, quick=quick)
    for name in names:
        for fn in SUITE_CHECKS[name]:
            start = time.perf_counter()
            results = fn(seed, quick, jobs) if fn in _PARALLEL else fn(seed, quick)
            elapsed = time.perf_counter() - start
            for r in results:
                r.seconds = elapsed / len(results)
                report.checks.append(r)
                if logger:
                    logger.log_check(r.name, r.passed, r.statistic, r.threshold, r.details)
    if logger:
        logger.log(
            "verify",
            {
                "suites": names,
                "quick": quick,
                "passed": report.passed,
                "failures": [c.name for c in report.failures],
            },
        )
    return report


__all__ = [
    "SUITES",
    "CheckResult",
    "SuiteReport",
    "check_seed",
    "resolve_suites",
    "run_suite",
]
