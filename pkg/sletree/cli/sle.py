"""CLI commands for Loewner traces, SLE_kappa(rho) drivers and CLE statistics."""

import math
from pathlib import Path
from typing import Any, Dict, Optional

import click
import numpy as np
from scipy import stats

from sletree.cli._helpers import (
    domain_errors,
    emit,
    get_logger,
    out_option,
    output_json,
    seed_option,
    start_run,
)
from sletree.core.artifacts import csv_text, loop_arcs_svg, trace_svg
from sletree.core.cle import (
    DEFAULT_T_MAX,
    cle_loop_arcs,
    conformal_radius_sample,
    reflected_exit_cdf,
)
from sletree.core.loewner import (
    MODES,
    VARIANTS,
    chordal_trace,
    radial_trace,
    sle_driver,
    sle_kr_driver,
)

mode_option = click.option(
    "--mode", type=click.Choice(MODES), default="chordal", show_default=True
)


def _cle_beta(kappa: float, beta: Optional[float]) -> float:
    if beta is not None:
        return beta
    return 0.0 if kappa == 4 else 1.0


@click.command("sle-trace-svg")
@click.option("--kappa", type=float, required=True)
@mode_option
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--T", "T", type=float, default=1.0, show_default=True)
@click.option("--stride", type=click.IntRange(1), default=1, show_default=True)
@seed_option
@out_option
@click.pass_context
def sle_trace_svg(
    ctx: click.Context,
    kappa: float,
    mode: str,
    dt: float,
    T: float,
    stride: int,
    seed: Optional[int],
    out: Optional[Path],
) -> None:
    """Render an SLE_kappa trace driven by sqrt(kappa) times Brownian motion."""
    seed = start_run(ctx, seed, kappa=kappa, mode=mode, dt=dt, T=T)
    with domain_errors(ctx):
        d = sle_driver(kappa, mode, dt, T, seed)
        trace = chordal_trace(d, stride) if mode == "chordal" else radial_trace(d, stride)
    emit(ctx, trace_svg(trace.points, mode, seed), out, "svg")


@click.command("slekr-driver-csv")
@click.option("--kappa", type=float, required=True)
@click.option("--rho", type=float, required=True)
@mode_option
@click.option("--variant", type=click.Choice(VARIANTS), default="exact", show_default=True)
@click.option("--eps", "epsilon", type=float, default=None, help="Jump scale (eps variant)")
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--mu", type=float, default=0.0, show_default=True)
@click.option("--x0", type=float, default=0.0, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--T", "T", type=float, default=1.0, show_default=True)
@seed_option
@out_option
@click.pass_context
def slekr_driver_csv(
    ctx: click.Context,
    kappa: float,
    rho: float,
    mode: str,
    variant: str,
    epsilon: Optional[float],
    beta: float,
    mu: float,
    x0: float,
    dt: float,
    T: float,
    seed: Optional[int],
    out: Optional[Path],
) -> None:
    """SLE_kappa(rho) driving pair (W, O) on the time grid."""
    params = dict(kappa=kappa, rho=rho, mode=mode, variant=variant, eps=epsilon, beta=beta)
    seed = start_run(ctx, seed, mu=mu, x0=x0, dt=dt, T=T, **params)
    with domain_errors(ctx):
        d = sle_kr_driver(kappa, rho, mode, variant, epsilon, beta, mu, x0, dt, T, seed)
    if mode == "chordal":
        header = ["t", "W", "O"]
        rows: Any = zip(d.times, d.W, d.O)  # type: ignore[arg-type]
    else:
        header = ["t", "arg_W", "arg_O", "theta"]
        rows = zip(d.times, np.angle(d.W), np.angle(d.O), d.hat_o)  # type: ignore[arg-type]
    text = csv_text(
        "slekr-driver-csv", seed, header, rows, jumps=len(d.jump_events), dt=dt, **params
    )
    emit(ctx, text, out, "csv")


@click.command("cle-radius-hist")
@click.option("--kappa", type=float, required=True, help="8/3 < kappa < 8")
@click.option("--beta", type=float, default=None, help="Default: 0 at kappa = 4, else 1")
@click.option("--eps", "epsilon", type=float, default=1e-3, show_default=True)
@click.option("--dt", type=float, default=1e-4, show_default=True)
@click.option("--n", "count", type=click.IntRange(1), default=10_000, show_default=True)
@click.option("--bins", type=click.IntRange(1), default=50, show_default=True)
@click.option("--t-max", "t_max", type=float, default=DEFAULT_T_MAX, show_default=True)
@seed_option
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Histogram CSV (bin edges and counts)",
)
@click.option("--jobs", type=click.IntRange(1), default=1, show_default=True)
@click.pass_context
def cle_radius_hist(
    ctx: click.Context,
    kappa: float,
    beta: Optional[float],
    epsilon: float,
    dt: float,
    count: int,
    bins: int,
    t_max: float,
    seed: Optional[int],
    out: Optional[Path],
    jobs: int,
) -> None:
    """Law of -log conformal radius of the first CLE loop around the origin.

    Prints summary statistics as JSON; at kappa = 4 they include the
    comparison with the reflected Brownian exit law (mean pi**2).
    """
    beta = _cle_beta(kappa, beta)
    seed = start_run(ctx, seed, kappa=kappa, beta=beta, eps=epsilon, dt=dt, n=count)
    with domain_errors(ctx, as_json=True):
        t = conformal_radius_sample(kappa, beta, epsilon, dt, count, seed, t_max, jobs)
    done = t[np.isfinite(t)]
    logger = get_logger(ctx)
    if logger:
        logger.log_sample("conformal_radius", count, censored=int(count - len(done)))

    doc: Dict[str, Any] = {
        "kappa": kappa,
        "beta": beta,
        "epsilon": epsilon,
        "dt": dt,
        "n": count,
        "censored": int(count - len(done)),
        "mean": float(done.mean()) if len(done) else None,
        "variance": float(done.var(ddof=1)) if len(done) > 1 else None,
    }
    if kappa == 4 and len(done):
        ks = stats.kstest(done, reflected_exit_cdf)
        doc["oracle_mean"] = math.pi**2
        doc["relative_error"] = abs(doc["mean"] / math.pi**2 - 1.0)
        doc["ks_statistic"] = float(ks.statistic)
        doc["ks_pvalue"] = float(ks.pvalue)
    if out is not None:
        counts, edges = np.histogram(done, bins=bins)
        rows = zip(edges[:-1], edges[1:], counts)
        text = csv_text(
            "cle-radius-hist", seed, ["left", "right", "count"], rows, kappa=kappa, n=count
        )
        emit(ctx, text, out, "csv")
    output_json(doc, seed)


@click.command("cle-loops-svg")
@click.option("--kappa", type=float, required=True, help="8/3 < kappa < 8")
@click.option("--beta", type=float, default=None, help="Default: 0 at kappa = 4, else 1")
@click.option("--eps", "epsilon", type=float, default=1e-3, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--j-max", "j_max", type=click.IntRange(1), default=3, show_default=True)
@click.option("--stride", type=click.IntRange(1), default=1, show_default=True)
@seed_option
@out_option
@click.pass_context
def cle_loops_svg(
    ctx: click.Context,
    kappa: float,
    beta: Optional[float],
    epsilon: float,
    dt: float,
    j_max: int,
    stride: int,
    seed: Optional[int],
    out: Optional[Path],
) -> None:
    """Render the traced arcs of the first nested loops around the origin."""
    beta = _cle_beta(kappa, beta)
    seed = start_run(ctx, seed, kappa=kappa, beta=beta, eps=epsilon, dt=dt, j_max=j_max)
    with domain_errors(ctx):
        arcs = cle_loop_arcs(kappa, beta, epsilon, dt, j_max, seed, stride=stride)
    emit(ctx, loop_arcs_svg(arcs, seed), out, "svg")
