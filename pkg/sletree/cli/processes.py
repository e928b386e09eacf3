"""CLI commands for Bessel, epsilon-jumping Bessel and stable processes."""

from pathlib import Path
from typing import Optional, Tuple

import click
import numpy as np

from sletree.cli._helpers import (
    domain_errors,
    emit,
    fail_verification,
    get_logger,
    out_option,
    output_json,
    seed_option,
    start_run,
)
from sletree.core.artifacts import csv_text
from sletree.core.stable import StableParams, stable_check
from sletree.core.stochastic import SCHEMES, BesselParams, bessel_path, eps_bessel_batch


@click.command("bessel-csv")
@click.option("--delta", type=float, required=True, help="Dimension delta > 0")
@click.option("--x0", type=float, default=0.0, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--T", "T", type=float, default=1.0, show_default=True)
@seed_option
@click.option("--scheme", type=click.Choice(SCHEMES), default="besq", show_default=True)
@out_option
@click.pass_context
def bessel_csv(
    ctx: click.Context,
    delta: float,
    x0: float,
    dt: float,
    T: float,
    seed: Optional[int],
    scheme: str,
    out: Optional[Path],
) -> None:
    """One Bessel path with its driving Brownian motion and principal-value companion."""
    seed = start_run(ctx, seed, delta=delta, x0=x0, dt=dt, T=T, scheme=scheme)
    with domain_errors(ctx):
        p = bessel_path(BesselParams(delta=delta, x0=x0), dt, T, seed, scheme)
    companion = p.companion if p.companion is not None else np.full(len(p.values), np.nan)
    rows = zip(p.times, p.values, p.brownian, companion)  # type: ignore[arg-type]
    text = csv_text(
        "bessel-csv",
        seed,
        ["t", "X", "B", "Y"],
        rows,
        delta=delta,
        x0=x0,
        dt=dt,
        T=T,
        scheme=scheme,
    )
    emit(ctx, text, out, "csv")


@click.command("eps-bessel-report")
@click.option("--delta", type=float, required=True)
@click.option(
    "--eps",
    "epsilons",
    type=float,
    multiple=True,
    default=(0.1, 0.05, 0.025),
    show_default=True,
    help="Jump size (repeatable)",
)
@click.option("--paths", type=click.IntRange(1), default=2000, show_default=True)
@click.option("--x0", type=float, default=0.0, show_default=True)
@click.option("--dt", type=float, default=1e-4, show_default=True)
@click.option("--T", "T", type=float, default=1.0, show_default=True)
@seed_option
@click.pass_context
def eps_bessel_report(
    ctx: click.Context,
    delta: float,
    epsilons: Tuple[float, ...],
    paths: int,
    x0: float,
    dt: float,
    T: float,
    seed: Optional[int],
) -> None:
    """Jump statistics of epsilon-jumping Bessel paths as epsilon shrinks.

    Every epsilon reuses the same noise stream.
    """
    seed = start_run(ctx, seed, delta=delta, eps=list(epsilons), paths=paths, dt=dt, T=T)
    rows = []
    with domain_errors(ctx, as_json=True):
        for eps in epsilons:
            b = eps_bessel_batch(
                BesselParams(delta=delta, x0=x0, epsilon=eps), dt, T, paths, seed, record=False
            )
            rows.append(
                {
                    "epsilon": eps,
                    "mean_final": float(np.mean(b.final)),
                    "mean_jumps": float(np.mean(b.final_jumps)),
                    "mean_jump_count": float(np.mean(b.jump_counts)),
                    "mean_square_sum": float(np.mean(b.jump_square_sum)),
                    "eps_upcrossings": eps * float(np.mean(b.upcrossings)),
                    "mean_reference_compensator": float(
                        np.mean(b.reference - x0 - b.final_brownian)  # type: ignore[operator]
                    ),
                }
            )
    logger = get_logger(ctx)
    if logger:
        logger.log_sample("eps_bessel", paths * len(epsilons), delta=delta)
    output_json(
        {"delta": delta, "x0": x0, "dt": dt, "T": T, "paths": paths, "results": rows}, seed
    )


@click.command("stable-check")
@click.option("--alpha", type=float, required=True, help="Index in (0, 2]")
@click.option("--beta", type=float, default=0.0, show_default=True, help="Skewness in [-1, 1]")
@click.option("--mu", type=float, default=0.0, show_default=True)
@click.option("--b", "b", type=float, default=1.0, show_default=True, help="Scale b > 0")
@click.option("--samples", type=click.IntRange(10), default=100_000, show_default=True)
@click.option("--tolerance", type=float, default=0.02, show_default=True)
@seed_option
@click.pass_context
def stable_check_cmd(
    ctx: click.Context,
    alpha: float,
    beta: float,
    mu: float,
    b: float,
    samples: int,
    tolerance: float,
    seed: Optional[int],
) -> None:
    """Compare the stable sampler with the closed-form characteristic function.

    Exits 1 when the sup error on the grid reaches the tolerance.
    """
    seed = start_run(ctx, seed, alpha=alpha, beta=beta, mu=mu, b=b, samples=samples)
    with domain_errors(ctx, as_json=True):
        report = stable_check(StableParams(alpha=alpha, beta=beta, mu=mu, b=b), samples, seed,
                              tolerance)
    logger = get_logger(ctx)
    if logger:
        logger.log_check(
            "stable_cf", report.passed, report.sup_cf_error, tolerance, report.to_dict()
        )
    output_json(report.to_dict(), seed)
    if not report.passed:
        fail_verification(ctx, "stable_cf")
