"""Run the acceptance suites.

Exit codes:
    0 = every gating check passed
    1 = at least one gating check failed
    2 = usage error
"""

from typing import Optional

import click

from sletree.cli._helpers import common_options, get_logger, output_json, seed_option, start_run
from sletree.core.verification import SUITES, run_suite


@click.command("verify")
@click.option(
    "--suite",
    type=click.Choice(SUITES + ("all",)),
    default="all",
    show_default=True,
    help="Which suite to run",
)
@click.option("--quick", is_flag=True, help="Smaller samples and wider tolerances")
@click.option("--jobs", type=click.IntRange(1), default=1, show_default=True)
@seed_option
@common_options
@click.pass_context
def verify(
    ctx: click.Context,
    suite: str,
    quick: bool,
    jobs: int,
    seed: Optional[int],
    as_json: bool,
) -> None:
    """Run acceptance checks and report pass/fail per check."""
    seed = start_run(ctx, seed, suite=suite, quick=quick)
    report = run_suite(suite, seed, quick, jobs, get_logger(ctx))
    if as_json:
        output_json(report.to_dict())
    else:
        for c in report.checks:
            mark = "PASS" if c.passed else "FAIL"
            note = "" if c.gating else " (exploratory)"
            stat = "" if c.statistic is None else f" stat={c.statistic:.4g}"
            limit = "" if c.threshold is None else f" limit={c.threshold:.4g}"
            click.echo(f"[{mark}] {c.suite}/{c.name}{stat}{limit}{note} ({c.seconds:.1f}s)")
        gating = [c for c in report.checks if c.gating]
        passed = sum(1 for c in gating if c.passed)
        click.echo(f"{passed}/{len(gating)} gating checks passed")
    if not report.passed:
        ctx.exit(1)
