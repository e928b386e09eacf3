"""sletree CLI: exploration trees, Loewner chains and CLE statistics."""

import json
from pathlib import Path
from typing import Optional

import click

from sletree.cli.lattice import (
    boundary_path,
    heights_csv,
    on_exact,
    on_sample,
    patch_info,
    tree_svg_cmd,
)
from sletree.cli.processes import bessel_csv, eps_bessel_report, stable_check_cmd
from sletree.cli.sle import cle_loops_svg, cle_radius_hist, sle_trace_svg, slekr_driver_csv
from sletree.cli.verify import verify
from sletree.core.config import ConfigError, load_run_file
from sletree.core.observability import RunLogger


@click.group()
@click.option(
    "--log-db",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Record the run in this SQLite log database",
)
@click.option(
    "--config",
    "config_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="YAML run file whose entries prefill command options",
)
@click.pass_context
def cli(ctx: click.Context, log_db: Optional[Path], config_file: Optional[Path]) -> None:
    """sletree: exploration trees, Loewner chains and conformal loop ensembles."""
    ctx.ensure_object(dict)
    ctx.obj["logger"] = RunLogger(log_db) if log_db is not None else None
    if config_file is not None:
        try:
            ctx.default_map = load_run_file(config_file)
        except ConfigError as e:
            raise click.UsageError(str(e), ctx=ctx) from e


# Register commands
cli.add_command(patch_info)
cli.add_command(on_sample)
cli.add_command(on_exact)
cli.add_command(tree_svg_cmd)
cli.add_command(heights_csv)
cli.add_command(boundary_path)
cli.add_command(bessel_csv)
cli.add_command(eps_bessel_report)
cli.add_command(stable_check_cmd)
cli.add_command(sle_trace_svg)
cli.add_command(slekr_driver_csv)
cli.add_command(cle_radius_hist)
cli.add_command(cle_loops_svg)
cli.add_command(verify)


@cli.group("log")
def log_group() -> None:
    """Inspect run logs."""


@log_group.command("summary")
@click.option(
    "--db",
    "db_path",
    type=click.Path(path_type=Path),
    required=True,
    help="Path to the run log SQLite database",
)
@click.option(
    "--session-id",
    default=None,
    help="Optional session id. Defaults to the latest session in the database.",
)
@click.option(
    "--json",
    "as_json",
    is_flag=True,
    help="Print summary as JSON.",
)
def log_summary(db_path: Path, session_id: Optional[str], as_json: bool) -> None:
    """Show high-level stats for a logged session."""
    db_path = db_path.resolve()
    if not db_path.exists():
        raise click.ClickException(f"Log database does not exist: {db_path}")

    logger = RunLogger(db_path)
    summary = logger.get_session_summary(session_id=session_id)

    if as_json:
        click.echo(json.dumps(summary, indent=2, sort_keys=True))
        return

    click.echo(f"Session: {summary['session_id']}")
    click.echo(f"Total logs: {summary['total_logs']}")
    click.echo(f"Errors: {summary['error_count']}")

    click.echo("Phase counts:")
    if summary["phase_counts"]:
        for phase, count in sorted(summary["phase_counts"].items()):
            click.echo(f"  - {phase}: {count}")
    else:
        click.echo("  - (none)")

    checks = summary["check_counts"]
    click.echo(f"Checks: {checks['passed']} passed, {checks['failed']} failed")


def run(argv=None) -> int:
    """Invoke the CLI with ``argv`` and return its exit code instead of exiting."""
    try:
        rv = cli.main(args=argv, prog_name="sletree", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    cli()
