"""Shared CLI utilities for sletree commands."""

import re
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, List, Optional, Tuple

import click
from pydantic import ValidationError

from sletree.core.artifacts import atomic_write_text, json_text
from sletree.core.config import ConfigError, RunConfig, resolve_seed
from sletree.core.errors import SletreeError
from sletree.core.hexgrid import HexPatch, build_patch, named_patch, parse_patch_text
from sletree.core.loops import AllWhiteOutside, BoundaryCondition, ChordalArc
from sletree.core.observability import RunLogger
from sletree.core.validation import ErrorCode, error_code_for, error_response


def common_options(func: Any) -> Any:
    """Add ``--json`` to a command."""
    return click.option("--json", "as_json", is_flag=True, help="Output as JSON")(func)


def seed_option(func: Any) -> Any:
    return click.option(
        "--seed",
        type=click.IntRange(0, 2**64 - 1),
        default=None,
        help="Random seed (default: $CLE_SEED, else 0)",
    )(func)


def out_option(func: Any) -> Any:
    return click.option(
        "--out",
        type=click.Path(dir_okay=False, path_type=Path),
        default=None,
        help="Output file (default: stdout)",
    )(func)


def get_logger(ctx: click.Context) -> Optional[RunLogger]:
    obj = ctx.find_root().obj or {}
    return obj.get("logger")


def resolve_run_seed(ctx: click.Context, seed: Optional[int]) -> int:
    """``--seed``, else ``CLE_SEED``, else 0. A malformed ``CLE_SEED`` is a usage error."""
    try:
        return resolve_seed(seed)
    except ConfigError as e:
        raise click.UsageError(str(e), ctx=ctx) from e


def start_run(ctx: click.Context, seed: Optional[int], **params: Any) -> int:
    """Resolve the seed and record the invocation in the run log."""
    resolved = resolve_run_seed(ctx, seed)
    logger = get_logger(ctx)
    if logger:
        config = RunConfig(
            command=ctx.info_name or "",
            seed=resolved,
            out=ctx.params.get("out"),
            jobs=ctx.params.get("jobs", 1),
            params=params,
        )
        logger.log_config(config)
    return resolved


@contextmanager
def domain_errors(ctx: click.Context, as_json: bool = False) -> Iterator[None]:
    """Turn library exceptions into usage errors (exit 2), logging them first.

    With ``as_json`` an ``error_response`` document is printed instead of a
    plain diagnostic.
    """
    try:
        yield
    except (SletreeError, ValidationError, ValueError) as e:
        code = error_code_for(e)
        logger = get_logger(ctx)
        if logger:
            logger.log_error(type(e).__name__, {"message": str(e), "code": code.value})
        if as_json:
            click.echo(json_text(error_response(code, str(e))), nl=False)
            ctx.exit(2)
        raise click.UsageError(str(e), ctx=ctx) from e


def load_patch(spec: str, root: int = 0) -> Tuple[HexPatch, List[int]]:
    """A named patch (``flower7``, ``rhombus 5``, ...) or a patch file.

    Returns the patch and the black face ids listed in the file, if any.
    """
    path = Path(spec)
    if path.is_file():
        faces, black = parse_patch_text(path.read_text(encoding="utf-8"))
    else:
        faces, black = named_patch(spec), []
    return build_patch(faces, root), black


def parse_ids(text: Optional[str]) -> List[int]:
    if not text:
        return []
    try:
        return [int(tok) for tok in re.split(r"[\s,]+", text.strip()) if tok]
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated face ids, got '{text}'") from e


def parse_bc(text: str, patch: HexPatch) -> BoundaryCondition:
    """``free`` or ``arc:a,b`` with ``a`` and ``b`` boundary positions."""
    if text == "free":
        return AllWhiteOutside()
    m = re.fullmatch(r"arc:(\d+),(\d+)", text.strip())
    if not m:
        raise click.BadParameter(f"expected 'free' or 'arc:a,b', got '{text}'")
    cycle = patch.boundary_cycle
    a, b = int(m.group(1)), int(m.group(2))
    if not (a < len(cycle) and b < len(cycle)):
        raise click.BadParameter(f"boundary positions must be < {len(cycle)}, got {a},{b}")
    return ChordalArc(cycle[a], cycle[b])


def emit(ctx: click.Context, content: str, out: Optional[Path], kind: str) -> None:
    """Write ``content`` atomically to ``out`` or print it."""
    if out is None:
        click.echo(content, nl=False)
        return
    size = atomic_write_text(out, content)
    logger = get_logger(ctx)
    if logger:
        logger.log_write(str(out), kind, size)
    click.echo(f"Wrote {out}", err=True)


def output_json(data: Any, seed: Optional[int] = None) -> None:
    """Print sorted JSON to stdout."""
    click.echo(json_text(data, seed), nl=False)


def fail_verification(ctx: click.Context, name: str) -> None:
    logger = get_logger(ctx)
    if logger:
        logger.log_error("VerificationFailed", {"check": name}, ErrorCode.VERIFICATION_FAILED.value)
    ctx.exit(1)
