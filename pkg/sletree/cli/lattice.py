"""CLI commands on hexagon patches: info, O(n) sampling, trees, heights, boundary paths."""

from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
import numpy as np

from sletree.cli._helpers import (
    common_options,
    domain_errors,
    emit,
    get_logger,
    load_patch,
    out_option,
    output_json,
    parse_bc,
    parse_ids,
    seed_option,
    start_run,
)
from sletree.core.artifacts import csv_text, tree_svg
from sletree.core.config import run_chunks, spawn_seeds
from sletree.core.exploration import (
    boundary_path_from_loops,
    exploration_path,
    exploration_tree,
    height_function,
)
from sletree.core.hexgrid import HexPatch
from sletree.core.loops import AllWhiteOutside, ChordalArc, Coloring, loops_from_coloring
from sletree.core.onmodel import OnParams, on_exact_distribution, run_chain, total_variation

# Largest patch for which on-sample also reports the exact TV distance
TV_FACE_LIMIT = 12


def _faces_option(required: bool = True):
    return click.option(
        "--faces",
        "faces",
        required=required,
        default=None,
        help="Named patch (flower7, 'rhombus 5', ...) or patch file",
    )


faces_option = _faces_option()
root_option = click.option(
    "--root", type=click.IntRange(0), default=0, show_default=True, help="Root boundary position"
)
bc_option = click.option(
    "--bc", default="free", show_default=True, help="Boundary condition: free or arc:a,b"
)


def _coloring(patch: HexPatch, ids: list, bc=None) -> Coloring:
    return Coloring.from_ids(patch, ids, bc)


@click.command("patch-info")
@faces_option
@root_option
@common_options
@click.pass_context
def patch_info(ctx: click.Context, faces: str, root: int, as_json: bool) -> None:
    """Show counts, boundary and root of a patch."""
    with domain_errors(ctx, as_json):
        patch, _ = load_patch(faces, root)
    info = {
        "faces": len(patch.faces),
        "vertices": len(patch.vertices),
        "edges": len(patch.edges),
        "boundary_length": len(patch.boundary_cycle),
        "root": list(patch.root),
        "root_position": patch.root_position,
        "entry_edge": [list(v) for v in patch.entry_edge],
        "degree_two_positions": patch.degree_two_positions(),
        "face_ids": {i: list(f) for i, f in enumerate(patch.sorted_faces)},
    }
    if as_json:
        output_json(info)
        return
    click.echo(f"Faces: {info['faces']}")
    click.echo(f"Vertices: {info['vertices']}")
    click.echo(f"Edges: {info['edges']}")
    click.echo(f"Boundary length: {info['boundary_length']}")
    click.echo(f"Root: {tuple(patch.root)} (position {patch.root_position})")
    click.echo(f"Degree-2 positions: {', '.join(map(str, info['degree_two_positions']))}")


def _chain_task(args: Tuple) -> Dict[str, Any]:
    patch, params, sweeps, rng = args
    r = run_chain(patch, params, sweeps, rng)
    return {
        "visits": r.visits,
        "face_counts": r.face_counts,
        "recorded": r.recorded,
        "proposals": r.proposals,
        "accepted": r.accepted,
        "final": list(r.final.black_ids),
    }


@click.command("on-sample")
@faces_option
@click.option("--n", "n", type=float, required=True, help="Loop fugacity n > 0")
@click.option("--x", "x", type=float, required=True, help="Edge weight x > 0")
@click.option("--sweeps", type=click.IntRange(1), default=1000, show_default=True)
@seed_option
@bc_option
@click.option("--chains", type=click.IntRange(1), default=1, show_default=True)
@click.option("--jobs", type=click.IntRange(1), default=1, show_default=True)
@click.pass_context
def on_sample(
    ctx: click.Context,
    faces: str,
    n: float,
    x: float,
    sweeps: int,
    seed: Optional[int],
    bc: str,
    chains: int,
    jobs: int,
) -> None:
    """Run Metropolis chains for the O(n) loop measure and summarize them as JSON."""
    seed = start_run(ctx, seed, faces=faces, n=n, x=x, sweeps=sweeps, bc=bc, chains=chains)
    with domain_errors(ctx, as_json=True):
        patch, _ = load_patch(faces)
        params = OnParams(n=n, x=x, boundary_condition=parse_bc(bc, patch))
        tasks = [(patch, params, sweeps, g) for g in spawn_seeds(seed, chains)]
        results = run_chunks(_chain_task, tasks, jobs)

    visits: Dict[int, int] = {}
    face_counts = np.zeros(len(patch.faces))
    recorded = proposals = accepted = 0
    for r in results:
        for m, k in r["visits"].items():
            visits[m] = visits.get(m, 0) + k
        face_counts += r["face_counts"]
        recorded += r["recorded"]
        proposals += r["proposals"]
        accepted += r["accepted"]
    logger = get_logger(ctx)
    if logger:
        logger.log_sample("on_chain", proposals, chains=chains, sweeps=sweeps)

    doc: Dict[str, Any] = {
        "faces": faces,
        "n": n,
        "x": x,
        "bc": bc,
        "sweeps": sweeps,
        "chains": chains,
        "proposals": proposals,
        "acceptance_rate": accepted / proposals,
        "marginals": (face_counts / recorded).tolist() if recorded else [],
        "final_black": [r["final"] for r in results],
    }
    if len(patch.faces) <= TV_FACE_LIMIT:
        total = sum(visits.values())
        empirical = {m: k / total for m, k in visits.items()}
        doc["tv_distance"] = total_variation(empirical, on_exact_distribution(patch, params))
    output_json(doc, seed)


@click.command("on-exact")
@faces_option
@click.option("--n", "n", type=float, required=True)
@click.option("--x", "x", type=float, required=True)
@bc_option
@click.pass_context
def on_exact(ctx: click.Context, faces: str, n: float, x: float, bc: str) -> None:
    """Exact O(n) probabilities of every coloring (small patches only)."""
    with domain_errors(ctx, as_json=True):
        patch, _ = load_patch(faces)
        params = OnParams(n=n, x=x, boundary_condition=parse_bc(bc, patch))
        dist = on_exact_distribution(patch, params)
    nf = len(patch.faces)
    rows = [
        {"mask": m, "black": [i for i in range(nf) if m >> i & 1], "p": p}
        for m, p in sorted(dist.items())
    ]
    output_json({"faces": faces, "n": n, "x": x, "bc": bc, "distribution": rows})


@click.command("tree-svg")
@_faces_option(required=False)
@click.option("--black", default=None, help="Comma-separated black face ids")
@click.option(
    "--coloring",
    "coloring_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Patch file with a 'black' line (overrides --faces)",
)
@seed_option
@out_option
@click.pass_context
def tree_svg_cmd(
    ctx: click.Context,
    faces: Optional[str],
    black: Optional[str],
    coloring_file: Optional[Path],
    seed: Optional[int],
    out: Optional[Path],
) -> None:
    """Render a coloring and its exploration tree as SVG.

    Without --black or a coloring file the coloring is drawn uniformly with --seed.
    """
    seed = start_run(ctx, seed, faces=faces, black=black)
    with domain_errors(ctx):
        if coloring_file is not None:
            patch, ids = load_patch(str(coloring_file))
        elif faces is None:
            raise click.UsageError("give --faces or --coloring", ctx=ctx)
        else:
            patch, ids = load_patch(faces)
            ids = parse_ids(black)
            if black is None:
                bits = np.random.default_rng(seed).random(len(patch.faces)) < 0.5
                ids = [i for i, on in enumerate(bits) if on]
        c = _coloring(patch, ids)
        tree = exploration_tree(c)
    emit(ctx, tree_svg(c, tree, seed), out, "svg")


@click.command("heights-csv")
@faces_option
@click.option("--black", default=None, help="Comma-separated black face ids")
@root_option
@out_option
@click.pass_context
def heights_csv(
    ctx: click.Context, faces: str, black: Optional[str], root: int, out: Optional[Path]
) -> None:
    """Height function of a coloring, one row per face."""
    seed = start_run(ctx, None, faces=faces, black=black, root=root)
    with domain_errors(ctx):
        patch, file_ids = load_patch(faces)
        c = _coloring(patch, parse_ids(black) if black is not None else file_ids)
        h = height_function(c, root)
    index = patch.face_index
    rows = [(index[f], f[0], f[1], int(f in c.black), h.values[f]) for f in patch.sorted_faces]
    text = csv_text(
        "heights-csv",
        seed,
        ["face", "q", "r", "black", "height"],
        rows,
        faces=faces.replace(" ", "_"),
        root=root,
    )
    emit(ctx, text, out, "csv")


@click.command("boundary-path")
@faces_option
@click.option("--black", default=None, help="Comma-separated black face ids")
@click.option("--target", type=click.IntRange(0), required=True, help="Target boundary position")
@common_options
@click.pass_context
def boundary_path(
    ctx: click.Context, faces: str, black: Optional[str], target: int, as_json: bool
) -> None:
    """Exploration path to a boundary vertex, spliced from loops and traced directly."""
    with domain_errors(ctx, as_json):
        patch, file_ids = load_patch(faces)
        ids = parse_ids(black) if black is not None else file_ids
        if target >= len(patch.boundary_cycle):
            raise ValueError(f"target must be < {len(patch.boundary_cycle)}, got {target}")
        v = patch.boundary_cycle[target]
        c = _coloring(patch, ids, AllWhiteOutside())
        spliced = boundary_path_from_loops(c, loops_from_coloring(c), v)
        traced = exploration_path(_coloring(patch, ids, ChordalArc(patch.root, v)), v)
    doc = {
        "target": list(v),
        "path": [list(u) for u in spliced],
        "agrees": spliced == traced,
    }
    if as_json:
        output_json(doc)
    else:
        click.echo(" -> ".join(f"({a},{b})" for a, b in spliced))
        click.echo(f"Matches direct exploration: {'yes' if doc['agrees'] else 'no'}")
    if not doc["agrees"]:
        ctx.exit(1)
