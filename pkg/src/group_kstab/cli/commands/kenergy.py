from __future__ import annotations

import json

from pathlib import Path
from typing import cast

import click

import group_kstab.cli as cli_facade


def _write_trace(path: Path, rows: list[dict[str, float]]) -> None:
    from group_kstab.config import write_file_atomic

    lines = "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)
    write_file_atomic(path, lambda f: f.write(lines))


@click.command()
@click.argument(
    "problem_file", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option(
    "--candidate",
    type=click.Choice(["guillemin", "flat"]),
    default="guillemin",
    show_default=True,
    help="Built-in candidate to evaluate",
)
@click.option(
    "--candidate-file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="JSON or YAML candidate ({base, terms}); overrides --candidate",
)
@click.option("--quad-order", type=click.IntRange(min=1), help="Quadrature order")
@click.option("--wall-margin", type=float, help="Node exclusion margin near Weyl walls")
@click.option("--minimize", is_flag=True, help="Also run the K-energy descent")
@click.option("--degree", type=click.IntRange(min=2), help="Degree of the symmetric basis")
@click.option("--tol", type=float, help="Gradient tolerance for the descent")
@click.option("--max-iter", type=click.IntRange(min=1), help="Descent iteration cap")
@click.option(
    "--allow-improper",
    is_flag=True,
    help="Minimize even when properness is not established",
)
@click.option(
    "--with-soliton",
    is_flag=True,
    help="Solve for the soliton first and report the modified K-energy",
)
@click.option(
    "--trace",
    "trace_path",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the descent trace as JSON lines",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the report to this file instead of stdout",
)
def kenergy(
    problem_file: Path,
    candidate: str,
    candidate_file: Path | None,
    quad_order: int | None,
    wall_margin: float | None,
    minimize: bool,
    degree: int | None,
    tol: float | None,
    max_iter: int | None,
    allow_improper: bool,
    with_soliton: bool,
    trace_path: Path | None,
    out: Path | None,
) -> None:
    """Evaluate the reduced K-energy of a candidate, optionally minimizing it."""
    from group_kstab.cli.context import CandidateKind, KEnergyRequest
    from group_kstab.errors import KStabError
    from group_kstab.problem import load_problem

    console = cli_facade.stderr_console()
    request = KEnergyRequest(
        candidate=cast(CandidateKind, candidate),
        candidate_file=candidate_file,
        minimize=minimize,
        allow_improper=allow_improper,
    )
    analyses = ("soliton", "kenergy") if with_soliton else ("kenergy",)
    try:
        problem = load_problem(problem_file)
        settings = cli_facade.resolve_settings(
            problem,
            {
                "quad_order": quad_order,
                "wall_margin": wall_margin,
                "minimize_degree": degree,
                "minimize_tol": tol,
                "minimize_max_iter": max_iter,
            },
        )
        report = cli_facade.run_problem(
            problem, settings, analyses=analyses, kenergy=request, console=console
        )
    except KStabError as e:
        cli_facade.fail(console, e)

    section = report.sections.get("kenergy") or {}
    minimized = section.get("minimize")
    if trace_path is not None and minimized is not None:
        _write_trace(trace_path, minimized["trace"])
        console.print(f"[green]✓[/green] Trace written to {trace_path}")
    if "value" in section:
        console.print(
            f"[bold]{problem.name}:[/bold] 𝒦 = {section['value']['value']:.12g} "
            f"(± {section['value']['quadrature_error']:.2e})"
        )
    cli_facade.finish(report, out, console)
