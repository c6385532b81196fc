from __future__ import annotations

from pathlib import Path

import click

import group_kstab.cli as cli_facade


@click.command()
@click.argument(
    "problem_file", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option("--tol", type=float, help="Moment residual tolerance (relative to max(1, V))")
@click.option("--max-iter", type=click.IntRange(min=1), help="Newton iteration cap")
@click.option("--quad-order", type=click.IntRange(min=1), help="Quadrature order")
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the report to this file instead of stdout",
)
def soliton(
    problem_file: Path,
    tol: float | None,
    max_iter: int | None,
    quad_order: int | None,
    out: Path | None,
) -> None:
    """Solve for the Kähler–Ricci soliton vector field and test bar_X."""
    from group_kstab.errors import KStabError
    from group_kstab.problem import load_problem

    console = cli_facade.stderr_console()
    try:
        problem = load_problem(problem_file)
        settings = cli_facade.resolve_settings(
            problem,
            {"soliton_tol": tol, "newton_max_iter": max_iter, "quad_order": quad_order},
        )
        report = cli_facade.run_problem(
            problem, settings, analyses=("soliton",), console=console
        )
    except KStabError as e:
        cli_facade.fail(console, e)

    section = report.sections.get("soliton") or {}
    verdict = section.get("verdict")
    if verdict is not None:
        field_ = section["field"]
        console.print(
            f"[bold]{problem.name}:[/bold] c = {field_['c']}, "
            f"{field_['iterations']} Newton step(s), verdict {verdict['value']}"
        )
    cli_facade.finish(report, out, console)
