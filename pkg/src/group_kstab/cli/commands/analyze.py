from __future__ import annotations

from pathlib import Path

import click

import group_kstab.cli as cli_facade

from group_kstab.problem import ANALYSES


@click.command()
@click.argument(
    "problem_file", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option(
    "--analyses",
    help=f"Comma-separated analyses to run (from: {', '.join(ANALYSES)}; default: the problem file's list)",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the report to this file instead of stdout",
)
@click.option("--threads", type=click.IntRange(min=1), help="Worker threads for exact integration")
@click.option("--quad-order", type=click.IntRange(min=1), help="Quadrature order")
def analyze(
    problem_file: Path,
    analyses: str | None,
    out: Path | None,
    threads: int | None,
    quad_order: int | None,
) -> None:
    """Run the analysis pipeline on a problem file and emit a JSON report."""
    from group_kstab.errors import KStabError
    from group_kstab.problem import load_problem

    console = cli_facade.stderr_console()
    try:
        problem = load_problem(problem_file)
        settings = cli_facade.resolve_settings(
            problem, {"threads": threads, "quad_order": quad_order}
        )
        report = cli_facade.run_problem(
            problem,
            settings,
            analyses=cli_facade.parse_csv_option(analyses),
            console=console,
        )
    except KStabError as e:
        cli_facade.fail(console, e)

    cli_facade.finish(report, out, console)
