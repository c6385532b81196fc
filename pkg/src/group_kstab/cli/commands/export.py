from __future__ import annotations

import json

from pathlib import Path

import click

import group_kstab.cli as cli_facade

from group_kstab.report import PLOT_SELECTORS


@click.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--what",
    default=",".join(PLOT_SELECTORS[:3]),
    show_default=True,
    help=f"Comma-separated data sets to export (from: {', '.join(PLOT_SELECTORS)})",
)
@click.option(
    "--outdir",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("plot-data"),
    show_default=True,
    help="Directory for the CSV files",
)
def export(source: Path, what: str, outdir: Path) -> None:
    """Export plot data from a report, or from a problem file after running it."""
    from group_kstab.config import ProblemValidationError
    from group_kstab.errors import KStabError
    from group_kstab.problem import parse_problem
    from group_kstab.report import check_selectors, export_plot_data

    console = cli_facade.stderr_console()
    try:
        selectors = check_selectors(cli_facade.parse_csv_option(what) or ())
        try:
            data = json.loads(source.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ProblemValidationError(f"Cannot read {source}: {e}") from e
        if "provenance" not in data:
            problem = parse_problem(data)
            settings = cli_facade.resolve_settings(problem, {})
            data = cli_facade.run_problem(problem, settings, console=console).to_dict()
        written = export_plot_data(data, selectors, outdir)
    except KStabError as e:
        cli_facade.fail(console, e)

    for path in written:
        console.print(f"[green]✓[/green] {path}")
