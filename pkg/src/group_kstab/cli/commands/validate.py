from __future__ import annotations

import sys

from pathlib import Path

import click

import group_kstab.cli as cli_facade


@click.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--report",
    "is_report",
    is_flag=True,
    help="Treat SOURCE as a run report and check it against the report schema",
)
def validate(source: Path, is_report: bool) -> None:
    """Validate a problem file (schema, root data, polytope) or a report."""
    from group_kstab.cli.components import VALIDATE_STAGES
    from group_kstab.cli.context import CliContext
    from group_kstab.cli.runner import run_stages
    from group_kstab.config import (
        CONFIG_PARSE_ERRORS,
        ProblemValidationError,
        load_config_file,
    )
    from group_kstab.errors import KStabError
    from group_kstab.problem import load_problem
    from group_kstab.report import validate_report

    console = cli_facade.stderr_console()

    if is_report:
        try:
            try:
                data = load_config_file(source, "json")
            except CONFIG_PARSE_ERRORS as e:
                raise ProblemValidationError(f"Cannot read report {source}: {e}") from e
            validate_report(data)
        except KStabError as e:
            cli_facade.fail(console, e)
        console.print(f"[green]✓[/green] {source.name} is a valid report")
        return

    try:
        problem = load_problem(source)
        settings = cli_facade.resolve_settings(problem, {})
    except KStabError as e:
        cli_facade.fail(console, e)

    console.print(f"[bold]Validating {problem.name}[/bold]\n")
    ctx = CliContext(console=console, problem=problem, settings=settings)
    result = run_stages(VALIDATE_STAGES, ctx)
    for label, stage_result in result.results:
        if stage_result.error is not None:
            console.print(f"  [red]✗[/red] {label}")
            console.print(f"    [dim]{stage_result.error.tag}: {stage_result.error.message}[/dim]")
        else:
            console.print(f"  [green]✓[/green] {label}")
    for warning in result.warnings:
        console.print(f"  [yellow]![/yellow] {warning}")

    if result.errors:
        sys.exit(result.exit_code)
    console.print(f"\n[green]{problem.name} is valid[/green]")
