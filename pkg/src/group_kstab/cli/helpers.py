"""Shared CLI helper functions."""

from __future__ import annotations

import logging
import sys

from collections.abc import Mapping
from pathlib import Path
from typing import TYPE_CHECKING, Any, NoReturn

import click

from rich.console import Console

if TYPE_CHECKING:
    from group_kstab.cli.context import KEnergyRequest
    from group_kstab.config import Settings
    from group_kstab.errors import KStabError
    from group_kstab.kenergy import QuadratureOptions, SmoothCandidate
    from group_kstab.polyint import Polytope
    from group_kstab.problem import ProblemSpec
    from group_kstab.report import RunReport

logger = logging.getLogger(__name__)


def stderr_console() -> Console:
    """Human-facing output; stdout is reserved for JSON."""
    return Console(stderr=True)


def setup_logging(verbose: bool) -> None:
    from rich.logging import RichHandler

    level = logging.DEBUG if verbose else logging.WARNING
    root = logging.getLogger("group_kstab")
    root.handlers = [RichHandler(console=stderr_console(), show_path=False)]
    root.setLevel(level)
    root.propagate = False


def parse_csv_option(value: str | None) -> tuple[str, ...] | None:
    """Split a comma-separated option; None when the option was not given."""
    if value is None:
        return None
    return tuple(part.strip() for part in value.split(",") if part.strip())


def fail(console: Console, error: KStabError) -> NoReturn:
    console.print(f"[red]Error:[/red] {error.tag}: {error.message}")
    sys.exit(error.exit_code)


def resolve_settings(problem: ProblemSpec, overrides: Mapping[str, Any]) -> Settings:
    """Defaults < ~/.group-kstab.yaml < problem options < CLI flags."""
    from group_kstab.config import Settings

    return problem.settings(Settings.load()).merged(overrides, source="command line")


def quadrature_options(settings: Settings) -> QuadratureOptions:
    from group_kstab.kenergy import QuadratureOptions

    return QuadratureOptions(
        order=settings.quad_order,
        grading=settings.facet_grading,
        wall_margin=settings.wall_margin,
        violation_bound=settings.chamber_violation_bound,
    )


def load_candidate(path: Path, polytope: Polytope) -> SmoothCandidate:
    """Read a JSON or YAML candidate file.

    Raises:
        InvalidCandidate: If the file cannot be read or is malformed
    """
    from group_kstab.config import CONFIG_PARSE_ERRORS, load_config_file
    from group_kstab.kenergy import InvalidCandidate, candidate_from_dict

    try:
        data = load_config_file(path)
    except CONFIG_PARSE_ERRORS as e:
        raise InvalidCandidate(f"Cannot read candidate file {path}: {e}") from e
    return candidate_from_dict(data, polytope)


def run_problem(
    problem: ProblemSpec,
    settings: Settings,
    *,
    analyses: tuple[str, ...] | None = None,
    kenergy: KEnergyRequest | None = None,
    console: Console | None = None,
) -> RunReport:
    """Run the stage pipeline for one problem and collect a RunReport."""
    from group_kstab.cli.components import PIPELINE_STAGES
    from group_kstab.cli.context import CliContext, KEnergyRequest
    from group_kstab.cli.runner import run_stages
    from group_kstab.problem import check_analyses
    from group_kstab.report import RunReport
    from group_kstab.utils import worker_threads

    selected = check_analyses(analyses) if analyses is not None else problem.analyses
    ctx = CliContext(
        console=console or stderr_console(),
        problem=problem,
        settings=settings,
        analyses=selected,
        kenergy=kenergy or KEnergyRequest(),
    )
    with worker_threads(settings.threads):
        result = run_stages(PIPELINE_STAGES, ctx)
    logger.debug("Pipeline for %s finished with exit code %d", problem.name, result.exit_code)
    return RunReport(
        problem=problem,
        settings=settings,
        analyses=selected,
        sections=dict(result.sections),
        warnings=list(result.warnings),
        errors=list(result.errors),
        timings=dict(result.timings),
        exit_code=result.exit_code,
    )


def emit_report(report: RunReport, out: Path | None, console: Console) -> None:
    """Write the report to ``out`` or stdout, then print errors and warnings."""
    if out is None:
        click.echo(report.to_json(), nl=False)
    else:
        report.write(out)
        console.print(f"[green]✓[/green] Report written to {out}")
    for warning in report.warnings:
        console.print(f"[yellow]Warning:[/yellow] {warning}")
    for error in report.errors:
        console.print(f"[red]Error:[/red] {error.tag}: {error.message}")


def finish(report: RunReport, out: Path | None, console: Console) -> None:
    """Emit the report unless a validation error aborted the run, then exit."""
    from group_kstab.errors import ValidationError

    aborting = [e for e in report.errors if isinstance(e, ValidationError)]
    if aborting:
        fail(console, aborting[0])
    emit_report(report, out, console)
    if report.exit_code:
        sys.exit(report.exit_code)
