from __future__ import annotations

import sys

from pathlib import Path

import click

import group_kstab.cli as cli_facade


@click.group()
def corpus() -> None:
    """Bundled example problems with expected results."""
    pass


@corpus.command("list")
def corpus_list() -> None:
    """List bundled corpus entries."""
    from rich.console import Console
    from rich.table import Table

    from group_kstab.corpus import corpus_names, expected_report, load_corpus_problem

    console = Console()
    table = Table(title="Corpus", show_header=True)
    table.add_column("Name", style="cyan", no_wrap=True)
    table.add_column("Rank")
    table.add_column("Root data")
    table.add_column("Fixture")
    table.add_column("Description")

    for name in corpus_names():
        problem = load_corpus_problem(name)
        root = problem.cartan_type or ("torus" if not problem.simple_roots else "explicit")
        fixture = "yes" if expected_report(name) is not None else "-"
        table.add_row(name, str(problem.polytope_rank), root, fixture, problem.description)

    console.print(table)


@corpus.command("run")
@click.argument("names", nargs=-1)
@click.option("--check", is_flag=True, help="Compare each report with its expected fixture")
@click.option(
    "--outdir",
    type=click.Path(file_okay=False, path_type=Path),
    help="Write one <name>.json report per entry into this directory",
)
@click.option("--threads", type=click.IntRange(min=1), help="Worker threads for exact integration")
def corpus_run(
    names: tuple[str, ...], check: bool, outdir: Path | None, threads: int | None
) -> None:
    """Run corpus entries (default: all) through the full pipeline."""
    from group_kstab.corpus import (
        compare_expected,
        corpus_names,
        expected_report,
        load_corpus_problem,
    )
    from group_kstab.errors import KStabError

    console = cli_facade.stderr_console()
    selected = names or tuple(corpus_names())
    exit_code = 0
    mismatched = 0

    for name in selected:
        try:
            problem = load_corpus_problem(name)
            settings = cli_facade.resolve_settings(problem, {"threads": threads})
            report = cli_facade.run_problem(problem, settings, console=console)
        except KStabError as e:
            console.print(f"[red]✗[/red] {name}: {e.tag}: {e.message}")
            exit_code = max(exit_code, e.exit_code)
            continue

        exit_code = max(exit_code, report.exit_code)
        if outdir is not None:
            report.write(outdir / f"{name}.json")
        for error in report.errors:
            console.print(f"  [red]Error:[/red] {error.tag}: {error.message}")

        if not check:
            console.print(f"[green]✓[/green] {name}")
            continue
        expected = expected_report(name)
        if expected is None:
            console.print(f"[yellow]-[/yellow] {name} [dim](no fixture)[/dim]")
            continue
        mismatches = compare_expected(report.to_dict(include_timings=False), expected)
        if mismatches:
            mismatched += 1
            console.print(f"[red]✗[/red] {name}")
            for line in mismatches:
                console.print(f"    [dim]{line}[/dim]")
        else:
            console.print(f"[green]✓[/green] {name} matches its fixture")

    if mismatched:
        console.print(f"[red]{mismatched} corpus entr{'y' if mismatched == 1 else 'ies'} differ from fixtures[/red]")
        sys.exit(1)
    if exit_code:
        sys.exit(exit_code)
