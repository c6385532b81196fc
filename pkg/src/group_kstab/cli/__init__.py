"""Command-line interface for group-kstability."""

import logging

from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as get_version

import click

from group_kstab.cli.helpers import (
    fail as fail,
)
from group_kstab.cli.helpers import (
    finish as finish,
)
from group_kstab.cli.helpers import (
    parse_csv_option as parse_csv_option,
)
from group_kstab.cli.helpers import (
    resolve_settings as resolve_settings,
)
from group_kstab.cli.helpers import (
    run_problem as run_problem,
)
from group_kstab.cli.helpers import (
    setup_logging as setup_logging,
)
from group_kstab.cli.helpers import (
    stderr_console as stderr_console,
)

logger = logging.getLogger(__name__)

try:
    __version__ = get_version("group-kstability")
except PackageNotFoundError:
    __version__ = "dev"


def version_callback(ctx: click.Context, param: click.Parameter, value: bool) -> None:
    """Print the package version with the numeric stack it runs on."""
    if not value or ctx.resilient_parsing:
        return

    import numpy
    import scipy

    from rich.console import Console

    console = Console()
    console.print(f"group-kstab, version {__version__}")
    console.print(f"[dim]numpy {numpy.__version__}, scipy {scipy.__version__}[/dim]")
    ctx.exit()


@click.group()
@click.option(
    "--version",
    is_flag=True,
    callback=version_callback,
    expose_value=False,
    is_eager=True,
    help="Show version and exit",
)
@click.option(
    "--verbose", "-v", is_flag=True, help="Log solver progress to stderr"
)
def main(verbose: bool) -> None:
    """group-kstab - Stability criteria for polarized group compactifications."""
    setup_logging(verbose)


def cli_entrypoint() -> None:
    main(complete_var="_GROUP_KSTAB_COMPLETE")


def _register_commands() -> None:
    from group_kstab.cli.commands.analyze import analyze
    from group_kstab.cli.commands.export import export
    from group_kstab.cli.commands.kenergy import kenergy
    from group_kstab.cli.commands.soliton import soliton
    from group_kstab.cli.commands.validate import validate
    from group_kstab.cli.groups.corpus import corpus

    main.add_command(analyze)
    main.add_command(soliton)
    main.add_command(kenergy)
    main.add_command(export)
    main.add_command(validate)
    main.add_command(corpus)


_register_commands()


if __name__ == "__main__":
    main()
