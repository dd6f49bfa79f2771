import importlib
import logging
import sqlite3
import sys
from typing import Optional

import click

from cgur.commands import AppContext
from cgur.config import load_config
from cgur.errors import CoarseGrainError, InternalInconsistency

log = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INCONSISTENT = 2


class UncertaintyCLI(click.Group):
    """Click group that maps every failure onto exit codes 1 and 2."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else EXIT_OK
        except click.ClickException as e:
            e.show()
            code = EXIT_FAILURE if isinstance(e, click.UsageError) else e.exit_code
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_FAILURE
        except InternalInconsistency as e:
            click.echo(f"Error: {e}", err=True)
            code = EXIT_INCONSISTENT
        except (CoarseGrainError, ValueError, OSError, sqlite3.Error) as e:
            click.echo(f"Error: {e}", err=True)
            code = EXIT_FAILURE

        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=UncertaintyCLI)
@click.option("-v", "--verbose", is_flag=True, help="Debug logging on stderr.")
@click.pass_context
def cli(ctx: click.Context, verbose: bool):
    """Coarse-grained uncertainty relations: reports, sweeps and sampling studies."""
    try:
        cfg = load_config()
    except RuntimeError as e:
        raise click.ClickException(str(e)) from None

    logging.basicConfig(
        level=logging.DEBUG if verbose else cfg.log_level,
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )
    ctx.obj = AppContext(cfg)


def load_commands(group: click.Group) -> None:
    importlib.import_module("cgur.commands.report").setup(group)

    for ext in (
        "cgur.commands.figures",
        "cgur.commands.violation",
        "cgur.commands.sampling",
        "cgur.commands.history",
    ):
        try:
            importlib.import_module(ext).setup(group)
        except Exception as e:
            log.warning("Skipping %s: %r", ext, e)


load_commands(cli)


def main(argv: Optional[list[str]] = None) -> int:
    return cli.main(args=argv, prog_name="cgur", standalone_mode=False)


if __name__ == "__main__":
    sys.exit(main())
