from typing import Optional

import click

from cgur.commands import AppContext, format_option, pass_app
from cgur.utils import emit, emit_json


@click.command("history")
@click.option("--command", "command_name", default=None, help="Only runs of this command.")
@click.option("--limit", type=click.IntRange(min=1), default=20, show_default=True)
@format_option("csv")
@pass_app
def history(app: AppContext, command_name: Optional[str], limit: int, fmt: str):
    """List archived runs, newest first."""
    runs = app.store.list_runs(command_name, limit)
    rows = [{k: r[k] for k in ("id", "command", "exit_code", "created_at")} for r in runs]
    emit(rows, fmt, ["id", "command", "exit_code", "created_at"])


@click.command("show")
@click.argument("run_id", type=int)
@pass_app
def show(app: AppContext, run_id: int):
    """Print an archived run."""
    run = app.store.get_by_id(run_id)
    if run is None:
        raise click.ClickException(f"no stored run with id {run_id}")
    emit_json(run)


@click.command("forget")
@click.argument("run_id", type=int)
@pass_app
def forget(app: AppContext, run_id: int):
    """Delete an archived run."""
    if not app.store.delete_run(run_id):
        raise click.ClickException(f"no stored run with id {run_id}")
    click.echo(f"Deleted run {run_id}", err=True)


def setup(group: click.Group) -> None:
    group.add_command(history)
    group.add_command(show)
    group.add_command(forget)
