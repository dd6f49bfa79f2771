from typing import Optional

import click

from cgur.commands import AppContext, format_option, hbar_option, pass_app, state_option, store_option
from cgur.experiments import find_false_violation
from cgur.utils import emit_csv, emit_json


@click.command("false-violation")
@state_option()
@hbar_option
@format_option("json")
@store_option
@pass_app
def false_violation(app: AppContext, state_path: str, hbar: Optional[float], fmt: str, store: Optional[bool]):
    """Find bin widths where discrete variances alone appear to break the variance relation."""
    state = app.load_state(state_path, hbar)
    witness = find_false_violation(state, app.cfg.mass_tol, app.cfg.quadrature)
    payload = witness.to_dict()
    if fmt == "json":
        emit_json(payload)
    else:
        emit_csv([payload])
    app.record("false-violation", payload, store, state)


def setup(group: click.Group) -> None:
    group.add_command(false_violation)
