"""
Command modules. Each one exposes `setup(group)` which registers its click
commands on the top-level group; shared options and the per-invocation
context live here.
"""
from __future__ import annotations

import logging
from typing import Optional

import click

from cgur.config import Config
from cgur.db import ResultStore
from cgur.errors import StateFileError
from cgur.states import StateModel
from cgur.utils import load_state_file

log = logging.getLogger(__name__)


class AppContext:
    def __init__(self, cfg: Config):
        self.cfg = cfg
        self._store: Optional[ResultStore] = None

    @property
    def store(self) -> ResultStore:
        if self._store is None:
            self._store = ResultStore(self.cfg.db_path)
        return self._store

    def load_state(self, path: str, hbar: Optional[float] = None) -> StateModel:
        """Build the state at --hbar when given, else at the file's hbar, else HBAR."""
        state = load_state_file(path, default_hbar=self.cfg.hbar if hbar is None else hbar)
        if hbar is not None and state.hbar != hbar:
            raise StateFileError(f"{path}: file sets hbar={state.hbar!r} but --hbar {hbar!r} was given")
        return state

    def record(self, command: str, payload, store: Optional[bool], state: Optional[StateModel] = None) -> None:
        if store is None:
            store = self.cfg.store_results
        if not store:
            return
        spec = state.to_spec() if state is not None else None
        self.store.record_run(command, payload, spec)


pass_app = click.make_pass_decorator(AppContext)

positive = click.FloatRange(min=0.0, min_open=True)


def state_option(required: bool = True):
    return click.option(
        "--state",
        "state_path",
        type=click.Path(dir_okay=False),
        required=required,
        help="State JSON file.",
    )


hbar_option = click.option(
    "--hbar",
    type=positive,
    default=None,
    help="Build the state at this hbar (default: the state file's, then HBAR from .env). A different hbar in the file is an error.",
)

store_option = click.option(
    "--store/--no-store",
    default=None,
    help="Archive this run in the results database (default: STORE_RESULTS).",
)


def format_option(default: str):
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default=default,
        show_default=True,
    )
