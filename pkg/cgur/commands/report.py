import logging
from typing import Optional

import click

from cgur.coarse import BinGrid, centered_grid
from cgur.commands import AppContext, format_option, hbar_option, pass_app, positive, state_option, store_option
from cgur.relations import report_from_distributions, full_report
from cgur.utils import emit_csv, emit_json, flatten, load_histogram_file

log = logging.getLogger(__name__)


def _emit_report(payload: dict, fmt: str) -> None:
    if fmt == "json":
        emit_json(payload)
    else:
        emit_csv([flatten(payload)])


@click.command("report")
@state_option()
@hbar_option
@click.option("--dx", type=positive, required=True, help="Position bin width.")
@click.option("--dp", type=positive, default=None, help="Momentum bin width; omit for a position-only report.")
@click.option("--offset-x", type=float, default=0.0, show_default=True)
@click.option("--offset-p", type=float, default=0.0, show_default=True)
@click.option("--center", is_flag=True, help="Put a bin center on each marginal's mean (overrides offsets).")
@format_option("json")
@store_option
@pass_app
def report(
    app: AppContext,
    state_path: str,
    hbar: Optional[float],
    dx: float,
    dp: Optional[float],
    offset_x: float,
    offset_p: float,
    center: bool,
    fmt: str,
    store: Optional[bool],
):
    """Bin a state's marginals and evaluate every uncertainty relation."""
    state = app.load_state(state_path, hbar)

    grid_x = BinGrid(dx, offset_x)
    grid_p = BinGrid(dp, offset_p) if dp is not None else None
    if center:
        grid_x = centered_grid(dx, state.position().mean)
        if dp is not None:
            grid_p = centered_grid(dp, state.momentum().mean)

    result = full_report(state, grid_x, grid_p, app.cfg.mass_tol, app.cfg.quadrature)
    payload = result.to_dict()
    _emit_report(payload, fmt)
    app.record("report", payload, store, state)


@click.command("check")
@click.option("--hist-x", "hist_x", type=click.Path(dir_okay=False), required=True, help="Position histogram JSON.")
@click.option("--hist-p", "hist_p", type=click.Path(dir_okay=False), default=None, help="Momentum histogram JSON.")
@hbar_option
@format_option("json")
@store_option
@pass_app
def check(app: AppContext, hist_x: str, hist_p: Optional[str], hbar: Optional[float], fmt: str, store: Optional[bool]):
    """Evaluate the coarse relations on measured histograms."""
    dist_x = load_histogram_file(hist_x)
    dist_p = load_histogram_file(hist_p) if hist_p else None

    result = report_from_distributions(hbar or app.cfg.hbar, dist_x, dist_p, max_tail_mass=app.cfg.mass_tol)
    failed = result.failed_theorems()
    if failed:
        log.warning("Check: histograms fail %s", ", ".join(failed))

    payload = result.to_dict()
    _emit_report(payload, fmt)
    app.record("check", payload, store)


def setup(group: click.Group) -> None:
    group.add_command(report)
    group.add_command(check)
