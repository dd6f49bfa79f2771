import logging
from typing import Optional

import click

from cgur.coarse import BinGrid
from cgur.commands import AppContext, format_option, hbar_option, pass_app, positive, state_option, store_option
from cgur.sampling import convergence_study, empirical_report, tv_decay_slope
from cgur.utils import emit, emit_json

log = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (100, 10_000, 1_000_000)


@click.command("sample")
@state_option()
@hbar_option
@click.option("--dx", type=positive, required=True, help="Bin width on the sampled axis.")
@click.option("--offset-x", type=float, default=0.0, show_default=True)
@click.option("--axis", type=click.Choice(["x", "p"]), default="x", show_default=True)
@click.option("--shots", type=click.IntRange(min=1), multiple=True, help="Sample count (repeatable, increasing).")
@click.option("--seed", type=int, default=0, show_default=True)
@format_option("csv")
@store_option
@pass_app
def sample(
    app: AppContext,
    state_path: str,
    hbar: Optional[float],
    dx: float,
    offset_x: float,
    axis: str,
    shots: tuple[int, ...],
    seed: int,
    fmt: str,
    store: Optional[bool],
):
    """Simulated measurements: TV distance to the bin probabilities for each sample count."""
    state = app.load_state(state_path, hbar)
    schedule = list(shots) or list(DEFAULT_SCHEDULE)

    points = convergence_study(
        state,
        BinGrid(dx, offset_x),
        schedule,
        seed,
        axis,
        app.cfg.mass_tol,
        app.cfg.quadrature,
        app.cfg.cdf_table_points,
    )
    if len(points) > 1 and all(tv > 0 for _, tv in points):
        log.info("Sample: log-log slope of TV distance vs n = %.3f", tv_decay_slope(points))

    payload = [{"n": n, "tv_distance": tv} for n, tv in points]
    emit(payload, fmt, ["n", "tv_distance"])
    app.record("sample", payload, store, state)


@click.command("empirical")
@state_option()
@hbar_option
@click.option("--dx", type=positive, required=True)
@click.option("--dp", type=positive, required=True)
@click.option("--shots", type=click.IntRange(min=1), default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@store_option
@pass_app
def empirical(
    app: AppContext,
    state_path: str,
    hbar: Optional[float],
    dx: float,
    dp: float,
    shots: int,
    seed: int,
    store: Optional[bool],
):
    """Uncertainty report computed from simulated position and momentum histograms."""
    state = app.load_state(state_path, hbar)
    result = empirical_report(
        state, BinGrid(dx), BinGrid(dp), shots, seed, app.cfg.mass_tol, app.cfg.quadrature
    )
    payload = result.to_dict()
    emit_json(payload)
    app.record("empirical", payload, store, state)


def setup(group: click.Group) -> None:
    group.add_command(sample)
    group.add_command(empirical)
