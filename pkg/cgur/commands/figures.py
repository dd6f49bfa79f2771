import logging
from typing import Optional

import click

from cgur.commands import AppContext, format_option, hbar_option, pass_app, positive, state_option, store_option
from cgur.experiments import SweepSpec, histogram_curves, log_spaced, resolution_sweep, trivial_threshold
from cgur.states import GaussianState
from cgur.utils import emit, emit_json

log = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "a",
    "coarse_product_ratio",
    "trivial_term_ratio",
    "n_bins_x",
    "n_bins_p",
    "n_bins",
    "satisfied",
    "trivially_satisfied",
]


@click.command("histograms")
@state_option()
@hbar_option
@click.option("--width", "widths", type=positive, multiple=True, required=True, help="Bin width (repeatable).")
@click.option("--offset-x", type=float, default=0.0, show_default=True)
@format_option("csv")
@store_option
@pass_app
def histograms(
    app: AppContext,
    state_path: str,
    hbar: Optional[float],
    widths: tuple[float, ...],
    offset_x: float,
    fmt: str,
    store: Optional[bool],
):
    """Histogram reconstructions of the position density, one step curve per width."""
    state = app.load_state(state_path, hbar)
    curves = histogram_curves(state, list(widths), offset_x, app.cfg.mass_tol, app.cfg.quadrature)

    if fmt == "json":
        payload = [
            {
                "width": c.width,
                "tail_mass": c.tail_mass,
                "x": c.xs.tolist(),
                "w": c.ws.tolist(),
                "pdf": c.pdf.tolist(),
            }
            for c in curves
        ]
        emit_json(payload)
    else:
        payload = [row for c in curves for row in c.rows()]
        emit(payload, fmt, ["width", "x", "w", "pdf"])
    app.record("histograms", payload, store, state)


@click.command("sweep")
@state_option(required=False)
@hbar_option
@click.option("--squeeze", type=float, default=0.0, show_default=True, help="Squeezing r of the default minimum-uncertainty state.")
@click.option("--a", "a_values", type=positive, multiple=True, help="Explicit a = dx/sigma_x = dp/sigma_p (repeatable).")
@click.option("--a-min", type=positive, default=0.01, show_default=True)
@click.option("--a-max", type=positive, default=10.0, show_default=True)
@click.option("--a-steps", type=click.IntRange(min=1), default=25, show_default=True)
@click.option("--interval-sigmas", type=positive, default=6.0, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Process pool size (default: WORKERS).")
@format_option("csv")
@store_option
@pass_app
def sweep(
    app: AppContext,
    state_path: Optional[str],
    hbar: Optional[float],
    squeeze: float,
    a_values: tuple[float, ...],
    a_min: float,
    a_max: float,
    a_steps: int,
    interval_sigmas: float,
    workers: Optional[int],
    fmt: str,
    store: Optional[bool],
):
    """Coarse variance relation against bin width, in units of each marginal's spread."""
    if state_path:
        state = app.load_state(state_path, hbar)
    else:
        state = GaussianState.squeezed(squeeze, hbar=hbar or app.cfg.hbar)

    if a_values:
        values = list(a_values)
    else:
        if a_min > a_max:
            raise click.UsageError("--a-min must not exceed --a-max")
        values = log_spaced(a_min, a_max, a_steps)

    spec = SweepSpec(a_values=values, state=state, interval_sigmas=interval_sigmas)
    rows = resolution_sweep(spec, app.cfg.mass_tol, app.cfg.quadrature, workers or app.cfg.workers)

    mx = state.position()
    mp = state.momentum()
    threshold = trivial_threshold(mx.std, mp.std, state.hbar)
    log.info("Sweep: bin-width term alone suffices beyond a = %.6g", threshold)

    payload = [r.to_dict() for r in rows]
    emit(payload, fmt, SWEEP_COLUMNS)
    app.record("sweep", payload, store, state)


def setup(group: click.Group) -> None:
    group.add_command(histograms)
    group.add_command(sweep)
