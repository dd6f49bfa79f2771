"""
Experiment drivers behind the CLI: histogram curves for a range of bin
widths, the resolution sweep of the coarse variance relation, and the search
for widths at which discrete variances fake a violation.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from typing import Sequence

import numpy as np

from cgur.coarse import (
    BinGrid,
    bin_marginal,
    bins_intersecting,
    centered_grid,
    coarse_pdf,
    discrete_variance,
)
from cgur.errors import SearchExhausted
from cgur.numerics import DEFAULT_MASS_TOL, DEFAULT_QUADRATURE, QuadratureSpec
from cgur.relations import SLACK_QUADRATURE, eval_coarse_hur, eval_false_violation
from cgur.states import StateModel

log = logging.getLogger(__name__)


# ---------------- Histogram curves ----------------

@dataclass(frozen=True, eq=False)
class HistogramCurve:
    width: float
    xs: np.ndarray
    ws: np.ndarray
    pdf: np.ndarray
    tail_mass: float

    def rows(self):
        for x, w, f in zip(self.xs, self.ws, self.pdf):
            yield {"width": self.width, "x": float(x), "w": float(w), "pdf": float(f)}


def histogram_curves(
    state: StateModel,
    widths: Sequence[float],
    offset: float = 0.0,
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> list[HistogramCurve]:
    """Step curves of the position histogram at each width, with the exact density alongside."""
    if not widths:
        raise ValueError("at least one bin width is required")
    marginal = state.position()
    curves = []
    for width in widths:
        dist = bin_marginal(marginal, BinGrid(float(width), offset), mass_tol, spec)
        xs, ws = coarse_pdf(dist).step_curve()
        curves.append(
            HistogramCurve(
                width=float(width),
                xs=xs,
                ws=ws,
                pdf=np.asarray(marginal.pdf(xs), dtype=float),
                tail_mass=dist.tail_mass,
            )
        )
    return curves


# ---------------- Resolution sweep ----------------

@dataclass(frozen=True, eq=False)
class SweepSpec:
    """a = dx / sigma_x = dp / sigma_p for every entry of a_values."""

    a_values: Sequence[float]
    state: StateModel
    interval_sigmas: float = 6.0

    def __post_init__(self):
        values = [float(a) for a in self.a_values]
        if not values:
            raise ValueError("sweep needs at least one value of a")
        if any(not (math.isfinite(a) and a > 0) for a in values):
            raise ValueError(f"sweep values of a must be positive, got {values}")
        if not self.interval_sigmas > 0:
            raise ValueError(f"interval_sigmas must be positive, got {self.interval_sigmas}")
        object.__setattr__(self, "a_values", sorted(values))


@dataclass(frozen=True)
class SweepRow:
    a: float
    coarse_product_ratio: float
    trivial_term_ratio: float
    n_bins_x: int
    n_bins_p: int
    n_bins: int
    satisfied: bool
    trivially_satisfied: bool

    def to_dict(self) -> dict:
        return asdict(self)


def log_spaced(a_min: float, a_max: float, steps: int) -> list[float]:
    if not (0 < a_min <= a_max):
        raise ValueError(f"need 0 < a_min <= a_max, got {a_min}, {a_max}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if steps == 1:
        return [float(a_min)]
    return [float(a) for a in np.geomspace(a_min, a_max, steps)]


def trivial_threshold(sigma_x: float, sigma_p: float, hbar: float = 1.0) -> float:
    """a beyond which the bin-width term alone satisfies the coarse variance relation."""
    return math.sqrt(6.0 * hbar / (sigma_x * sigma_p))


def sweep_point(
    state: StateModel,
    a: float,
    interval_sigmas: float = 6.0,
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> SweepRow:
    mx = state.position()
    mp = state.momentum()
    gx = centered_grid(a * mx.std, mx.mean)
    gp = centered_grid(a * mp.std, mp.mean)

    dvar_x = discrete_variance(bin_marginal(mx, gx, mass_tol, spec))
    dvar_p = discrete_variance(bin_marginal(mp, gp, mass_tol, spec))
    v = eval_coarse_hur(dvar_x, dvar_p, gx.width, gp.width, state.hbar, SLACK_QUADRATURE)

    k = interval_sigmas
    n_x = bins_intersecting(gx, mx.mean - k * mx.std, mx.mean + k * mx.std)
    n_p = bins_intersecting(gp, mp.mean - k * mp.std, mp.mean + k * mp.std)
    return SweepRow(
        a=float(a),
        coarse_product_ratio=v.lhs / v.bound,
        trivial_term_ratio=v.trivial_term / v.bound,
        n_bins_x=n_x,
        n_bins_p=n_p,
        n_bins=n_x + n_p,
        satisfied=v.satisfied,
        trivially_satisfied=v.trivially_satisfied,
    )


def resolution_sweep(
    sweep: SweepSpec,
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    workers: int = 1,
) -> list[SweepRow]:
    """One row per a, ordered by a; points run in a process pool when workers > 1."""
    point = partial(
        sweep_point,
        sweep.state,
        interval_sigmas=sweep.interval_sigmas,
        mass_tol=mass_tol,
        spec=spec,
    )
    if workers > 1 and len(sweep.a_values) > 1:
        log.info("Sweep: %d points on %d workers", len(sweep.a_values), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, sweep.a_values))
    return [point(a) for a in sweep.a_values]


# ---------------- False violation search ----------------

@dataclass(frozen=True)
class FalseViolationWitness:
    a: float
    delta_x: float
    delta_p: float
    naive_product: float
    bound: float
    coarse_lhs: float
    coarse_satisfied: bool
    steps: int

    def to_dict(self) -> dict:
        return asdict(self)


def find_false_violation(
    state: StateModel,
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    start: float = 1.0,
    growth: float = 2.0**0.25,
    cap: float = 1e3,
) -> FalseViolationWitness:
    """
    Widen both bins together (dx = a sigma_x, dp = a sigma_p, a grown
    geometrically) until the product of discrete variances drops below
    hbar^2/4; report the widths and the coarse relation there.
    """
    if not (start > 0 and growth > 1):
        raise ValueError("search needs start > 0 and growth > 1")

    mx = state.position()
    mp = state.momentum()
    a = float(start)
    steps = 0
    while a <= cap:
        gx = centered_grid(a * mx.std, mx.mean)
        gp = centered_grid(a * mp.std, mp.mean)
        dvar_x = discrete_variance(bin_marginal(mx, gx, mass_tol, spec))
        dvar_p = discrete_variance(bin_marginal(mp, gp, mass_tol, spec))
        fv = eval_false_violation(dvar_x, dvar_p, state.hbar)
        steps += 1
        if fv.below_hbar_bound:
            v = eval_coarse_hur(dvar_x, dvar_p, gx.width, gp.width, state.hbar, SLACK_QUADRATURE)
            log.info("Search: false violation at a=%g after %d steps", a, steps)
            return FalseViolationWitness(
                a=a,
                delta_x=gx.width,
                delta_p=gp.width,
                naive_product=fv.naive_lhs,
                bound=fv.bound,
                coarse_lhs=v.lhs,
                coarse_satisfied=v.satisfied,
                steps=steps,
            )
        a *= growth

    raise SearchExhausted(f"no false violation found for bin widths up to {cap:g} standard deviations")
