"""
Monte Carlo measurement runs: draw finite samples from a marginal, bin them
on the same grid as the theoretical distribution and track the total
variation distance between the two.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from cgur.coarse import BinGrid, DiscreteDist, bin_marginal
from cgur.numerics import DEFAULT_MASS_TOL, DEFAULT_QUADRATURE, QuadratureSpec
from cgur.relations import URReport, report_from_distributions
from cgur.states import StateModel

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmpiricalRun:
    n_shots: int
    seed: int
    axis: str
    empirical: DiscreteDist
    theoretical: DiscreteDist
    tv_distance: float

    def to_json_dict(self) -> dict:
        out = self.empirical.to_json_dict()
        out.update({"n_shots": self.n_shots, "seed": self.seed, "tv_distance": self.tv_distance})
        return out


def histogram_samples(samples: np.ndarray, template: DiscreteDist) -> DiscreteDist:
    """
    Bin `samples` over the template's grid and bin range. Samples outside the
    enumerated bins are counted into tail_mass.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    n = samples.size
    if n == 0:
        raise ValueError("cannot histogram an empty sample")

    i = np.asarray(template.grid.bin_index(samples)).ravel() - template.first
    inside = (i >= 0) & (i < template.probs.size)
    counts = np.bincount(i[inside], minlength=template.probs.size)
    overflow = n - int(inside.sum())
    return DiscreteDist(template.grid, template.first, counts / n, overflow / n)


def tv_distance(a: DiscreteDist, b: DiscreteDist) -> float:
    """Half the L1 distance; the two tail buckets count as one more outcome."""
    if a.grid != b.grid:
        raise ValueError(f"distributions live on different grids: {a.grid} vs {b.grid}")
    first = min(a.first, b.first)
    last = max(a.last, b.last)
    pa = np.zeros(last - first + 1)
    pb = np.zeros_like(pa)
    pa[a.first - first : a.last - first + 1] = a.probs
    pb[b.first - first : b.last - first + 1] = b.probs
    return 0.5 * (float(np.abs(pa - pb).sum()) + abs(a.tail_mass - b.tail_mass))


def _seed_label(seed) -> int:
    if isinstance(seed, np.random.SeedSequence):
        # spawned streams share entropy; the derived word tells them apart
        return int(seed.generate_state(1)[0])
    return int(seed)


def simulate_run(
    state: StateModel,
    grid: BinGrid,
    n_shots: int,
    seed,
    axis: str = "x",
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    cdf_table_points: Optional[int] = None,
) -> EmpiricalRun:
    if int(n_shots) < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")

    marginal = state.marginal(axis)
    if cdf_table_points is not None:
        marginal = replace(marginal, cdf_table_points=int(cdf_table_points))
    theoretical = bin_marginal(marginal, grid, mass_tol, spec)
    samples = marginal.sample(seed, int(n_shots))
    empirical = histogram_samples(samples, theoretical)
    tv = tv_distance(empirical, theoretical)

    seed_out = _seed_label(seed)
    log.debug("Sampling: %s-axis n=%d tv=%.3g", axis, n_shots, tv)
    return EmpiricalRun(
        n_shots=int(n_shots),
        seed=seed_out,
        axis=axis,
        empirical=empirical,
        theoretical=theoretical,
        tv_distance=tv,
    )


def convergence_study(
    state: StateModel,
    grid: BinGrid,
    shots_schedule: Sequence[int],
    seed: int,
    axis: str = "x",
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    cdf_table_points: Optional[int] = None,
) -> list[tuple[int, float]]:
    """(n, tv_distance) for every n in the schedule, each run on its own spawned stream."""
    schedule = [int(n) for n in shots_schedule]
    if not schedule:
        raise ValueError("shots schedule is empty")
    if schedule[0] < 1 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"shots schedule must be positive and strictly increasing, got {schedule}")

    streams = np.random.SeedSequence(seed).spawn(len(schedule))
    out = []
    for n, stream in zip(schedule, streams):
        run = simulate_run(state, grid, n, stream, axis, mass_tol, spec, cdf_table_points)
        out.append((n, run.tv_distance))
    return out


def tv_decay_slope(points: Sequence[tuple[int, float]]) -> float:
    """Least-squares slope of log(tv) against log(n); about -1/2 for a sound sampler."""
    if len(points) < 2:
        raise ValueError("need at least two (n, tv) points to fit a slope")
    n = np.array([p[0] for p in points], dtype=float)
    tv = np.array([p[1] for p in points], dtype=float)
    if np.any(tv <= 0):
        raise ValueError("tv distances must be positive to fit a log-log slope")
    slope, _ = np.polyfit(np.log(n), np.log(tv), 1)
    return float(slope)


def empirical_report(
    state: StateModel,
    grid_x: BinGrid,
    grid_p: BinGrid,
    n_shots: int,
    seed: int,
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> URReport:
    """URReport built from simulated position and momentum histograms."""
    stream_x, stream_p = np.random.SeedSequence(seed).spawn(2)
    run_x = simulate_run(state, grid_x, n_shots, stream_x, "x", mass_tol, spec)
    run_p = simulate_run(state, grid_p, n_shots, stream_p, "p", mass_tol, spec)
    return report_from_distributions(
        state.hbar,
        run_x.empirical,
        run_p.empirical,
        state.position(),
        state.momentum(),
        enforce=False,
    )
