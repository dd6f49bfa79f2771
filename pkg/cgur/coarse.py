"""
Coarse graining with the rectangle function: bin probabilities, discrete
moments and entropies, and the histogram densities rebuilt from them.

Bin j of a BinGrid covers [(j - 1/2) w + offset, (j + 1/2) w + offset) and
is centered at z_j = j w + offset.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special

from cgur.errors import InternalInconsistency
from cgur.numerics import (
    DEFAULT_MASS_TOL,
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    RealFunction,
    integrate,
    tail_bound_interval,
)
from cgur.states import Marginal

log = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-9
CROSS_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class BinGrid:
    width: float
    offset: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"bin width must be positive, got {self.width}")
        if not math.isfinite(self.offset):
            raise ValueError(f"bin offset must be finite, got {self.offset}")

    def center(self, j):
        return np.asarray(j) * self.width + self.offset

    def edges(self, j) -> tuple:
        j = np.asarray(j, dtype=float)
        return (j - 0.5) * self.width + self.offset, (j + 0.5) * self.width + self.offset

    def bin_index(self, z):
        """Index of the half-open bin holding z (vectorized)."""
        return np.floor((np.asarray(z, dtype=float) - self.offset) / self.width + 0.5).astype(np.int64)[()]

    def shifted(self, bins: int = 1) -> "BinGrid":
        return BinGrid(self.width, self.offset + bins * self.width)


@dataclass(frozen=True, eq=False)
class DiscreteDist:
    """Probabilities of the contiguous bins first .. first + len(probs) - 1; the rest is tail_mass."""

    grid: BinGrid
    first: int
    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        if probs.size == 0:
            raise ValueError("a discrete distribution needs at least one bin")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError("bin probabilities must be finite and non-negative")
        if not (math.isfinite(self.tail_mass) and self.tail_mass >= 0):
            raise ValueError(f"tail mass must be non-negative, got {self.tail_mass}")
        if not probs.sum() > 0:
            raise ValueError("no probability mass in the enumerated bins")
        total = float(probs.sum()) + self.tail_mass
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"bin probabilities plus tail mass sum to {total!r}, not 1")
        object.__setattr__(self, "first", int(self.first))
        object.__setattr__(self, "probs", probs)

    @property
    def indices(self) -> np.ndarray:
        return self.first + np.arange(self.probs.size)

    @property
    def last(self) -> int:
        return self.first + self.probs.size - 1

    @property
    def centers(self) -> np.ndarray:
        return self.grid.center(self.indices)

    def prob(self, j: int) -> float:
        i = int(j) - self.first
        if 0 <= i < self.probs.size:
            return float(self.probs[i])
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return {int(j): float(p) for j, p in zip(self.indices, self.probs)}

    def normalized(self) -> np.ndarray:
        """Bin probabilities conditioned on landing in an enumerated bin."""
        return self.probs / (1.0 - self.tail_mass)

    def to_json_dict(self) -> dict:
        return {
            "width": self.grid.width,
            "offset": self.grid.offset,
            "entries": [{"j": j, "prob": p} for j, p in self.as_dict().items()],
            "tail_mass": self.tail_mass,
        }

    @classmethod
    def from_mapping(cls, grid: BinGrid, probs: dict[int, float], tail_mass: float = 0.0) -> "DiscreteDist":
        if not probs:
            raise ValueError("a discrete distribution needs at least one bin")
        first = min(probs)
        dense = np.zeros(max(probs) - first + 1)
        for j, p in probs.items():
            dense[j - first] += p
        return cls(grid, first, dense, tail_mass)

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiscreteDist":
        if not isinstance(data, dict):
            raise ValueError("histogram record must be a JSON object")
        try:
            grid = BinGrid(float(data["width"]), float(data.get("offset", 0.0)))
            entries = data["entries"]
            probs: dict[int, float] = {}
            for e in entries:
                j = int(e["j"])
                if j in probs:
                    raise ValueError(f"bin {j} listed twice")
                probs[j] = float(e["prob"])
            tail = float(data.get("tail_mass", 0.0))
        except KeyError as e:
            raise ValueError(f"histogram record is missing {e.args[0]!r}") from None
        except TypeError:
            raise ValueError("histogram entries must be objects with numeric 'j' and 'prob'") from None
        return cls.from_mapping(grid, probs, tail)


# ----------------------------
# Binning
# ----------------------------

def bin_probabilities(
    pdf: RealFunction,
    grid: BinGrid,
    mass_tol: float = DEFAULT_MASS_TOL,
    *,
    center: float = 0.0,
    scale: float = 1.0,
    support: tuple[float, float] = (-math.inf, math.inf),
    breakpoints: Optional[Sequence[float]] = None,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    cdf: Optional[RealFunction] = None,
) -> DiscreteDist:
    """
    r_j = ∫ over bin j of pdf, for every bin overlapping the tail-bound
    interval; bins are clipped to that interval and the mass outside it
    becomes tail_mass.

    A vectorized `cdf`, when known in closed form, replaces the per-bin
    quadrature by differences of the CDF at the bin edges.
    """
    iv = tail_bound_interval(
        pdf, center, mass_tol, scale=scale, support=support, points=breakpoints, spec=spec, cdf=cdf
    )

    # bins with positive-length overlap with [lo, hi]
    j_lo = math.floor((iv.lo - grid.offset) / grid.width - 0.5) + 1
    j_hi = math.ceil((iv.hi - grid.offset) / grid.width + 0.5) - 1
    j_hi = max(j_hi, j_lo)

    lo_edges, hi_edges = grid.edges(np.arange(j_lo, j_hi + 1))
    lo_edges = np.maximum(lo_edges, iv.lo)
    hi_edges = np.minimum(hi_edges, iv.hi)

    if cdf is not None:
        probs = np.asarray(cdf(hi_edges), dtype=float) - np.asarray(cdf(lo_edges), dtype=float)
    else:
        probs = np.zeros(j_hi - j_lo + 1)
        for i, (a, b) in enumerate(zip(lo_edges, hi_edges)):
            if b > a:
                probs[i], _ = integrate(pdf, float(a), float(b), spec, breakpoints)

    np.clip(probs, 0.0, None, out=probs)
    log.debug("Bins: %d bins of width %g from %d, tail mass %.3g", probs.size, grid.width, j_lo, iv.outside_mass)
    return DiscreteDist(grid, j_lo, probs, iv.outside_mass)


def bin_marginal(
    marginal: Marginal,
    grid: BinGrid,
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> DiscreteDist:
    return bin_probabilities(
        marginal.pdf,
        grid,
        mass_tol,
        center=marginal.mean,
        scale=marginal.std,
        support=marginal.support,
        breakpoints=marginal.breakpoints,
        spec=spec,
        cdf=marginal.cdf,
    )


def centered_grid(width: float, mean: float) -> BinGrid:
    """Grid whose bin centers include `mean` (one re-centering pass)."""
    return BinGrid(width, float(np.mod(mean, width)))


def bins_intersecting(grid: BinGrid, lo: float, hi: float) -> int:
    """Number of bins meeting the closed interval [lo, hi]."""
    if hi < lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    return int(grid.bin_index(hi) - grid.bin_index(lo) + 1)


# ----------------------------
# Discrete statistics
# ----------------------------

def discrete_mean(d: DiscreteDist) -> float:
    return float(np.dot(d.normalized(), d.centers))


def discrete_variance(d: DiscreteDist) -> float:
    q = d.normalized()
    z = d.centers
    m = float(np.dot(q, z))
    return max(float(np.dot(q, (z - m) ** 2)), 0.0)


def discrete_entropy(d: DiscreteDist) -> float:
    return float(special.entr(d.normalized()).sum())


# ----------------------------
# Histogram densities
# ----------------------------

@dataclass(frozen=True, eq=False)
class CoarsePDF:
    """w(z) = sum_j r_j I(z in bin j) / width."""

    source: DiscreteDist

    @property
    def width(self) -> float:
        return self.source.grid.width

    def density(self, z):
        d = self.source
        i = np.asarray(d.grid.bin_index(z)) - d.first
        inside = (i >= 0) & (i < d.probs.size)
        out = np.where(inside, d.probs[np.clip(i, 0, d.probs.size - 1)], 0.0) / self.width
        return out[()]

    __call__ = density

    def mass(self) -> float:
        return float(self.source.probs.sum())

    def step_curve(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, w) points tracing the histogram: left and right edge of every bin."""
        d = self.source
        lo, hi = d.grid.edges(d.indices)
        xs = np.column_stack([lo, hi]).ravel()
        ws = np.repeat(d.probs / self.width, 2)
        return xs, ws


def coarse_pdf(d: DiscreteDist) -> CoarsePDF:
    return CoarsePDF(d)


def _check_agreement(what: str, direct: float, via_identity: float) -> None:
    if abs(direct - via_identity) > CROSS_CHECK_TOL * max(1.0, abs(via_identity)):
        raise InternalInconsistency(
            f"{what}: direct integration gives {direct!r}, decomposition gives {via_identity!r}"
        )


def coarse_variance_direct(w: CoarsePDF) -> float:
    """Variance of the histogram from its piecewise-constant moments over the bin edges."""
    d = w.source
    q = d.normalized()
    lo, hi = d.grid.edges(d.indices)
    mean = float(np.dot(q, 0.5 * (lo + hi)))
    a = lo - mean
    b = hi - mean
    # (1/(b-a)) ∫_a^b u^2 du = (a^2 + ab + b^2) / 3
    return float(np.dot(q, (a * a + a * b + b * b) / 3.0))


def coarse_variance(w: CoarsePDF) -> float:
    """σ²_w = σ²_discrete + width²/12, cross-checked against direct integration."""
    via_identity = discrete_variance(w.source) + w.width**2 / 12.0
    _check_agreement("coarse variance", coarse_variance_direct(w), via_identity)
    return via_identity


def coarse_entropy_direct(w: CoarsePDF) -> float:
    d = w.source
    lo, hi = d.grid.edges(d.indices)
    lengths = hi - lo
    c = d.normalized() / lengths
    return float(np.dot(lengths, special.entr(c)))


def coarse_entropy(w: CoarsePDF) -> float:
    """h[w] = H[r] + ln(width), cross-checked against direct integration."""
    via_identity = discrete_entropy(w.source) + math.log(w.width)
    _check_agreement("coarse entropy", coarse_entropy_direct(w), via_identity)
    return via_identity


# ----------------------------
# Reconstruction error
# ----------------------------

def histogram_l1_error(
    d: DiscreteDist,
    pdf: RealFunction,
    spec: QuadratureSpec = QuadratureSpec(abs_tol=1e-9, rel_tol=1e-8),
) -> float:
    """∫ |w - pdf| over the enumerated bins, plus the tail mass left outside them."""
    w = coarse_pdf(d)
    total = d.tail_mass
    for j, p in zip(d.indices, d.probs):
        a, b = d.grid.edges(j)
        level = p / w.width
        value, _ = integrate(lambda z: abs(level - pdf(z)), float(a), float(b), spec)
        total += value
    return total


def histogram_sup_error(d: DiscreteDist, pdf: RealFunction, samples_per_bin: int = 32) -> float:
    """max |w - pdf| over a sub-grid of each enumerated bin."""
    lo, _ = d.grid.edges(d.indices)
    frac = (np.arange(samples_per_bin) + 0.5) / samples_per_bin
    z = (lo[:, None] + frac[None, :] * d.grid.width).ravel()
    w = coarse_pdf(d)
    return float(np.max(np.abs(w(z) - pdf(z))))
