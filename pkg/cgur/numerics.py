"""
Numerical substrate: adaptive quadrature, the error function, tail-mass
bounds for truncating bin enumerations, and the position -> momentum
Fourier transform of sampled wavefunctions.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import fft as sp_fft
from scipy import integrate as sp_integrate
from scipy import special

from cgur.errors import ToleranceNotMet

log = logging.getLogger(__name__)

RealFunction = Callable[[float], float]

DEFAULT_MASS_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError(f"quadrature tolerances must be positive, got {self.abs_tol}, {self.rel_tol}")
        if int(self.max_subdivisions) < 1:
            raise ValueError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    outside_mass: float = 0.0

    def __contains__(self, z: float) -> bool:
        return self.lo <= z <= self.hi


# ----------------------------
# Quadrature
# ----------------------------

def integrate(
    f: RealFunction,
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    points: Optional[Sequence[float]] = None,
) -> tuple[float, float]:
    """
    Adaptive Gauss-Kronrod quadrature of f over [a, b] (QUADPACK via scipy).

    Infinite limits are allowed. `points` are known kinks of f (e.g. the nodes
    of a linearly interpolated density); only those strictly inside a finite
    [a, b] are used.

    Returns (value, err_est). Raises ToleranceNotMet when QUADPACK reports
    trouble and its error estimate exceeds max(abs_tol, rel_tol * |value|).
    """
    a = float(a)
    b = float(b)
    if math.isnan(a) or math.isnan(b) or not a < b:
        raise ValueError(f"integrate needs a < b, got [{a}, {b}]")

    kwargs = {
        "epsabs": spec.abs_tol,
        "epsrel": spec.rel_tol,
        "limit": int(spec.max_subdivisions),
        "full_output": 1,
    }
    if points is not None and math.isfinite(a) and math.isfinite(b):
        pts = np.asarray(points, dtype=float)
        pts = pts[(pts > a) & (pts < b)]
        if pts.size:
            kwargs["points"] = pts
            # QUADPACK needs room for one subinterval per breakpoint
            kwargs["limit"] = max(int(spec.max_subdivisions), 2 * pts.size + 50)

    out = sp_integrate.quad(f, a, b, **kwargs)
    value, err = float(out[0]), float(out[1])

    # a 4th element means QUADPACK flagged the result (ier > 0)
    if len(out) > 3:
        target = max(spec.abs_tol, spec.rel_tol * abs(value))
        if not err <= target:
            raise ToleranceNotMet(f"quadrature on [{a}, {b}] failed: {out[3]}", value, err)
        log.debug("Quad: accepted flagged result on [%g, %g], err %.3g", a, b, err)

    return value, err


def erf(x):
    """Error function, exactly odd: erf(-x) == -erf(x)."""
    arr = np.asarray(x, dtype=float)
    return np.copysign(special.erf(np.abs(arr)), arr)[()]


def differential_entropy(
    pdf: RealFunction,
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    points: Optional[Sequence[float]] = None,
) -> float:
    """-∫ f ln f over [lo, hi] with 0 ln 0 = 0."""

    def integrand(z: float) -> float:
        v = pdf(z)
        return -special.xlogy(v, v)

    value, _ = integrate(integrand, lo, hi, spec, points)
    return value


# ----------------------------
# Tail bounds
# ----------------------------

def outside_mass(
    pdf: RealFunction,
    lo: float,
    hi: float,
    mass_tol: float,
    support: tuple[float, float] = (-math.inf, math.inf),
    points: Optional[Sequence[float]] = None,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Mass of pdf outside [lo, hi], integrating each tail up to the support edge."""
    tail_spec = QuadratureSpec(
        abs_tol=mass_tol * 1e-3,
        rel_tol=1e-8,
        max_subdivisions=spec.max_subdivisions,
    )
    s_lo, s_hi = support
    mass = 0.0
    if s_lo < lo:
        mass += max(integrate(pdf, s_lo, lo, tail_spec, points)[0], 0.0)
    if hi < s_hi:
        mass += max(integrate(pdf, hi, s_hi, tail_spec, points)[0], 0.0)
    return mass


def tail_bound_interval(
    pdf: RealFunction,
    center: float,
    mass_tol: float,
    *,
    scale: float = 1.0,
    support: tuple[float, float] = (-math.inf, math.inf),
    points: Optional[Sequence[float]] = None,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    cdf: Optional[RealFunction] = None,
    growth: float = 1.25,
    max_expansions: int = 200,
) -> Interval:
    """
    Smallest interval of the form [center - L, center + L] ∩ support (L grown
    geometrically from `scale`) whose complement carries at most mass_tol.

    With a `cdf` the outside mass is read off it instead of integrated.
    """
    if not mass_tol > 0:
        raise ValueError(f"mass_tol must be positive, got {mass_tol}")
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")

    s_lo, s_hi = support
    half = float(scale)
    mass = 1.0
    for step in range(max_expansions):
        lo = max(center - half, s_lo)
        hi = min(center + half, s_hi)
        if cdf is not None:
            mass = max(float(cdf(lo)), 0.0) + max(1.0 - float(cdf(hi)), 0.0)
        else:
            mass = outside_mass(pdf, lo, hi, mass_tol, support, points, spec)
        if mass <= mass_tol:
            log.debug("Tail: [%g, %g] after %d expansions, outside mass %.3g", lo, hi, step, mass)
            return Interval(lo, hi, mass)
        half *= growth

    raise ToleranceNotMet(
        f"no interval around {center} captured 1 - {mass_tol} within {max_expansions} expansions",
        value=1.0 - mass,
        err_est=mass,
    )


# ----------------------------
# Fourier kernel
# ----------------------------

def momentum_amplitudes(
    psi: np.ndarray,
    x_min: float,
    spacing: float,
    hbar: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """
    phi(p) = (2 pi hbar)^(-1/2) ∫ dx exp(-i p x / hbar) psi(x), evaluated by FFT
    on the conjugate grid p_m = (m - N//2) * dp with dp = 2 pi hbar / (N dx).

    The (N//2)-shift twiddle centers p = 0 on the grid without fftshift; the
    x_min phase restores the position origin.
    """
    psi = np.asarray(psi, dtype=complex)
    n = psi.size
    k = np.arange(n)
    shift = n // 2
    dp = 2.0 * np.pi * hbar / (n * spacing)
    p = (k - shift) * dp

    twiddle = np.exp(2j * np.pi * shift * k / n)
    phi = (
        spacing
        / np.sqrt(2.0 * np.pi * hbar)
        * np.exp(-1j * p * x_min / hbar)
        * sp_fft.fft(psi * twiddle)
    )
    return p, phi
