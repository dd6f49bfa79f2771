"""
Catalog of continuous-variable states.

Every state exposes its position marginal and, where defined, its momentum
marginal as a `Marginal`: a normalized density with its exact moments,
differential entropy, support hints for quadrature and an inverse-CDF sampler.
"""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Callable, ClassVar, Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate as sp_integrate
from scipy import special

from cgur.errors import MomentumUndefined
from cgur.numerics import (
    DEFAULT_MASS_TOL,
    DEFAULT_QUADRATURE,
    Interval,
    QuadratureSpec,
    differential_entropy,
    erf,
    integrate,
    momentum_amplitudes,
    tail_bound_interval,
)

log = logging.getLogger(__name__)

_SQRT_2PI = math.sqrt(2.0 * math.pi)

DEFAULT_CDF_TABLE_POINTS = 16385


class StateKind(str, Enum):
    GAUSSIAN_SQUEEZED = "GaussianSqueezed"
    TRUNCATED_GAUSSIAN = "TruncatedGaussian"
    NUMERIC_WAVEFUNCTION = "NumericWavefunction"


@dataclass(frozen=True, eq=False)
class Marginal:
    axis: str
    pdf: Callable[[ArrayLike], Any]
    mean: float
    variance: float
    entropy: float
    support: tuple[float, float] = (-math.inf, math.inf)
    breakpoints: Optional[np.ndarray] = None
    cdf: Optional[Callable[[ArrayLike], Any]] = None
    cdf_table_points: int = DEFAULT_CDF_TABLE_POINTS

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def tail_interval(
        self,
        mass_tol: float = DEFAULT_MASS_TOL,
        spec: QuadratureSpec = DEFAULT_QUADRATURE,
    ) -> Interval:
        return tail_bound_interval(
            self.pdf,
            self.mean,
            mass_tol,
            scale=self.std,
            support=self.support,
            points=self.breakpoints,
            spec=spec,
            cdf=self.cdf,
        )

    @cached_property
    def cdf_table(self) -> tuple[np.ndarray, np.ndarray]:
        iv = self.tail_interval()
        grid = np.linspace(iv.lo, iv.hi, self.cdf_table_points)
        if self.breakpoints is not None:
            inner = self.breakpoints[(self.breakpoints > iv.lo) & (self.breakpoints < iv.hi)]
            grid = np.union1d(grid, inner)
        if self.cdf is not None:
            cdf = np.asarray(self.cdf(grid), dtype=float)
            cdf = (cdf - cdf[0]) / (cdf[-1] - cdf[0])
        else:
            cdf = sp_integrate.cumulative_trapezoid(self.pdf(grid), grid, initial=0.0)
            cdf /= cdf[-1]
        return grid, cdf

    def sample(self, rng_seed, n: int) -> np.ndarray:
        """n i.i.d. draws by inverting the tabulated CDF; deterministic per seed."""
        if int(n) < 1:
            raise ValueError(f"need at least one sample, got n={n}")
        grid, cdf = self.cdf_table
        u = np.random.default_rng(rng_seed).random(int(n))
        return np.interp(u, cdf, grid)


@dataclass(frozen=True, eq=False, kw_only=True)
class StateModel(ABC):
    hbar: float = 1.0

    kind: ClassVar[StateKind]
    has_momentum: ClassVar[bool] = True

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError(f"hbar must be positive, got {self.hbar}")

    @abstractmethod
    def position(self) -> Marginal: ...

    @abstractmethod
    def momentum(self) -> Marginal: ...

    @abstractmethod
    def to_spec(self) -> dict: ...

    def marginal(self, axis: str) -> Marginal:
        if axis == "x":
            return self.position()
        if axis == "p":
            return self.momentum()
        raise ValueError(f"axis must be 'x' or 'p', got {axis!r}")

    def position_pdf(self, x):
        return self.position().pdf(x)

    def momentum_pdf(self, p):
        return self.momentum().pdf(p)

    def exact_variance_x(self) -> float:
        return self.position().variance

    def exact_variance_p(self) -> float:
        return self.momentum().variance

    def entropy_x(self) -> float:
        return self.position().entropy

    def entropy_p(self) -> float:
        return self.momentum().entropy

    def sample_x(self, rng_seed, n: int) -> np.ndarray:
        return self.position().sample(rng_seed, n)

    def sample_p(self, rng_seed, n: int) -> np.ndarray:
        return self.momentum().sample(rng_seed, n)


# ----------------------------
# Gaussian (squeezed vacuum, displaced)
# ----------------------------

@dataclass(frozen=True, eq=False, kw_only=True)
class GaussianState(StateModel):
    sigma_x: float
    sigma_p: float
    mean_x: float = 0.0
    mean_p: float = 0.0

    kind: ClassVar[StateKind] = StateKind.GAUSSIAN_SQUEEZED

    def __post_init__(self):
        super().__post_init__()
        for name in ("sigma_x", "sigma_p"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")
        for name in ("mean_x", "mean_p"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        # squeezed constructors hit hbar/2 only up to rounding
        if self.sigma_x * self.sigma_p < 0.5 * self.hbar * (1.0 - 1e-12):
            raise ValueError(
                f"unphysical Gaussian: sigma_x * sigma_p = {self.sigma_x * self.sigma_p} < hbar/2 = {0.5 * self.hbar}"
            )

    @classmethod
    def ground(cls, hbar: float = 1.0) -> "GaussianState":
        return cls.squeezed(0.0, hbar=hbar)

    @classmethod
    def squeezed(cls, r: float, hbar: float = 1.0, mean_x: float = 0.0, mean_p: float = 0.0) -> "GaussianState":
        """Minimum-uncertainty state squeezed along x for r > 0."""
        s = math.sqrt(hbar / 2.0)
        return cls(
            sigma_x=s * math.exp(-r),
            sigma_p=s * math.exp(r),
            mean_x=mean_x,
            mean_p=mean_p,
            hbar=hbar,
        )

    @staticmethod
    def _normal(z, mean: float, sigma: float):
        u = (np.asarray(z, dtype=float) - mean) / sigma
        return (np.exp(-0.5 * u * u) / (sigma * _SQRT_2PI))[()]

    def _pdf_x(self, x):
        return self._normal(x, self.mean_x, self.sigma_x)

    def _pdf_p(self, p):
        return self._normal(p, self.mean_p, self.sigma_p)

    def _cdf_x(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.mean_x) / self.sigma_x)[()]

    def _cdf_p(self, p):
        return special.ndtr((np.asarray(p, dtype=float) - self.mean_p) / self.sigma_p)[()]

    @cached_property
    def _position(self) -> Marginal:
        return Marginal(
            axis="x",
            pdf=self._pdf_x,
            mean=self.mean_x,
            variance=self.sigma_x**2,
            entropy=0.5 * math.log(2.0 * math.pi * math.e * self.sigma_x**2),
            cdf=self._cdf_x,
        )

    @cached_property
    def _momentum(self) -> Marginal:
        return Marginal(
            axis="p",
            pdf=self._pdf_p,
            mean=self.mean_p,
            variance=self.sigma_p**2,
            entropy=0.5 * math.log(2.0 * math.pi * math.e * self.sigma_p**2),
            cdf=self._cdf_p,
        )

    def position(self) -> Marginal:
        return self._position

    def momentum(self) -> Marginal:
        return self._momentum

    def to_spec(self) -> dict:
        return {
            "kind": self.kind.value,
            "hbar": self.hbar,
            "params": {
                "sigma_x": self.sigma_x,
                "sigma_p": self.sigma_p,
                "mean_x": self.mean_x,
                "mean_p": self.mean_p,
            },
        }


# ----------------------------
# Truncated Gaussian (position only)
# ----------------------------

@dataclass(frozen=True, eq=False, kw_only=True)
class TruncatedGaussianState(StateModel):
    """exp(-kappa x^2) on [-width/2, width/2], renormalized; kappa may be negative."""

    kappa: float
    width: float

    kind: ClassVar[StateKind] = StateKind.TRUNCATED_GAUSSIAN
    has_momentum: ClassVar[bool] = False

    def __post_init__(self):
        super().__post_init__()
        if not math.isfinite(self.kappa):
            raise ValueError("kappa must be finite")
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"width must be positive, got {self.width}")

    @property
    def half_width(self) -> float:
        return 0.5 * self.width

    @cached_property
    def _log_shift(self) -> float:
        # keeps exp(-kappa x^2 + shift) <= 1 on the support for kappa < 0
        return self.kappa * self.half_width**2 if self.kappa < 0 else 0.0

    def _unnormalized(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) <= self.half_width
        exponent = np.where(inside, -self.kappa * x * x + self._log_shift, -np.inf)
        return np.exp(exponent)[()]

    @cached_property
    def normalization(self) -> float:
        """Integral of the shifted exponential over the support (numerical)."""
        value, _ = integrate(self._unnormalized, -self.half_width, self.half_width)
        return value

    def closed_form_normalization(self) -> float:
        """sqrt(pi/kappa) * erf(width sqrt(kappa) / 2); kappa > 0 only."""
        if not self.kappa > 0:
            raise ValueError("closed-form normalization needs kappa > 0")
        return math.sqrt(math.pi / self.kappa) * float(erf(self.width * math.sqrt(self.kappa) / 2.0))

    def _pdf_x(self, x):
        return self._unnormalized(x) / self.normalization

    def closed_form_variance(self) -> float:
        if not self.kappa > 0:
            raise ValueError("closed-form variance needs kappa > 0")
        k = self.kappa
        d = self.width
        return 1.0 / (2.0 * k) - (d / (2.0 * math.sqrt(k * math.pi))) * math.exp(-k * d * d / 4.0) / float(
            erf(d * math.sqrt(k) / 2.0)
        )

    def quadrature_variance(self) -> float:
        value, _ = integrate(lambda x: x * x * self._pdf_x(x), -self.half_width, self.half_width)
        return value

    @cached_property
    def _position(self) -> Marginal:
        if self.kappa == 0:
            variance = self.width**2 / 12.0
        elif self.kappa * self.width**2 > 1e-3:
            variance = self.closed_form_variance()
        else:
            # 1/(2 kappa) cancels catastrophically for small kappa
            variance = self.quadrature_variance()

        return Marginal(
            axis="x",
            pdf=self._pdf_x,
            mean=0.0,
            variance=variance,
            entropy=differential_entropy(self._pdf_x, -self.half_width, self.half_width),
            support=(-self.half_width, self.half_width),
        )

    def position(self) -> Marginal:
        return self._position

    def momentum(self) -> Marginal:
        raise MomentumUndefined("TruncatedGaussian defines only a position density; no momentum side")

    def to_spec(self) -> dict:
        return {
            "kind": self.kind.value,
            "hbar": self.hbar,
            "params": {"kappa": self.kappa, "width": self.width},
        }


# ----------------------------
# Sampled wavefunction
# ----------------------------

@dataclass(frozen=True, eq=False, kw_only=True)
class NumericWavefunctionState(StateModel):
    x_min: float
    spacing: float
    psi: np.ndarray = field(repr=False)

    kind: ClassVar[StateKind] = StateKind.NUMERIC_WAVEFUNCTION

    def __post_init__(self):
        super().__post_init__()
        psi = np.asarray(self.psi, dtype=complex).ravel()
        if psi.size < 3:
            raise ValueError("a sampled wavefunction needs at least 3 grid points")
        if not np.all(np.isfinite(psi)):
            raise ValueError("wavefunction samples must be finite")
        if not (math.isfinite(self.spacing) and self.spacing > 0):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if not math.isfinite(self.x_min):
            raise ValueError("x_min must be finite")

        # normalize so the linear interpolant of |psi|^2 integrates to 1
        norm = sp_integrate.trapezoid(np.abs(psi) ** 2, dx=self.spacing)
        if not norm > 0:
            raise ValueError("wavefunction has zero norm")
        object.__setattr__(self, "psi", psi / math.sqrt(norm))

    @classmethod
    def from_function(
        cls,
        fn: Callable[[np.ndarray], ArrayLike],
        x_min: float,
        x_max: float,
        n: int,
        hbar: float = 1.0,
    ) -> "NumericWavefunctionState":
        x = np.linspace(x_min, x_max, n)
        return cls(x_min=x_min, spacing=(x_max - x_min) / (n - 1), psi=np.asarray(fn(x)), hbar=hbar)

    @cached_property
    def x_grid(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.psi.size)

    @cached_property
    def _x_density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    @cached_property
    def _p_table(self) -> tuple[np.ndarray, np.ndarray]:
        p, phi = momentum_amplitudes(self.psi, self.x_min, self.spacing, self.hbar)
        density = np.abs(phi) ** 2
        return p, density / sp_integrate.trapezoid(density, p)

    def _pdf_x(self, x):
        return np.interp(x, self.x_grid, self._x_density, left=0.0, right=0.0)[()]

    def _pdf_p(self, p):
        grid, density = self._p_table
        return np.interp(p, grid, density, left=0.0, right=0.0)[()]

    @staticmethod
    def _tabulated_marginal(axis: str, grid: np.ndarray, density: np.ndarray, pdf) -> Marginal:
        mean = sp_integrate.trapezoid(grid * density, grid)
        variance = sp_integrate.trapezoid((grid - mean) ** 2 * density, grid)
        entropy = sp_integrate.trapezoid(special.entr(density), grid)
        return Marginal(
            axis=axis,
            pdf=pdf,
            mean=float(mean),
            variance=float(variance),
            entropy=float(entropy),
            support=(float(grid[0]), float(grid[-1])),
            breakpoints=grid,
        )

    @cached_property
    def _position(self) -> Marginal:
        return self._tabulated_marginal("x", self.x_grid, self._x_density, self._pdf_x)

    @cached_property
    def _momentum(self) -> Marginal:
        grid, density = self._p_table
        return self._tabulated_marginal("p", grid, density, self._pdf_p)

    def position(self) -> Marginal:
        return self._position

    def momentum(self) -> Marginal:
        return self._momentum

    def to_spec(self) -> dict:
        return {
            "kind": self.kind.value,
            "hbar": self.hbar,
            "params": {
                "x_min": self.x_min,
                "spacing": self.spacing,
                "psi_real": self.psi.real.tolist(),
                "psi_imag": self.psi.imag.tolist(),
            },
        }


# ----------------------------
# JSON state records
# ----------------------------

_KIND_ALIASES = {
    "gaussian": StateKind.GAUSSIAN_SQUEEZED,
    "gaussiansqueezed": StateKind.GAUSSIAN_SQUEEZED,
    "squeezedvacuum": StateKind.GAUSSIAN_SQUEEZED,
    "truncatedgaussian": StateKind.TRUNCATED_GAUSSIAN,
    "numeric": StateKind.NUMERIC_WAVEFUNCTION,
    "numericwavefunction": StateKind.NUMERIC_WAVEFUNCTION,
}


def _kind_from(raw: Any) -> StateKind:
    key = str(raw or "").strip().lower().replace("_", "").replace("-", "")
    if key not in _KIND_ALIASES:
        raise ValueError(f"unknown state kind {raw!r}; expected one of {sorted(k.value for k in StateKind)}")
    return _KIND_ALIASES[key]


def _num(params: dict, name: str, default: Optional[float] = None) -> float:
    raw = params.get(name, default)
    if raw is None:
        raise ValueError(f"missing state parameter {name!r}")
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ValueError(f"state parameter {name!r} must be a number, got {raw!r}") from None


def state_from_spec(spec: dict, default_hbar: float = 1.0) -> StateModel:
    """Build a state from its JSON record: {kind, hbar, params: {...}} (params may be inlined)."""
    if not isinstance(spec, dict):
        raise ValueError("state record must be a JSON object")

    kind = _kind_from(spec.get("kind"))
    params = dict(spec.get("params") or {})
    for k, v in spec.items():
        if k not in ("kind", "hbar", "params"):
            params.setdefault(k, v)
    hbar = _num(spec, "hbar", default_hbar)

    if kind is StateKind.GAUSSIAN_SQUEEZED:
        mean_x = _num(params, "mean_x", 0.0)
        mean_p = _num(params, "mean_p", 0.0)
        if "squeeze" in params:
            return GaussianState.squeezed(_num(params, "squeeze"), hbar=hbar, mean_x=mean_x, mean_p=mean_p)
        return GaussianState(
            sigma_x=_num(params, "sigma_x"),
            sigma_p=_num(params, "sigma_p"),
            mean_x=mean_x,
            mean_p=mean_p,
            hbar=hbar,
        )

    if kind is StateKind.TRUNCATED_GAUSSIAN:
        return TruncatedGaussianState(kappa=_num(params, "kappa"), width=_num(params, "width"), hbar=hbar)

    real = params.get("psi_real")
    imag = params.get("psi_imag")
    if not isinstance(real, list) or not real:
        raise ValueError("numeric wavefunction needs a non-empty 'psi_real' list")
    if imag is None:
        imag = [0.0] * len(real)
    if not isinstance(imag, list) or len(imag) != len(real):
        raise ValueError("'psi_imag' must be a list of the same length as 'psi_real'")
    try:
        psi = np.asarray(real, dtype=float) + 1j * np.asarray(imag, dtype=float)
    except (TypeError, ValueError):
        raise ValueError("wavefunction samples must be numbers") from None
    return NumericWavefunctionState(
        x_min=_num(params, "x_min"),
        spacing=_num(params, "spacing"),
        psi=psi,
        hbar=hbar,
    )
