"""
Uncertainty relations and their coarse-grained counterparts, evaluated on a
pair of distributions and gathered into a URReport.

Relations checked:
  - variance relation       var_x var_p >= hbar^2 / 4
  - entropic relation       h_x + h_p >= ln(pi e hbar)
  - log-Sobolev chain       ln(2 pi e s_x s_p) >= h_x + h_p >= ln(pi e hbar)
  - coarse variance         (dvar_x + dx^2/12)(dvar_p + dp^2/12) >= hbar^2 / 4
  - discrete entropic       H[r] + H[s] >= ln(pi e hbar) - ln(dx dp)
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

from cgur.coarse import (
    BinGrid,
    DiscreteDist,
    bin_marginal,
    coarse_entropy,
    coarse_pdf,
    coarse_variance,
    discrete_entropy,
    discrete_mean,
    discrete_variance,
)
from cgur.errors import InternalInconsistency
from cgur.numerics import DEFAULT_MASS_TOL, DEFAULT_QUADRATURE, QuadratureSpec
from cgur.states import Marginal, StateModel

log = logging.getLogger(__name__)

SLACK_ANALYTIC = 1e-12
SLACK_QUADRATURE = 1e-9

_LN_PI_E = math.log(math.pi * math.e)
_TWO_PI_E = 2.0 * math.pi * math.e


@dataclass(frozen=True)
class Verdict:
    lhs: float
    bound: float
    margin: float
    satisfied: bool
    trivially_satisfied: Optional[bool] = None

    def to_dict(self) -> dict:
        out = {"lhs": self.lhs, "bound": self.bound, "margin": self.margin, "satisfied": self.satisfied}
        if self.trivially_satisfied is not None:
            out["trivially_satisfied"] = self.trivially_satisfied
        return out


@dataclass(frozen=True)
class ChainVerdict:
    upper: float
    middle: float
    lower: float
    ordered: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CoarseHURVerdict:
    lhs: float
    expanded: float
    bound: float
    margin: float
    satisfied: bool
    trivially_satisfied: bool
    resolution_x: float
    resolution_p: float
    trivial_term: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FalseViolation:
    naive_lhs: float
    bound: float
    below_hbar_bound: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _verdict(lhs: float, bound: float, slack: float, trivially: Optional[bool] = None) -> Verdict:
    lhs = float(lhs)
    bound = float(bound)
    return Verdict(
        lhs=lhs,
        bound=bound,
        margin=lhs - bound,
        satisfied=bool(lhs >= bound - slack),
        trivially_satisfied=None if trivially is None else bool(trivially),
    )


def _check_nonneg(**values: float) -> None:
    for name, v in values.items():
        if not (math.isfinite(v) and v >= 0):
            raise ValueError(f"{name} must be finite and non-negative, got {v}")


def _check_positive(**values: float) -> None:
    for name, v in values.items():
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be positive, got {v}")


# ----------------------------
# Evaluators
# ----------------------------

def eval_hur(var_x: float, var_p: float, hbar: float = 1.0, slack: float = SLACK_ANALYTIC) -> Verdict:
    _check_nonneg(var_x=var_x, var_p=var_p)
    _check_positive(hbar=hbar)
    return _verdict(var_x * var_p, hbar * hbar / 4.0, slack)


def eval_bbm(h_x: float, h_p: float, hbar: float = 1.0, slack: float = SLACK_ANALYTIC) -> Verdict:
    _check_positive(hbar=hbar)
    return _verdict(h_x + h_p, _LN_PI_E + math.log(hbar), slack)


def eval_sobolev_chain(var: float, h: float, slack: float = SLACK_ANALYTIC) -> Verdict:
    """Reversed log-Sobolev for one density: (1/2) ln(2 pi e var) >= h."""
    _check_positive(var=var)
    return _verdict(0.5 * math.log(_TWO_PI_E * var), h, slack)


def sobolev_chain(
    var_x: float,
    var_p: float,
    h_x: float,
    h_p: float,
    hbar: float = 1.0,
    slack: float = SLACK_ANALYTIC,
) -> ChainVerdict:
    _check_positive(var_x=var_x, var_p=var_p, hbar=hbar)
    upper = 0.5 * math.log(_TWO_PI_E * var_x) + 0.5 * math.log(_TWO_PI_E * var_p)
    middle = h_x + h_p
    lower = _LN_PI_E + math.log(hbar)
    return ChainVerdict(
        upper=upper,
        middle=middle,
        lower=lower,
        ordered=bool(upper >= middle - slack and middle >= lower - slack),
    )


def eval_coarse_hur(
    dvar_x: float,
    dvar_p: float,
    delta_x: float,
    delta_p: float,
    hbar: float = 1.0,
    slack: float = SLACK_ANALYTIC,
) -> CoarseHURVerdict:
    _check_nonneg(dvar_x=dvar_x, dvar_p=dvar_p)
    _check_positive(delta_x=delta_x, delta_p=delta_p, hbar=hbar)

    res_x = delta_x * delta_x / 12.0
    res_p = delta_p * delta_p / 12.0
    product = (dvar_x + res_x) * (dvar_p + res_p)
    trivial_term = res_x * res_p
    expanded = dvar_x * dvar_p + (res_x * dvar_p + res_p * dvar_x) + trivial_term

    if abs(product - expanded) > 1e-12 * max(1.0, abs(product)):
        raise InternalInconsistency(f"coarse variance product {product!r} != expanded sum {expanded!r}")

    bound = hbar * hbar / 4.0
    return CoarseHURVerdict(
        lhs=product,
        expanded=expanded,
        bound=bound,
        margin=product - bound,
        satisfied=bool(product >= bound - slack),
        trivially_satisfied=bool(trivial_term >= bound - slack),
        resolution_x=res_x,
        resolution_p=res_p,
        trivial_term=trivial_term,
    )


def eval_discrete_entropic(
    H_r: float,
    H_s: float,
    delta_x: float,
    delta_p: float,
    hbar: float = 1.0,
    slack: float = SLACK_ANALYTIC,
) -> Verdict:
    _check_nonneg(H_r=H_r, H_s=H_s)
    _check_positive(delta_x=delta_x, delta_p=delta_p, hbar=hbar)
    cell = delta_x * delta_p
    threshold = math.pi * math.e * hbar
    return _verdict(
        H_r + H_s,
        math.log(threshold) - math.log(cell),
        slack,
        trivially=cell >= threshold * (1.0 - slack),
    )


def eval_false_violation(dvar_x: float, dvar_p: float, hbar: float = 1.0) -> FalseViolation:
    bound = hbar * hbar / 4.0
    naive = float(dvar_x * dvar_p)
    return FalseViolation(naive_lhs=naive, bound=bound, below_hbar_bound=bool(naive < bound))


# ----------------------------
# Reports
# ----------------------------

@dataclass(frozen=True)
class AxisSummary:
    axis: str
    width: float
    offset: float
    first_bin: int
    n_bins: int
    tail_mass: float
    discrete_mean: float
    discrete_variance: float
    discrete_entropy: float
    resolution_variance: float
    coarse_variance: float
    coarse_entropy: float
    sobolev: Verdict
    exact_mean: Optional[float] = None
    exact_variance: Optional[float] = None
    exact_entropy: Optional[float] = None
    entropy_coarsening: Optional[bool] = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["sobolev"] = self.sobolev.to_dict()
        return out


def axis_summary(
    dist: DiscreteDist,
    marginal: Optional[Marginal] = None,
    axis: Optional[str] = None,
    slack: float = SLACK_QUADRATURE,
) -> AxisSummary:
    w = coarse_pdf(dist)
    cv = coarse_variance(w)
    ce = coarse_entropy(w)

    exact = {}
    if marginal is not None:
        exact = {
            "exact_mean": float(marginal.mean),
            "exact_variance": float(marginal.variance),
            "exact_entropy": float(marginal.entropy),
            # coarse graining never lowers differential entropy
            "entropy_coarsening": bool(ce >= marginal.entropy - slack),
        }

    return AxisSummary(
        axis=axis or (marginal.axis if marginal is not None else "?"),
        width=dist.grid.width,
        offset=dist.grid.offset,
        first_bin=dist.first,
        n_bins=int(dist.probs.size),
        tail_mass=float(dist.tail_mass),
        discrete_mean=discrete_mean(dist),
        discrete_variance=discrete_variance(dist),
        discrete_entropy=discrete_entropy(dist),
        resolution_variance=dist.grid.width**2 / 12.0,
        coarse_variance=cv,
        coarse_entropy=ce,
        sobolev=eval_sobolev_chain(cv, ce, slack),
        **exact,
    )


@dataclass(frozen=True)
class URReport:
    hbar: float
    position: AxisSummary
    momentum: Optional[AxisSummary] = None
    hur: Optional[Verdict] = None
    bbm: Optional[Verdict] = None
    sobolev_chain: Optional[ChainVerdict] = None
    coarse_hur: Optional[CoarseHURVerdict] = None
    coarse_bbm: Optional[Verdict] = None
    coarse_sobolev_chain: Optional[ChainVerdict] = None
    discrete_entropic: Optional[Verdict] = None
    false_violation: Optional[FalseViolation] = None

    KEYS = (
        "hbar",
        "position",
        "momentum",
        "hur",
        "bbm",
        "sobolev_chain",
        "coarse_hur",
        "coarse_bbm",
        "coarse_sobolev_chain",
        "discrete_entropic",
        "false_violation",
    )

    def to_dict(self) -> dict:
        out = {}
        for key in self.KEYS:
            v = getattr(self, key)
            out[key] = v.to_dict() if hasattr(v, "to_dict") else v
        return out

    def failed_theorems(self) -> list[str]:
        """Names of coarse relations that failed; each is a theorem for a valid state."""
        checks = {
            "position.sobolev": self.position.sobolev.satisfied,
            "position.entropy_coarsening": self.position.entropy_coarsening,
        }
        if self.momentum is not None:
            checks["momentum.sobolev"] = self.momentum.sobolev.satisfied
            checks["momentum.entropy_coarsening"] = self.momentum.entropy_coarsening
        if self.coarse_hur is not None:
            checks["coarse_hur"] = self.coarse_hur.satisfied
        if self.coarse_bbm is not None:
            checks["coarse_bbm"] = self.coarse_bbm.satisfied
        if self.coarse_sobolev_chain is not None:
            checks["coarse_sobolev_chain"] = self.coarse_sobolev_chain.ordered
        if self.discrete_entropic is not None:
            checks["discrete_entropic"] = self.discrete_entropic.satisfied
        return [name for name, ok in checks.items() if ok is False]

    def theorems_hold(self) -> bool:
        return not self.failed_theorems()


def report_from_distributions(
    hbar: float,
    dist_x: DiscreteDist,
    dist_p: Optional[DiscreteDist] = None,
    marginal_x: Optional[Marginal] = None,
    marginal_p: Optional[Marginal] = None,
    *,
    slack: float = SLACK_QUADRATURE,
    enforce: bool = False,
    max_tail_mass: Optional[float] = None,
) -> URReport:
    """
    URReport for a position histogram and, optionally, a momentum histogram.
    Exact-state relations are filled in only when both marginals are given.

    With enforce=True a failed coarse relation raises InternalInconsistency.
    With max_tail_mass set, a histogram leaving more than that outside its
    enumerated bins is rejected with ValueError.
    """
    _check_positive(hbar=hbar)
    if max_tail_mass is not None:
        for name, dist in (("position", dist_x), ("momentum", dist_p)):
            if dist is not None and dist.tail_mass > max_tail_mass:
                raise ValueError(
                    f"{name} histogram leaves {dist.tail_mass!r} in the tail, above the allowed {max_tail_mass!r}"
                )
    pos = axis_summary(dist_x, marginal_x, axis="x", slack=slack)
    parts: dict = {}

    if dist_p is not None:
        mom = axis_summary(dist_p, marginal_p, axis="p", slack=slack)
        parts = {
            "momentum": mom,
            "coarse_hur": eval_coarse_hur(
                pos.discrete_variance,
                mom.discrete_variance,
                dist_x.grid.width,
                dist_p.grid.width,
                hbar,
                slack,
            ),
            "coarse_bbm": eval_bbm(pos.coarse_entropy, mom.coarse_entropy, hbar, slack),
            "coarse_sobolev_chain": sobolev_chain(
                pos.coarse_variance, mom.coarse_variance, pos.coarse_entropy, mom.coarse_entropy, hbar, slack
            ),
            "discrete_entropic": eval_discrete_entropic(
                pos.discrete_entropy,
                mom.discrete_entropy,
                dist_x.grid.width,
                dist_p.grid.width,
                hbar,
                slack,
            ),
            "false_violation": eval_false_violation(pos.discrete_variance, mom.discrete_variance, hbar),
        }
        if marginal_x is not None and marginal_p is not None:
            parts["hur"] = eval_hur(marginal_x.variance, marginal_p.variance, hbar, slack)
            parts["bbm"] = eval_bbm(marginal_x.entropy, marginal_p.entropy, hbar, slack)
            parts["sobolev_chain"] = sobolev_chain(
                marginal_x.variance, marginal_p.variance, marginal_x.entropy, marginal_p.entropy, hbar, slack
            )

    report = URReport(hbar=hbar, position=pos, **parts)

    failed = report.failed_theorems()
    if failed:
        log.debug("Report: failed relations %s", failed)
        if enforce:
            raise InternalInconsistency(f"coarse relations failed for a valid state: {', '.join(failed)}")
    return report


def full_report(
    state: StateModel,
    grid_x: BinGrid,
    grid_p: Optional[BinGrid] = None,
    mass_tol: float = DEFAULT_MASS_TOL,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> URReport:
    """
    Bin both marginals of `state` and evaluate every relation. Without grid_p
    only the position side is reported. Coarse relations are theorems here,
    so any failure raises InternalInconsistency.
    """
    mx = state.position()
    dist_x = bin_marginal(mx, grid_x, mass_tol, spec)

    if grid_p is None:
        return report_from_distributions(state.hbar, dist_x, marginal_x=mx, enforce=True, max_tail_mass=mass_tol)

    mp = state.momentum()
    dist_p = bin_marginal(mp, grid_p, mass_tol, spec)
    log.debug(
        "Report: %s with dx=%g dp=%g, %d + %d bins",
        state.kind.value,
        grid_x.width,
        grid_p.width,
        dist_x.probs.size,
        dist_p.probs.size,
    )
    return report_from_distributions(state.hbar, dist_x, dist_p, mx, mp, enforce=True, max_tail_mass=mass_tol)
