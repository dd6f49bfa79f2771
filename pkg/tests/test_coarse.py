import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from cgur.coarse import (
    BinGrid,
    DiscreteDist,
    bin_marginal,
    bin_probabilities,
    bins_intersecting,
    centered_grid,
    coarse_entropy,
    coarse_entropy_direct,
    coarse_pdf,
    coarse_variance,
    coarse_variance_direct,
    discrete_entropy,
    discrete_mean,
    discrete_variance,
    histogram_l1_error,
    histogram_sup_error,
)
from cgur.states import GaussianState, TruncatedGaussianState
from tests.conftest import gaussian_entropy, normal_bin_oracle, normal_discrete_moments

SIGMA_GROUND = math.sqrt(0.5)


# ----------------------------
# Grid
# ----------------------------

def test_bin_index_is_half_open():
    g = BinGrid(1.0)
    assert g.bin_index(0.5) == 1
    assert g.bin_index(-0.5) == 0
    assert g.bin_index(0.4999) == 0
    assert list(g.bin_index([-1.5, 0.0, 1.49])) == [-1, 0, 1]


def test_bin_grid_centers_and_edges():
    g = BinGrid(0.5, offset=0.1)
    assert g.center(2) == pytest.approx(1.1)
    lo, hi = g.edges(2)
    assert lo == pytest.approx(0.85) and hi == pytest.approx(1.35)
    assert g.shifted(2).offset == pytest.approx(1.1)


@pytest.mark.parametrize("kwargs", [{"width": 0.0}, {"width": -1.0}, {"width": math.inf}, {"width": 1.0, "offset": math.nan}])
def test_bin_grid_validates(kwargs):
    with pytest.raises(ValueError):
        BinGrid(**kwargs)


def test_centered_grid_puts_a_center_on_the_mean():
    g = centered_grid(0.5, 1.3)
    assert g.center(g.bin_index(1.3)) == pytest.approx(1.3, abs=1e-12)
    assert 0.0 <= g.offset < 0.5


def test_bins_intersecting():
    assert bins_intersecting(BinGrid(1.0), -6.0, 6.0) == 13
    assert bins_intersecting(BinGrid(1.0), 0.1, 0.2) == 1
    with pytest.raises(ValueError):
        bins_intersecting(BinGrid(1.0), 1.0, 0.0)


# ----------------------------
# Discrete distributions
# ----------------------------

def test_discrete_dist_accessors():
    d = DiscreteDist(BinGrid(1.0), -1, [0.25, 0.5, 0.25])
    assert list(d.indices) == [-1, 0, 1]
    assert d.last == 1
    assert d.prob(0) == 0.5
    assert d.prob(7) == 0.0
    assert d.as_dict() == {-1: 0.25, 0: 0.5, 1: 0.25}
    assert discrete_mean(d) == pytest.approx(0.0)
    assert discrete_variance(d) == pytest.approx(0.5)
    assert discrete_entropy(d) == pytest.approx(1.5 * math.log(2.0))


def test_discrete_dist_normalizes_by_enumerated_mass():
    d = DiscreteDist(BinGrid(1.0), 0, [0.5, 0.4], tail_mass=0.1)
    assert d.normalized().sum() == pytest.approx(1.0)


@pytest.mark.parametrize(
    "probs,tail",
    [
        ([], 0.0),
        ([0.5, -0.1, 0.6], 0.0),
        ([0.5, 0.4], 0.0),
        ([0.5, 0.5], -1e-3),
        ([0.5, math.nan], 0.5),
        ([0.0], 1.0),
    ],
)
def test_discrete_dist_validates(probs, tail):
    with pytest.raises(ValueError):
        DiscreteDist(BinGrid(1.0), 0, probs, tail)


def test_discrete_dist_from_mapping_fills_gaps():
    d = DiscreteDist.from_mapping(BinGrid(2.0), {3: 0.5, 0: 0.5})
    assert d.first == 0
    assert list(d.probs) == [0.5, 0.0, 0.0, 0.5]


def test_discrete_dist_json_record():
    data = {"width": 0.5, "offset": 0.25, "entries": [{"j": 1, "prob": 0.7}, {"j": -1, "prob": 0.3}]}
    d = DiscreteDist.from_json_dict(data)
    assert d.grid == BinGrid(0.5, 0.25)
    assert d.as_dict() == {-1: 0.3, 0: 0.0, 1: 0.7}
    again = DiscreteDist.from_json_dict(d.to_json_dict())
    assert again.as_dict() == d.as_dict()
    assert again.tail_mass == d.tail_mass


@pytest.mark.parametrize(
    "data",
    [
        {"entries": [{"j": 0, "prob": 1.0}]},
        {"width": 1.0},
        {"width": 1.0, "entries": [{"j": 0, "prob": 0.5}, {"j": 0, "prob": 0.5}]},
        {"width": 1.0, "entries": [1, 2]},
        {"width": 1.0, "entries": []},
        {"width": 0.0, "entries": [{"j": 0, "prob": 1.0}]},
        "not a record",
    ],
)
def test_discrete_dist_json_rejects_malformed(data):
    with pytest.raises(ValueError):
        DiscreteDist.from_json_dict(data)


# ----------------------------
# Binning
# ----------------------------

def test_ground_state_bins_match_normal_cdf(ground):
    d = bin_marginal(ground.position(), BinGrid(1.0))
    j = np.arange(-10, 11)
    expected = normal_bin_oracle(SIGMA_GROUND, 1.0, j)
    got = np.array([d.prob(k) for k in j])
    assert np.max(np.abs(got - expected)) < 1e-10
    assert d.probs.sum() + d.tail_mass == pytest.approx(1.0, abs=1e-12)
    assert d.tail_mass <= 1e-12


def test_quadrature_binning_matches_cdf_binning(ground):
    m = ground.position()
    by_quad = bin_marginal(dataclasses.replace(m, cdf=None), BinGrid(1.0))
    j = np.arange(-10, 11)
    expected = normal_bin_oracle(SIGMA_GROUND, 1.0, j)
    got = np.array([by_quad.prob(k) for k in j])
    assert np.max(np.abs(got - expected)) < 1e-10


def test_bins_of_centered_state_are_symmetric(ground):
    d = bin_marginal(ground.momentum(), BinGrid(0.3))
    for j in range(0, 8):
        assert d.prob(j) == pytest.approx(d.prob(-j), abs=1e-14)


def test_off_center_bins_follow_the_mean():
    s = GaussianState(sigma_x=0.4, sigma_p=2.0, mean_x=3.0)
    d = bin_marginal(s.position(), BinGrid(0.5))
    expected = normal_bin_oracle(0.4, 0.5, d.indices, mean=3.0)
    assert np.max(np.abs(d.probs - expected)) < 2e-12
    assert discrete_mean(d) == pytest.approx(3.0, abs=1e-9)


def test_truncated_state_fits_one_bin(truncated):
    d = bin_marginal(truncated.position(), BinGrid(2.0))
    assert d.probs.size == 1
    assert d.first == 0
    assert d.probs[0] == pytest.approx(1.0, abs=1e-9)
    assert d.tail_mass == 0.0


def test_truncated_bins_are_clipped_to_support(truncated):
    d = bin_marginal(truncated.position(), BinGrid(0.3))
    assert d.centers.min() - 0.15 <= -1.0
    assert d.centers.max() + 0.15 >= 1.0
    assert d.probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_offset_shift_relabels_bins(ground):
    m = ground.position()
    g = BinGrid(1.0)
    d = bin_marginal(m, g)
    shifted = bin_marginal(m, g.shifted(1))
    for j in range(-5, 6):
        assert shifted.prob(j) == pytest.approx(d.prob(j + 1), abs=1e-15)
    assert discrete_variance(shifted) == pytest.approx(discrete_variance(d), abs=1e-12)
    assert discrete_entropy(shifted) == pytest.approx(discrete_entropy(d), abs=1e-12)


def test_bin_probabilities_without_marginal():
    pdf = lambda z: 0.5 if -1.0 <= z <= 1.0 else 0.0  # noqa: E731
    d = bin_probabilities(pdf, BinGrid(0.5, offset=0.25), support=(-1.0, 1.0), breakpoints=[-1.0, 1.0])
    assert d.as_dict() == pytest.approx({-2: 0.25, -1: 0.25, 0: 0.25, 1: 0.25})


# ----------------------------
# Discrete statistics
# ----------------------------

@pytest.mark.parametrize("width", [0.25, 0.5, 1.0, 2.0])
def test_discrete_moments_match_brute_force(ground, width):
    d = bin_marginal(ground.position(), BinGrid(width))
    var, entropy = normal_discrete_moments(SIGMA_GROUND, width)
    assert discrete_variance(d) == pytest.approx(var, abs=1e-9)
    assert discrete_entropy(d) == pytest.approx(entropy, abs=1e-9)


def test_standard_normal_at_unit_width(std_normal):
    d = bin_marginal(std_normal.position(), BinGrid(1.0))
    # Sheppard: 1 + 1/12 up to exponentially small terms
    assert discrete_variance(d) == pytest.approx(1.0 + 1.0 / 12.0, abs=1e-6)


def test_negative_kappa_widens_discrete_variance():
    g = BinGrid(0.25)
    peaked = bin_marginal(TruncatedGaussianState(kappa=1.0, width=2.0).position(), g)
    hollow = bin_marginal(TruncatedGaussianState(kappa=-1.0, width=2.0).position(), g)
    assert discrete_variance(hollow) > discrete_variance(peaked)


# ----------------------------
# Histogram densities
# ----------------------------

def test_coarse_pdf_is_piecewise_constant_and_half_open():
    d = DiscreteDist(BinGrid(1.0), 0, [0.25, 0.75])
    w = coarse_pdf(d)
    assert w(-0.5) == 0.25
    assert w(0.4999) == 0.25
    assert w(0.5) == 0.75
    assert w(1.5) == 0.0
    assert w(-0.6) == 0.0
    assert list(w(np.array([0.0, 1.0, 5.0]))) == [0.25, 0.75, 0.0]
    assert w.mass() == 1.0


def test_step_curve_integrates_to_enumerated_mass(ground):
    d = bin_marginal(ground.position(), BinGrid(0.5))
    xs, ws = coarse_pdf(d).step_curve()
    assert np.all(np.diff(xs) >= 0)
    assert trapezoid(ws, xs) == pytest.approx(1.0 - d.tail_mass, abs=1e-12)


def test_single_bin_coarse_moments():
    d = DiscreteDist(BinGrid(3.0), 4, [1.0])
    w = coarse_pdf(d)
    assert coarse_variance(w) == pytest.approx(9.0 / 12.0, abs=1e-15)
    assert coarse_entropy(w) == pytest.approx(math.log(3.0), abs=1e-15)


def test_truncated_single_bin_coarse_moments(truncated):
    w = coarse_pdf(bin_marginal(truncated.position(), BinGrid(4.0)))
    assert coarse_variance(w) == pytest.approx(16.0 / 12.0, abs=1e-9)
    assert coarse_entropy(w) == pytest.approx(math.log(4.0), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(
    weights=st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=1, max_size=30),
    first=st.integers(min_value=-20, max_value=20),
    width=st.floats(min_value=0.01, max_value=10.0),
    offset=st.floats(min_value=-10.0, max_value=10.0),
)
def test_coarse_moments_decompose(weights, first, width, offset):
    probs = np.array(weights) / np.sum(weights)
    w = coarse_pdf(DiscreteDist(BinGrid(width, offset), first, probs))
    var = discrete_variance(w.source) + width**2 / 12.0
    ent = discrete_entropy(w.source) + math.log(width)
    assert coarse_variance(w) == pytest.approx(var, rel=1e-12, abs=1e-12)
    assert coarse_variance_direct(w) == pytest.approx(var, rel=1e-8, abs=1e-8)
    assert coarse_entropy(w) == pytest.approx(ent, abs=1e-12)
    assert coarse_entropy_direct(w) == pytest.approx(ent, abs=1e-8)


@pytest.mark.parametrize("width", [0.1, 0.5, 1.0, 3.0])
def test_coarse_graining_never_sharpens(ground, width):
    m = ground.position()
    w = coarse_pdf(bin_marginal(m, BinGrid(width)))
    assert coarse_entropy(w) >= m.entropy
    assert coarse_variance(w) >= m.variance


def test_fine_widths_recover_the_density(std_normal):
    m = std_normal.position()
    gaps = []
    for width in (1.0, 0.5, 0.25):
        w = coarse_pdf(bin_marginal(m, BinGrid(width)))
        gaps.append((coarse_variance(w) - 1.0, coarse_entropy(w) - gaussian_entropy(1.0)))
    var_gaps, ent_gaps = zip(*gaps)
    assert var_gaps[0] > var_gaps[1] > var_gaps[2] > 0
    assert ent_gaps[0] > ent_gaps[1] > ent_gaps[2] > 0
    # variance gap is about width^2 / 6
    assert var_gaps[2] == pytest.approx(0.0625 / 6.0, rel=1e-3)


def test_wide_bins_collapse_to_one(ground):
    m = ground.position()
    errors = []
    for width in (4.0, 8.0, 16.0):
        w = coarse_pdf(bin_marginal(m, BinGrid(width)))
        errors.append(abs(coarse_variance(w) / (width**2 / 12.0) - 1.0))
    assert errors[0] > errors[1] >= errors[2]
    w16 = coarse_pdf(bin_marginal(m, BinGrid(16.0)))
    assert w16.source.probs.size == 1
    assert coarse_variance(w16) == pytest.approx(256.0 / 12.0, rel=1e-12)
    assert coarse_entropy(w16) == pytest.approx(math.log(16.0), abs=1e-12)


# ----------------------------
# Reconstruction error
# ----------------------------

def test_reconstruction_error_shrinks_with_width(ground):
    m = ground.position()
    l1, sup = [], []
    for width in (1.0, 0.5, 0.25):
        d = bin_marginal(m, BinGrid(width))
        l1.append(histogram_l1_error(d, m.pdf))
        sup.append(histogram_sup_error(d, m.pdf))
    assert l1[0] > l1[1] > l1[2] > 0
    assert sup[0] > sup[1] > sup[2] > 0


@pytest.mark.parametrize("kappa,wider", [(1.0, True), (-1.0, False)])
def test_kappa_sign_decides_against_exact_variance(kappa, wider):
    s = TruncatedGaussianState(kappa=kappa, width=2.0)
    w = coarse_pdf(bin_marginal(s.position(), BinGrid(2.0)))
    assert discrete_variance(w.source) == 0.0
    assert coarse_variance(w) == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert (coarse_variance(w) > s.exact_variance_x()) is wider


@settings(max_examples=50, deadline=None)
@given(
    r=st.floats(min_value=-1.0, max_value=1.0),
    mean=st.floats(min_value=-2.0, max_value=2.0),
    log_a=st.floats(min_value=-2.0, max_value=2.0),
    offset=st.floats(min_value=0.0, max_value=1.0),
)
def test_gaussian_coarse_variance_decomposes(r, mean, log_a, offset):
    s = GaussianState.squeezed(r, mean_x=mean)
    width = 10.0**log_a * s.sigma_x
    w = coarse_pdf(bin_marginal(s.position(), BinGrid(width, offset * width)))
    assert abs(coarse_variance_direct(w) - (discrete_variance(w.source) + width**2 / 12.0)) <= 1e-8 * max(
        1.0, width**2
    )
