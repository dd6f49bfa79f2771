import json
import math

import numpy as np
import pytest
from click.testing import CliRunner
from scipy import stats

from cgur.states import GaussianState, TruncatedGaussianState

ENV_KEYS = (
    "HBAR",
    "MASS_TOL",
    "QUAD_ABS_TOL",
    "QUAD_REL_TOL",
    "QUAD_MAX_SUBDIVISIONS",
    "CDF_TABLE_POINTS",
    "WORKERS",
    "DB_PATH",
    "STORE_RESULTS",
    "LOG_LEVEL",
)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("DB_PATH", str(tmp_path / "data" / "results.sqlite3"))
    return monkeypatch


@pytest.fixture
def ground():
    return GaussianState.ground()


@pytest.fixture
def std_normal():
    return GaussianState(sigma_x=1.0, sigma_p=1.0)


@pytest.fixture
def truncated():
    return TruncatedGaussianState(kappa=1.0, width=2.0)


@pytest.fixture
def runner(clean_env):
    return CliRunner(mix_stderr=False)


@pytest.fixture
def write_json(tmp_path):
    def _write(name: str, payload) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write


def normal_bin_oracle(sigma: float, width: float, j, mean: float = 0.0, offset: float = 0.0):
    """Exact bin probabilities of N(mean, sigma^2) from the normal CDF."""
    j = np.asarray(j, dtype=float)
    lo = (j - 0.5) * width + offset
    hi = (j + 0.5) * width + offset
    return stats.norm.cdf(hi, loc=mean, scale=sigma) - stats.norm.cdf(lo, loc=mean, scale=sigma)


def normal_discrete_moments(sigma: float, width: float, n_bins: int = 60):
    """Brute-force discrete variance and entropy over |j| <= n_bins."""
    j = np.arange(-n_bins, n_bins + 1)
    r = normal_bin_oracle(sigma, width, j)
    r = r / r.sum()
    z = j * width
    mean = float(np.dot(r, z))
    var = float(np.dot(r, (z - mean) ** 2))
    nz = r[r > 0]
    entropy = float(-(nz * np.log(nz)).sum())
    return var, entropy


def gaussian_entropy(sigma: float) -> float:
    return 0.5 * math.log(2.0 * math.pi * math.e * sigma * sigma)
