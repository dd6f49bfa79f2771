import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

from cgur.numerics import QuadratureSpec

load_dotenv()


def _get_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "y", "on")


def _get_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        raise RuntimeError(f"Invalid {name} in .env: {raw!r} is not a number") from None


def _get_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise RuntimeError(f"Invalid {name} in .env: {raw!r} is not an integer") from None


@dataclass(frozen=True)
class Config:
    hbar: float
    mass_tol: float

    quad_abs_tol: float
    quad_rel_tol: float
    quad_max_subdivisions: int

    cdf_table_points: int
    workers: int

    db_path: str
    store_results: bool
    log_level: str

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(
            abs_tol=self.quad_abs_tol,
            rel_tol=self.quad_rel_tol,
            max_subdivisions=self.quad_max_subdivisions,
        )


def load_config() -> Config:
    hbar = _get_float("HBAR", 1.0)
    if not hbar > 0:
        raise RuntimeError("Invalid HBAR in .env: must be positive")

    mass_tol = _get_float("MASS_TOL", 1e-12)
    if not 0 < mass_tol < 1:
        raise RuntimeError("Invalid MASS_TOL in .env: must lie in (0, 1)")

    quad_abs_tol = _get_float("QUAD_ABS_TOL", 1e-10)
    quad_rel_tol = _get_float("QUAD_REL_TOL", 1e-10)
    if not (quad_abs_tol > 0 and quad_rel_tol > 0):
        raise RuntimeError("Invalid QUAD_ABS_TOL / QUAD_REL_TOL in .env: must be positive")

    quad_max_subdivisions = _get_int("QUAD_MAX_SUBDIVISIONS", 200)
    if quad_max_subdivisions < 1:
        raise RuntimeError("Invalid QUAD_MAX_SUBDIVISIONS in .env: must be >= 1")

    cdf_table_points = _get_int("CDF_TABLE_POINTS", 16385)
    if cdf_table_points < 3:
        raise RuntimeError("Invalid CDF_TABLE_POINTS in .env: must be >= 3")

    workers = _get_int("WORKERS", 1)
    if workers < 1:
        raise RuntimeError("Invalid WORKERS in .env: must be >= 1")

    db_path = os.getenv("DB_PATH", "./data/results.sqlite3").strip()
    if not db_path:
        raise RuntimeError("Invalid DB_PATH in .env: empty path")

    log_level = os.getenv("LOG_LEVEL", "WARNING").strip().upper() or "WARNING"
    if not isinstance(logging.getLevelName(log_level), int):
        raise RuntimeError(f"Invalid LOG_LEVEL in .env: {log_level!r}")

    return Config(
        hbar=hbar,
        mass_tol=mass_tol,
        quad_abs_tol=quad_abs_tol,
        quad_rel_tol=quad_rel_tol,
        quad_max_subdivisions=quad_max_subdivisions,
        cdf_table_points=cdf_table_points,
        workers=workers,
        db_path=db_path,
        store_results=_get_bool("STORE_RESULTS", False),
        log_level=log_level,
    )
