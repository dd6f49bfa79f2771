from __future__ import annotations


class CoarseGrainError(Exception):
    """Base class for every failure raised by cgur."""


class MomentumUndefined(CoarseGrainError):
    """The state only carries a position density."""


class ToleranceNotMet(CoarseGrainError):
    def __init__(self, message: str, value: float = float("nan"), err_est: float = float("inf")):
        super().__init__(f"{message} (best estimate {value!r}, error estimate {err_est!r})")
        self.value = value
        self.err_est = err_est


class InternalInconsistency(CoarseGrainError):
    """Two independent computations disagree, or a relation that must hold did not."""


class SearchExhausted(CoarseGrainError):
    pass


class StateFileError(CoarseGrainError, ValueError):
    """Malformed state or histogram file."""
