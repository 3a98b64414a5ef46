"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "LyapflowError",
    "ShapeError",
    "ModeError",
    "DivergenceError",
    "HorizonError",
    "GuaranteeError",
    "AssumptionError",
    "DataError",
    "ConfigError",
]


class LyapflowError(Exception):
    """Base class for errors raised by lyapflow."""


class ShapeError(LyapflowError):
    """An array argument has the wrong shape or a non-finite entry."""


class ModeError(LyapflowError):
    """A control law was requested for a network it does not apply to."""


class DivergenceError(LyapflowError):
    """Integration produced NaN/Inf state."""

    def __init__(self, t: float, message: str | None = None):
        self.t = t
        super().__init__(message or f"state diverged (NaN/Inf) at t={t!r}")


class HorizonError(LyapflowError):
    """The requested horizon exceeds the integration step budget."""


class GuaranteeError(LyapflowError):
    """A settling-time certificate was requested outside its validity range."""


class AssumptionError(LyapflowError):
    """Input data violates an excitation assumption (e.g. an all-zero sample)."""


class DataError(LyapflowError):
    """A dataset file is malformed."""


class ConfigError(LyapflowError):
    """One or more configuration entries failed validation."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))
