"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ConfigError -> 1, NumericalError and
ReportError -> 2, AcceptanceError -> 3.
"""

from __future__ import annotations

from typing import Optional


class Error(Exception):
    pass


class ConfigError(Error, ValueError):
    """Invalid or inconsistent configuration."""
    pass


class DomainError(Error, ValueError):
    """Argument outside the domain of a pure function."""
    pass


class NumericalError(Error, ArithmeticError):
    pass


class QuadratureError(NumericalError):
    pass


class FactorizationError(NumericalError):
    pass


class SimulationError(NumericalError):
    """A trajectory produced a non-finite state."""

    def __init__(self, message: str, index: Optional[int] = None) -> None:
        super().__init__(message)
        self.index = index


class UnidentifiableEffectError(NumericalError):
    pass


class BandwidthError(NumericalError):
    pass


class ReportError(Error):
    def __init__(self, message: str, path: Optional[str] = None) -> None:
        super().__init__(f"{message} ({path})" if path else message)
        self.path = path


class AcceptanceError(Error):
    """One or more acceptance checks failed."""
    pass
