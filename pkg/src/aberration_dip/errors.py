"""
Exception hierarchy for the aberration-dip simulator.

All library errors derive from SimulationError so callers (and the CLI) can
map them to exit codes in one place.
"""

from typing import Optional, Sequence


class SimulationError(Exception):
    """Base exception for simulator errors."""

    pass


class ZernikeDomainError(SimulationError, ValueError):
    """Invalid (n, m) pairing or a point outside the unit pupil."""

    pass


class IntegrationError(SimulationError):
    """Non-finite integrand value met during quadrature."""

    def __init__(self, message: str, point: Optional[Sequence[float]] = None):
        self.point = tuple(float(p) for p in point) if point is not None else None
        if self.point is not None:
            message = f"{message} at q={self.point}"
        super().__init__(message)


class GridMismatchError(SimulationError, ValueError):
    """Two dip curves sampled on different delay grids."""

    pass


class ConfigError(SimulationError):
    """Scenario configuration failed validation."""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.source = source
        super().__init__(self._format())

    def _format(self) -> str:
        where = self.source or "<config>"
        if self.line is not None:
            return f"{where}:{self.line}: {self.message}"
        return f"{where}: {self.message}"
