"""
Base classes for quadrature rules.

Defines the abstract one-dimensional rule and the grid description shared by
the 2D and 4D integrators.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

MIN_ORDER = 8


class Scheme(str, Enum):
    """One-dimensional rule applied along each axis"""

    GAUSS_LEGENDRE = "gauss-legendre"
    TRAPEZOID = "trapezoid"


class Domain(str, Enum):
    """Shape covered by the tensor grid"""

    SQUARE = "square"
    DISK = "disk"


@dataclass(frozen=True)
class GridSpec:
    """Tensor-product grid: `order` points per axis over a domain of `radius` (rad/mm)"""

    radius: float
    order: int
    scheme: Scheme = Scheme.GAUSS_LEGENDRE
    domain: Domain = Domain.SQUARE

    def __post_init__(self) -> None:
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise ValueError(f"GridSpec.radius must be positive, got {self.radius}")
        if int(self.order) != self.order or self.order < MIN_ORDER:
            raise ValueError(f"GridSpec.order must be an integer >= {MIN_ORDER}, got {self.order}")
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "domain", Domain(self.domain))

    @property
    def points_2d(self) -> int:
        return self.order**2

    def with_order(self, order: int) -> "GridSpec":
        return GridSpec(self.radius, order, self.scheme, self.domain)

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "order": self.order,
            "scheme": self.scheme.value,
            "domain": self.domain.value,
        }


class QuadratureRule(ABC):
    """Abstract base class for one-dimensional rules on [-1, 1]."""

    scheme: Scheme

    @abstractmethod
    def nodes_weights(self, order: int) -> Tuple[np.ndarray, np.ndarray]:
        """Return `order` nodes and weights on [-1, 1]."""
        pass

    def integrate(self, values: np.ndarray, order: int) -> complex:
        """Apply the rule to samples taken at nodes_weights(order)[0]."""
        _, weights = self.nodes_weights(order)
        return complex(np.dot(weights, values))

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


__all__ = [
    "MIN_ORDER",
    "Scheme",
    "Domain",
    "GridSpec",
    "QuadratureRule",
]
