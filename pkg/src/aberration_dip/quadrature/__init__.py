"""
Quadrature layer.

Tensor-product rules (Gauss-Legendre, periodized trapezoid) over square and
disk domains in the transverse-wavevector plane.
"""

from .base import MIN_ORDER, Domain, GridSpec, QuadratureRule, Scheme
from .gauss_legendre import GaussLegendreRule
from .grid import (
    DEFAULT_FLOOR_ORDER,
    get_rule,
    grid_points,
    integrate_2d,
    integrate_4d,
    min_order_for,
)
from .trapezoid import TrapezoidRule

__all__ = [
    "MIN_ORDER",
    "DEFAULT_FLOOR_ORDER",
    "Domain",
    "GridSpec",
    "QuadratureRule",
    "Scheme",
    "GaussLegendreRule",
    "TrapezoidRule",
    "get_rule",
    "grid_points",
    "integrate_2d",
    "integrate_4d",
    "min_order_for",
]
