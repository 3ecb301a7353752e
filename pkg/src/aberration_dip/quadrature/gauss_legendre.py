"""
Gauss-Legendre rule

Nodes come from scipy and are symmetrized so that odd integrands cancel
pairwise on the grid.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_legendre

from .base import QuadratureRule, Scheme


@lru_cache(maxsize=64)
def _gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(order)
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


class GaussLegendreRule(QuadratureRule):
    """Tensor Gauss-Legendre; exact for polynomials of degree 2*order - 1 per axis"""

    scheme = Scheme.GAUSS_LEGENDRE

    def nodes_weights(self, order: int) -> Tuple[np.ndarray, np.ndarray]:
        return _gauss_legendre(int(order))
