"""
Uniform trapezoid rule in a periodizing variable

The interval [-1, 1] is reached through s(v) = v + 4/(3 pi) sin(pi v)
+ 1/(6 pi) sin(2 pi v), whose derivative (8/3) cos^4(pi v / 2) vanishes to
fourth order at both ends. The uniform trapezoid rule in v then keeps its
fast convergence on integrands that are smooth but not periodic.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np

from .base import QuadratureRule, Scheme


def periodizing_map(v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """s(v) and ds/dv"""
    s = v + 4.0 / (3.0 * np.pi) * np.sin(np.pi * v) + 1.0 / (6.0 * np.pi) * np.sin(2.0 * np.pi * v)
    ds = (8.0 / 3.0) * np.cos(0.5 * np.pi * v) ** 4
    return s, ds


@lru_cache(maxsize=64)
def _trapezoid(order: int) -> Tuple[np.ndarray, np.ndarray]:
    v = np.linspace(-1.0, 1.0, order)
    h = 2.0 / (order - 1)
    s, ds = periodizing_map(v)
    weights = h * ds
    weights[0] *= 0.5
    weights[-1] *= 0.5
    # Mirror exactly so that the grid is symmetric about 0
    s = 0.5 * (s - s[::-1])
    weights = 0.5 * (weights + weights[::-1])
    s.setflags(write=False)
    weights.setflags(write=False)
    return s, weights


class TrapezoidRule(QuadratureRule):
    """Composite trapezoid on a uniform grid in the periodizing variable"""

    scheme = Scheme.TRAPEZOID

    def nodes_weights(self, order: int) -> Tuple[np.ndarray, np.ndarray]:
        return _trapezoid(int(order))
