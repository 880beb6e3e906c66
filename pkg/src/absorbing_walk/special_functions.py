"""Integer-order Bessel functions of the first kind.

Every propagator series in this package is a sum of J_n(x) with x = Omega*t,
so this module is the only transcendental ingredient. Rows J_0..J_nmax are
produced by Miller's downward recurrence and normalized with the identity
J_0(x) + 2*sum_k J_2k(x) = 1.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from .exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

# Rescale the unnormalized downward recurrence before it can overflow.
_RESCALE_ABOVE = 1e250
_RESCALE_BY = 1e-250
# Below this argument two terms of the power series are exact to rounding.
_SERIES_BELOW = 1e-6


@dataclass(frozen=True)
class BesselRow:
    """J_0(x) .. J_{n_max}(x) for a single argument.

    Attributes:
        x: Real argument (x = Omega*t >= 0)
        values: Read-only array of length n_max + 1
        n_max: Highest stored order
    """

    x: float
    values: np.ndarray
    n_max: int

    def __len__(self) -> int:
        return self.n_max + 1

    def order(self, n: int) -> float:
        """Return J_n(x) for any integer n with |n| <= n_max.

        Negative orders use J_{-n}(x) = (-1)^n J_n(x).

        Raises:
            InvalidArgumentError: If |n| exceeds the stored range
        """
        m = abs(n)
        if m > self.n_max:
            raise InvalidArgumentError(f"Order {n} outside stored row (n_max={self.n_max})")
        value = float(self.values[m])
        if n < 0 and m % 2 == 1:
            return -value
        return value


def start_order(x: float, n_max: int) -> int:
    """Order at which the downward recurrence is seeded."""
    margin = max(16, math.ceil(10.0 * math.sqrt(n_max + x)))
    return max(n_max, math.ceil(x)) + margin


def _series_row(x: float, n_max: int) -> Tuple[float, ...]:
    # J_n = (x/2)^n/n! [1 - (x/2)^2/(n+1) + O(x^4)]
    half = 0.5 * x
    correction = half * half
    values = []
    lead = 1.0
    for n in range(n_max + 1):
        if n > 0:
            lead *= half / n
        values.append(lead * (1.0 - correction / (n + 1)))
    return tuple(values)


@lru_cache(maxsize=4096)
def _miller_row(x: float, n_max: int) -> Tuple[float, ...]:
    if x == 0.0:
        return (1.0,) + (0.0,) * n_max
    if x < _SERIES_BELOW:
        return _series_row(x, n_max)

    n_start = start_order(x, n_max)
    two_over_x = 2.0 / x
    # values[n] for n = 0..n_start, filled from the top
    values = [0.0] * (n_start + 2)
    values[n_start + 1] = 0.0
    values[n_start] = 1e-30
    for n in range(n_start, 0, -1):
        if abs(values[n]) * n * two_over_x > _RESCALE_ABOVE:
            for j in range(n, n_start + 1):
                values[j] *= _RESCALE_BY
        values[n - 1] = n * two_over_x * values[n] - values[n + 1]

    norm = values[0] + 2.0 * math.fsum(values[2:n_start + 1:2])
    return tuple(v / norm for v in values[: n_max + 1])


def bessel_j_row(x: float, n_max: int) -> BesselRow:
    """Compute J_0(x) .. J_{n_max}(x).

    Args:
        x: Argument, finite and >= 0
        n_max: Highest order, >= 0

    Returns:
        BesselRow with n_max + 1 entries

    Raises:
        InvalidArgumentError: For non-finite or negative x, or negative n_max
    """
    if not math.isfinite(x) or x < 0.0:
        raise InvalidArgumentError(f"Bessel argument must be finite and >= 0, got {x}")
    if n_max < 0:
        raise InvalidArgumentError(f"n_max must be >= 0, got {n_max}")

    values = np.array(_miller_row(float(x), int(n_max)), dtype=float)
    values.setflags(write=False)
    return BesselRow(x=float(x), values=values, n_max=int(n_max))


def bessel_j(n: int, x: float) -> float:
    """Return J_n(x) for an integer order of either sign.

    Raises:
        InvalidArgumentError: For non-finite or negative x
    """
    row = bessel_j_row(x, abs(n))
    return row.order(n)
