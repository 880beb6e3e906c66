"""Composite Gauss-Legendre quadrature with panel doubling.

Shared by the exact absorption integral, the momentum-space form of the line
Green function and the Bessel integral-representation oracle.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from .exceptions import ConvergenceError, InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 10


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of a refined quadrature."""

    value: complex
    error: float
    panels: int
    refinements: int


@lru_cache(maxsize=32)
def _nodes(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_gauss_legendre(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    panels: int,
    order: int = DEFAULT_ORDER,
) -> complex:
    """Integrate func over [a, b] with `panels` equal Gauss-Legendre panels.

    func must accept a 1-D array of abscissae and return an array of the same
    shape (real or complex).
    """
    if panels < 1:
        raise InvalidArgumentError(f"panels must be >= 1, got {panels}")
    nodes, weights = _nodes(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    points = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    values = np.asarray(func(points)).reshape(panels, order)
    total = np.sum(half[:, None] * weights[None, :] * values)
    return complex(total) if np.iscomplexobj(total) else float(total)


def integrate_refined(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    panels: int,
    abs_tol: float,
    max_refinements: int,
    order: int = DEFAULT_ORDER,
) -> QuadratureResult:
    """Integrate with panel doubling until two successive estimates agree.

    Raises:
        ConvergenceError: If the refinement cap is hit before abs_tol
    """
    previous = composite_gauss_legendre(func, a, b, panels, order)
    difference = float("inf")
    for refinement in range(1, max_refinements + 1):
        panels *= 2
        current = composite_gauss_legendre(func, a, b, panels, order)
        difference = abs(current - previous)
        if difference <= abs_tol:
            logger.debug(
                "quadrature converged: panels=%d refinements=%d diff=%.3e",
                panels, refinement, difference,
            )
            return QuadratureResult(current, difference, panels, refinement)
        previous = current

    raise ConvergenceError(
        f"quadrature did not reach {abs_tol:.1e} after {max_refinements} refinements "
        f"(last difference {difference:.3e})",
        achieved=difference,
    )
