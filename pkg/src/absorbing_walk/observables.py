"""Survival, first-passage and absorption observables.

All time-dependent quantities follow from the column K(., s0; t) of the exact
propagator. The stationary quantities R(k), A(k) and the total absorption
probability come from the scattering states of the half-line.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .exceptions import InvalidArgumentError
from .propagator import SeriesConfig, TimePoint, cone_cutoff, propagator, propagator_column
from .quadrature import integrate_refined
from .resolvent import WalkParams

logger = logging.getLogger(__name__)

CROSSOVER_LIMIT = 1.0 - 2.0 / math.pi


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the absorption-probability integral.

    Attributes:
        base_nodes: Minimum number of Gauss-Legendre panels on [0, pi]
        max_refinements: Panel doublings allowed before giving up
        abs_tol: Absolute agreement required between successive doublings
    """

    base_nodes: int = 64
    max_refinements: int = 20
    abs_tol: float = 1e-12

    def __post_init__(self):
        if self.base_nodes < 2:
            raise InvalidArgumentError(f"base_nodes must be >= 2, got {self.base_nodes}")
        if self.max_refinements < 1:
            raise InvalidArgumentError("max_refinements must be >= 1")
        if not self.abs_tol > 0.0:
            raise InvalidArgumentError("abs_tol must be > 0")


@dataclass(frozen=True)
class ScatteringMode:
    """A stationary scattering state incident on the absorbing edge."""

    k: float
    energy: float
    reflection: complex
    absorbed_fraction: float
    incoming_weight: float


def _check_momentum(k: float) -> None:
    if not 0.0 < k < math.pi:
        raise InvalidArgumentError(f"momentum must lie in (0, pi), got {k}")


def _check_eta(eta: float) -> None:
    if not math.isfinite(eta) or eta < 0.0:
        raise InvalidArgumentError(f"eta must be finite and >= 0, got {eta}")


def _check_s0(s0: int) -> None:
    if s0 < 1:
        raise InvalidArgumentError(f"initial site must be >= 1, got {s0}")


def reflection_amplitude(k: float, eta: float) -> complex:
    """R(k) = -(e^{ik} - i eta) / (e^{-ik} - i eta)."""
    _check_momentum(k)
    _check_eta(eta)
    return -(cmath.exp(1j * k) - 1j * eta) / (cmath.exp(-1j * k) - 1j * eta)


def _absorbed(sin_k, eta: float):
    # 4 eta sin k / (1 + eta^2 + 2 eta sin k), written symmetric in eta <-> 1/eta
    return 4.0 * sin_k / ((eta + 1.0 / eta) + 2.0 * sin_k)


def absorption_fraction(k: float, eta: float) -> float:
    """A(k) = 1 - |R(k)|^2 = 4 eta sin k / (1 + eta^2 + 2 eta sin k)."""
    _check_momentum(k)
    _check_eta(eta)
    if eta == 0.0:
        return 0.0
    return float(_absorbed(math.sin(k), eta))


def incoming_weight(k: float, s0: int) -> float:
    """Incoming spectral density sin^2(s0 k)/pi of a walker localized at s0."""
    _check_s0(s0)
    return math.sin(s0 * k) ** 2 / math.pi


def scattering_mode(k: float, eta: float, s0: int, omega: float = 1.0) -> ScatteringMode:
    """Collect E(k), R(k), A(k) and w_in(k) for one momentum."""
    return ScatteringMode(
        k=k,
        energy=omega * (1.0 - math.cos(k)),
        reflection=reflection_amplitude(k, eta),
        absorbed_fraction=absorption_fraction(k, eta),
        incoming_weight=incoming_weight(k, s0),
    )


def absorption_probability(s0: int, eta: float, qcfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Total absorption probability (1/pi) int_0^pi sin^2(s0 k) A(k) dk.

    Invariant under eta -> 1/eta.

    Raises:
        ConvergenceError: If the refinement cap is exceeded
    """
    _check_s0(s0)
    _check_eta(eta)
    if eta == 0.0:
        return 0.0

    def integrand(k: np.ndarray) -> np.ndarray:
        return np.sin(s0 * k) ** 2 * _absorbed(np.sin(k), eta)

    panels = max(qcfg.base_nodes, 4 * s0)
    result = integrate_refined(integrand, 0.0, math.pi, panels, qcfg.abs_tol, qcfg.max_refinements)
    return float(result.value) / math.pi


def absorption_asymptote(s0: int, eta: float) -> float:
    """Leading-order P_abs: (4/pi) eta for eta < 1, 4/(pi eta) for eta > 1.

    eta = 1 returns the large-s0 crossover limit 1 - 2/pi. s0 only enters
    through validation; the asymptotes are its large-s0 limits.
    """
    _check_s0(s0)
    _check_eta(eta)
    if eta == 1.0:
        return CROSSOVER_LIMIT
    if eta < 1.0:
        return 4.0 * eta / math.pi
    return 4.0 / (math.pi * eta)


def _column_weight(s0: int, tp: TimePoint, params: WalkParams, sites: Optional[int] = None) -> np.ndarray:
    L = cone_cutoff(s0, tp.x) if sites is None else sites
    column = propagator_column(s0, tp, params, L)
    return np.abs(column) ** 2


def survival(s0: int, tp: TimePoint, params: WalkParams, cfg: SeriesConfig = SeriesConfig()) -> float:
    """S(t|s0) = sum_{s>=1} |K(s, s0; t)|^2, summed over the ballistic cone."""
    _check_s0(s0)
    if tp.t == 0.0:
        return 1.0
    return float(math.fsum(_column_weight(s0, tp, params)))


def first_passage_density(
    s0: int, tp: TimePoint, params: WalkParams, cfg: SeriesConfig = SeriesConfig()
) -> float:
    """F(t|s0) = kappa |K(1, s0; t)|^2."""
    _check_s0(s0)
    return params.kappa * abs(propagator(1, s0, tp, params, cfg)) ** 2


def survival_curve(
    s0: int, times: Iterable[float], params: WalkParams, sites: Optional[int] = None
) -> List[Tuple[float, float, float]]:
    """(t, S, F) rows for a sequence of times, one propagator column per time.

    sites replaces the ballistic-cone cutoff of the site sum when given.
    """
    _check_s0(s0)
    rows = []
    for t in times:
        tp = TimePoint.at(t, params.omega)
        if tp.t == 0.0:
            rows.append((tp.t, 1.0, params.kappa if s0 == 1 else 0.0))
            continue
        weight = _column_weight(s0, tp, params, sites)
        rows.append((tp.t, float(math.fsum(weight)), params.kappa * float(weight[0])))
    return rows


def absorption_probability_timedomain(
    s0: int, params: WalkParams, t_max: float, cfg: SeriesConfig = SeriesConfig()
) -> float:
    """P_abs from 1 - S(t_max|s0).

    Since F = -dS/dt this is the integral of F up to t_max, non-decreasing in
    t_max. At s0 = 8 and t_max = 200 it sits below absorption_probability() for
    eta = 0.5 but about 1.5e-4 above it for eta = 2.
    """
    _check_s0(s0)
    if t_max * params.omega < 1.0:
        raise InvalidArgumentError(f"t_max * omega must be >= 1, got {t_max * params.omega}")
    remaining = survival(s0, TimePoint.at(t_max, params.omega), params, cfg)
    logger.debug("time-domain P_abs s0=%d t_max=%.6g S=%.12g", s0, t_max, remaining)
    return 1.0 - remaining
