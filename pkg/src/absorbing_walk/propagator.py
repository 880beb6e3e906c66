"""Exact time-domain propagator K_kappa(s, s0; t) of the absorbing walk.

The propagator is the hard-wall (method of images) Bessel pair plus a series
that resums returns to the absorbing edge site:

- weak regime (eta <= 1): K = K_D + 2 eta i^N e^{-ix} sum_{r>=0} (-eta)^r a_{N+r}
- strong regime (eta > 1): K = K_cont + K_pole with
  K_cont = K_D + 2 i^N e^{-ix} sum_{r>=1} (-1)^{r+1} eta^{1-r} a_{N-r}

where N = s + s0, x = Omega*t and a_m = (m/x) J_m(x) = (J_{m-1} + J_{m+1})/2.

Scalar functions evaluate one matrix element with an explicitly truncated
series. propagator_column() evaluates a whole column from one Bessel row using
the order recurrences of the two series, and is what the observables use.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .exceptions import ConvergenceError, InvalidArgumentError, RegimeError
from .resolvent import WalkParams, boundary_pole
from .special_functions import BesselRow, bessel_j_row

logger = logging.getLogger(__name__)

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

# Below this x the recurrence-compacted a_m = (m/x) J_m is replaced by the pair form.
SMALL_X = 1e-8
# Weak-series stop rule only applies past the Bessel turning point by this many orders.
TURNING_MARGIN = 10
NORM_SLACK = 1e-10


def i_power(n: int) -> complex:
    """i**n for any integer n, by table lookup."""
    return _I_POWERS[n % 4]


def cone_buffer(x: float) -> int:
    """Sites kept beyond the ballistic cone |s - s0| <= x."""
    return max(20, math.ceil(6.0 * x ** (1.0 / 3.0)))


def cone_cutoff(s0: int, x: float) -> int:
    """Last site that carries non-negligible weight at time x = Omega*t."""
    return s0 + math.ceil(x) + cone_buffer(x)


def _bessel_margin(x: float) -> int:
    # Orders beyond max(top, x) + margin have |J| below ~1e-17.
    return max(30, math.ceil(12.0 * x ** (1.0 / 3.0)))


def bessel_row_for(x: float, top_order: int) -> BesselRow:
    """Bessel row deep enough for series that start at orders up to top_order."""
    return bessel_j_row(x, max(top_order, math.ceil(x)) + _bessel_margin(x))


@dataclass(frozen=True)
class TimePoint:
    """A time and its dimensionless Bessel argument x = Omega*t."""

    t: float
    x: float

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0.0:
            raise InvalidArgumentError(f"time must be finite and >= 0, got {self.t}")
        if not math.isfinite(self.x) or self.x < 0.0:
            raise InvalidArgumentError(f"x must be finite and >= 0, got {self.x}")

    @classmethod
    def at(cls, t: float, omega: float) -> "TimePoint":
        """Time point for hopping rate omega."""
        return cls(t=float(t), x=float(omega) * float(t))


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation controls for the infinite Bessel series.

    Attributes:
        tol: Relative tail tolerance
        max_terms: Hard cap on the number of series terms
    """

    tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.tol < 1.0:
            raise InvalidArgumentError(f"tol must lie in (0, 1), got {self.tol}")
        if self.max_terms < 1:
            raise InvalidArgumentError(f"max_terms must be >= 1, got {self.max_terms}")


@dataclass(frozen=True)
class SeriesResult:
    """Value of a truncated series and the number of terms summed."""

    value: float
    terms: int


@dataclass
class AmplitudeVector:
    """Complex amplitudes psi_s on sites s = 1..L.

    amplitudes[0] holds site 1.
    """

    amplitudes: np.ndarray
    params: Optional[WalkParams] = None

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 1 or self.amplitudes.size == 0:
            raise InvalidArgumentError("amplitudes must be a non-empty 1-D array")

    @property
    def L(self) -> int:
        """Truncation site."""
        return int(self.amplitudes.size)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def support(self) -> int:
        """Highest site with a non-zero amplitude (0 when empty)."""
        nonzero = np.flatnonzero(self.amplitudes)
        return int(nonzero[-1]) + 1 if nonzero.size else 0

    def at_site(self, s: int) -> complex:
        """psi_s, zero beyond the truncation site."""
        if s < 1:
            raise InvalidArgumentError(f"sites start at 1, got {s}")
        return complex(self.amplitudes[s - 1]) if s <= self.L else 0.0j

    @classmethod
    def localized(cls, s0: int, L: Optional[int] = None,
                  params: Optional[WalkParams] = None) -> "AmplitudeVector":
        """delta_{s, s0} on sites 1..L (L defaults to s0)."""
        if s0 < 1:
            raise InvalidArgumentError(f"initial site must be >= 1, got {s0}")
        size = s0 if L is None else L
        if size < s0:
            raise InvalidArgumentError(f"L = {size} does not contain site {s0}")
        amplitudes = np.zeros(size, dtype=complex)
        amplitudes[s0 - 1] = 1.0
        return cls(amplitudes, params)

    @classmethod
    def from_sites(cls, values: Dict[int, complex],
                   params: Optional[WalkParams] = None) -> "AmplitudeVector":
        """Build from a {site: amplitude} mapping."""
        if not values:
            raise InvalidArgumentError("initial state has empty support")
        if min(values) < 1:
            raise InvalidArgumentError("sites start at 1")
        amplitudes = np.zeros(max(values), dtype=complex)
        for site, value in values.items():
            amplitudes[site - 1] = value
        return cls(amplitudes, params)


def _check_sites(s: int, s0: int) -> None:
    if s < 1 or s0 < 1:
        raise InvalidArgumentError(f"sites must be >= 1 (got s={s}, s0={s0})")


def _check_time(tp: TimePoint, params: WalkParams) -> None:
    if abs(tp.x - params.omega * tp.t) > 1e-12 * max(1.0, tp.x):
        raise InvalidArgumentError(
            f"time point x = {tp.x} does not match omega*t = {params.omega * tp.t}"
        )


def _scaled(row: BesselRow, m: int) -> float:
    """a_m = (m/x) J_m(x), switching to (J_{m-1} + J_{m+1})/2 as x -> 0."""
    if row.x < SMALL_X:
        return 0.5 * (row.order(m - 1) + row.order(m + 1))
    return (m / row.x) * row.order(m)


def _hard_wall(s: int, s0: int, row: BesselRow) -> complex:
    # phase-free hard-wall amplitude Phi^D
    return i_power(s - s0) * row.order(s - s0) - i_power(s + s0) * row.order(s + s0)


def hard_wall_propagator(s: int, s0: int, tp: TimePoint) -> complex:
    """K_D(s, s0; t) = e^{-ix}[i^{s-s0} J_{s-s0}(x) - i^{s+s0} J_{s+s0}(x)]."""
    _check_sites(s, s0)
    row = bessel_j_row(tp.x, s + s0)
    return cmath.exp(-1j * tp.x) * _hard_wall(s, s0, row)


def q_power_inverse(m: int, tp: TimePoint, omega: float) -> complex:
    """Inverse Laplace transform of q(z)**m at t > 0.

    -(Omega/2) e^{-ix} i^{m-1} [J_{m-1}(x) + J_{m+1}(x)]
    """
    row = bessel_j_row(tp.x, abs(m) + 1)
    pair = row.order(m - 1) + row.order(m + 1)
    return -0.5 * omega * cmath.exp(-1j * tp.x) * i_power(m - 1) * pair


def weak_series(N: int, row: BesselRow, eta: float, cfg: SeriesConfig) -> SeriesResult:
    """sum_{r>=0} (-eta)^r a_{N+r}, truncated past the turning point.

    Raises:
        ConvergenceError: If max_terms or the Bessel row is exhausted
    """
    partial = 0.0
    weight = 1.0
    for r in range(cfg.max_terms):
        m = N + r
        if m + 1 > row.n_max:
            raise ConvergenceError(f"weak series ran past Bessel row at order {m}")
        term = weight * _scaled(row, m)
        partial += term
        if m > row.x + TURNING_MARGIN and abs(term) <= cfg.tol * abs(partial):
            return SeriesResult(partial, r + 1)
        weight *= -eta
    raise ConvergenceError(f"weak series did not converge in {cfg.max_terms} terms")


def strong_series(N: int, row: BesselRow, eta: float, cfg: SeriesConfig) -> SeriesResult:
    """sum_{r>=1} (-1)^{r+1} eta^{1-r} a_{N-r}; negative orders by reflection.

    Raises:
        ConvergenceError: If max_terms or the Bessel row is exhausted
    """
    x = row.x
    partial = 0.0
    weight = 1.0
    for r in range(1, cfg.max_terms + 1):
        m = N - r
        if abs(m) + 1 > row.n_max:
            raise ConvergenceError(f"strong series ran past Bessel row at order {m}")
        term = weight * _scaled(row, m)
        partial += term
        threshold = cfg.tol * abs(partial)
        if x > 0.0 and eta ** (1 - r) * (abs(m) + x) / x < threshold:
            return SeriesResult(partial, r)
        if abs(m) > x + TURNING_MARGIN and abs(term) <= threshold:
            return SeriesResult(partial, r)
        weight *= -1.0 / eta
    raise ConvergenceError(f"strong series did not converge in {cfg.max_terms} terms")


def weak_propagator(
    s: int, s0: int, tp: TimePoint, params: WalkParams, cfg: SeriesConfig = SeriesConfig()
) -> complex:
    """Weak-regime propagator (eta <= 1), compact Bessel form.

    Raises:
        RegimeError: If eta > 1
    """
    _check_sites(s, s0)
    _check_time(tp, params)
    eta = params.eta
    if eta > 1.0:
        raise RegimeError(f"weak_propagator needs eta <= 1, got {eta}")
    if tp.t == 0.0:
        return complex(1.0 if s == s0 else 0.0)

    N = s + s0
    row = bessel_row_for(tp.x, N)
    phase = cmath.exp(-1j * tp.x)
    value = _hard_wall(s, s0, row)
    if eta > 0.0:
        series = weak_series(N, row, eta, cfg)
        logger.debug("weak series N=%d x=%.6g terms=%d", N, tp.x, series.terms)
        value += 2.0 * eta * i_power(N) * series.value
    return phase * value


def weak_propagator_bessel_pairs(
    s: int, s0: int, tp: TimePoint, params: WalkParams, cfg: SeriesConfig = SeriesConfig()
) -> complex:
    """Weak-regime propagator with the uncompacted [J_{m-1} + J_{m+1}] terms."""
    _check_sites(s, s0)
    _check_time(tp, params)
    eta = params.eta
    if eta > 1.0:
        raise RegimeError(f"weak propagator needs eta <= 1, got {eta}")
    N = s + s0
    row = bessel_row_for(tp.x, N)
    total = 0.0
    weight = 1.0
    for r in range(cfg.max_terms):
        m = N + r
        term = weight * (row.order(m - 1) + row.order(m + 1))
        total += term
        if m > tp.x + TURNING_MARGIN and abs(term) <= cfg.tol * abs(total):
            break
        weight *= -eta
    else:
        raise ConvergenceError(f"weak series did not converge in {cfg.max_terms} terms")
    boundary = eta * i_power(N) * total
    return cmath.exp(-1j * tp.x) * (_hard_wall(s, s0, row) + boundary)


def strong_continuum(
    s: int, s0: int, tp: TimePoint, params: WalkParams, cfg: SeriesConfig = SeriesConfig()
) -> complex:
    """Continuum (branch-cut) part of the strong-regime propagator, t > 0.

    Raises:
        RegimeError: If eta <= 1
        InvalidArgumentError: If t = 0
    """
    _check_sites(s, s0)
    _check_time(tp, params)
    eta = params.eta
    if eta <= 1.0:
        raise RegimeError(f"strong_continuum needs eta > 1, got {eta}")
    if tp.t == 0.0:
        raise InvalidArgumentError("strong_continuum is defined for t > 0")

    N = s + s0
    row = bessel_row_for(tp.x, N)
    series = strong_series(N, row, eta, cfg)
    logger.debug("strong series N=%d x=%.6g terms=%d", N, tp.x, series.terms)
    value = _hard_wall(s, s0, row) + 2.0 * i_power(N) * series.value
    return cmath.exp(-1j * tp.x) * value


def _pole_amplitude(N: int, eta: float) -> complex:
    # (1 - q_p^2) q_p^{N-2} with q_p = -i/eta
    return (1.0 + 1.0 / (eta * eta)) * i_power(2 - N) * eta ** (2 - N)


def pole_propagator(s: int, s0: int, tp: TimePoint, params: WalkParams) -> complex:
    """Boundary-mode contribution (1 - q_p^2) q_p^{s+s0-2} e^{-i z_p t}.

    Raises:
        RegimeError: If eta <= 1 (no pole)
    """
    _check_sites(s, s0)
    _check_time(tp, params)
    pole = boundary_pole(params)
    if pole is None:
        raise RegimeError(f"no boundary pole for eta = {params.eta} <= 1")
    return _pole_amplitude(s + s0, params.eta) * cmath.exp(-1j * pole.z_p * tp.t)


def propagator(
    s: int, s0: int, tp: TimePoint, params: WalkParams, cfg: SeriesConfig = SeriesConfig()
) -> complex:
    """K_kappa(s, s0; t), dispatching on the regime.

    eta <= 1 uses the weak series (including eta = 1); eta > 1 adds the pole
    to the continuum series. t = 0 returns delta_{s, s0} exactly.
    """
    _check_sites(s, s0)
    _check_time(tp, params)
    if tp.t == 0.0:
        return complex(1.0 if s == s0 else 0.0)
    if params.eta <= 1.0:
        return weak_propagator(s, s0, tp, params, cfg)
    return strong_continuum(s, s0, tp, params, cfg) + pole_propagator(s, s0, tp, params)


@dataclass(frozen=True)
class PropagatorSplit:
    """Column K(., s0; t) on sites 1..L split into two pieces.

    Weak regime: first = Phi^D (hard wall), second = Phi^B (boundary returns),
    both without the common phase, and phase = e^{-ix}.
    Strong regime: first = K_cont, second = K_pole, and phase = 1.
    The column itself is phase * (first + second).
    """

    regime: str
    first: np.ndarray
    second: np.ndarray
    phase: complex = field(default=1.0 + 0.0j)

    @property
    def column(self) -> np.ndarray:
        return self.phase * (self.first + self.second)


def _scaled_range(row: BesselRow, lo: int, hi: int) -> np.ndarray:
    return np.array([_scaled(row, m) for m in range(lo, hi + 1)])


def propagator_split(s0: int, tp: TimePoint, params: WalkParams, L: int) -> PropagatorSplit:
    """Evaluate the two propagator pieces for s = 1..L from one Bessel row.

    The series are summed through their order recurrences,
    S_N = a_N - eta S_{N+1} (weak, downward) and
    T_N = a_{N-1} - T_{N-1}/eta (strong, upward).
    """
    if s0 < 1 or L < 1:
        raise InvalidArgumentError(f"need s0 >= 1 and L >= 1 (got {s0}, {L})")
    _check_time(tp, params)
    eta = params.eta
    sites = np.arange(1, L + 1)
    N = sites + s0
    strong = eta > 1.0
    regime = "strong" if strong else "weak"

    if tp.t == 0.0:
        delta = (sites == s0).astype(complex)
        if not strong:
            return PropagatorSplit(regime, delta, np.zeros(L, dtype=complex))
        # t -> 0+ limit: the continuum carries delta minus the pole's initial profile
        pole = np.array([_pole_amplitude(int(n), eta) for n in N])
        return PropagatorSplit(regime, delta - pole, pole)

    row = bessel_row_for(tp.x, s0 + L + 1)
    i_n = np.array([i_power(int(n)) for n in N])
    hard = np.array([_hard_wall(int(s), s0, row) for s in sites])
    phase = cmath.exp(-1j * tp.x)

    if not strong:
        top = row.n_max - 1
        a = _scaled_range(row, s0 + 1, top)
        tail = np.zeros(a.size + 1)
        for j in range(a.size - 1, -1, -1):
            tail[j] = a[j] - eta * tail[j + 1]
        boundary = 2.0 * eta * i_n * tail[:L]
        return PropagatorSplit(regime, hard.astype(complex), boundary, phase)

    # strong: seed T at N = s0 + 1 by direct summation down to negative orders
    depth = row.n_max - 1
    seed = 0.0
    weight = 1.0
    n_first = s0 + 1
    for r in range(1, n_first + depth + 1):
        m = n_first - r
        if abs(m) > depth:
            break
        seed += weight * _scaled(row, m)
        weight *= -1.0 / eta
    series = np.empty(L)
    series[0] = seed
    for j in range(1, L):
        series[j] = _scaled(row, int(N[j]) - 1) - series[j - 1] / eta
    continuum = phase * (hard + 2.0 * i_n * series)
    pole = np.array([_pole_amplitude(int(n), eta) for n in N])
    pole = pole * cmath.exp(-1j * boundary_pole(params).z_p * tp.t)
    return PropagatorSplit(regime, continuum, pole)


def propagator_column(s0: int, tp: TimePoint, params: WalkParams, L: int) -> np.ndarray:
    """K_kappa(s, s0; t) for s = 1..L (index s - 1)."""
    return propagator_split(s0, tp, params, L).column


def _output_size(support: int, tp: TimePoint) -> int:
    return support + math.ceil(tp.x) + cone_buffer(tp.x)


def _propagator_matrix(sources: np.ndarray, tp: TimePoint, params: WalkParams,
                       L_out: int, L_in: int) -> np.ndarray:
    matrix = np.zeros((L_out, L_in), dtype=complex)
    for u in sources:
        matrix[:, u] = propagator_column(int(u) + 1, tp, params, L_out)
    return matrix


def propagate_state(
    initial: AmplitudeVector, tp: TimePoint, params: WalkParams, cfg: SeriesConfig = SeriesConfig()
) -> AmplitudeVector:
    """psi_s(t) = sum_u K(s, u; t) psi_u(0) on sites 1..L_out.

    L_out is the highest occupied initial site plus the ballistic cone and its
    buffer. cfg is accepted for API symmetry; columns are summed by recurrence.

    Raises:
        InvalidArgumentError: For empty support or a non-normalized state
    """
    support = initial.support
    if support == 0:
        raise InvalidArgumentError("initial state has empty support")
    norm = initial.norm_squared
    if abs(norm - 1.0) > NORM_SLACK:
        raise InvalidArgumentError(f"initial state must be normalized, norm^2 = {norm}")
    _check_time(tp, params)
    if tp.t == 0.0:
        return AmplitudeVector(initial.amplitudes.copy(), params)

    L_out = _output_size(support, tp)
    sources = np.flatnonzero(initial.amplitudes)
    matrix = _propagator_matrix(sources, tp, params, L_out, initial.L)
    evolved = matrix @ initial.amplitudes
    logger.debug("propagated %d source sites onto %d sites at x=%.6g", sources.size, L_out, tp.x)
    return AmplitudeVector(evolved, params)


def propagate_density(rho0: np.ndarray, tp: TimePoint, params: WalkParams) -> np.ndarray:
    """Reduced density matrix rho(t) = K rho(0) K^dagger of the surviving sector.

    rho0 is indexed from site 1 and must be square with unit trace.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim != 2 or rho0.shape[0] != rho0.shape[1] or rho0.shape[0] == 0:
        raise InvalidArgumentError("rho0 must be a non-empty square matrix")
    if abs(np.trace(rho0).real - 1.0) > NORM_SLACK:
        raise InvalidArgumentError(f"rho0 must have unit trace, got {np.trace(rho0)}")
    _check_time(tp, params)
    if tp.t == 0.0:
        return rho0.copy()

    occupied = np.flatnonzero(np.any(rho0 != 0, axis=0) | np.any(rho0 != 0, axis=1))
    support = int(occupied[-1]) + 1
    L_out = _output_size(support, tp)
    matrix = _propagator_matrix(occupied, tp, params, L_out, rho0.shape[0])
    return matrix @ rho0 @ matrix.conj().T
