"""Doubled-lattice Wigner function of the surviving sector.

W_+(m, k, t) = (1/2pi) sum_{n=1}^{m-1} rho_{n, m-n}(t) e^{-i(2n-m)k},  m >= 2,

with m = s + s' the doubled mean coordinate. For a pure state
rho_{ss'} = psi_s psi*_{s'}. The field is real because rho is Hermitian; the
imaginary residue of the complex sum is checked and then dropped.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .exceptions import ConsistencyError, InvalidArgumentError, RegimeError
from .propagator import (
    AmplitudeVector,
    SeriesConfig,
    TimePoint,
    i_power,
    propagator_split,
)
from .resolvent import WalkParams, boundary_pole

logger = logging.getLogger(__name__)

IMAG_LIMIT = 1e-9
# |1 - alpha| below this takes the m - 1 limit of the geometric ratio.
ALPHA_GUARD = 1e-8

WEAK_CHANNELS = ("DD", "DB+BD", "BB")
STRONG_CHANNELS = ("cc", "cp+pc", "pp")


def k_grid(k_nodes: int) -> np.ndarray:
    """Periodic grid k_j = -pi + 2 pi j / K, j = 0..K-1."""
    if k_nodes < 4:
        raise InvalidArgumentError(f"k_nodes must be >= 4, got {k_nodes}")
    return -math.pi + 2.0 * math.pi * np.arange(k_nodes) / k_nodes


@dataclass
class WignerField:
    """W_+(m, k, t) on m = 2..m_max and a periodic k grid.

    total has shape (len(m_values), len(k_values)); channels, when present,
    have the same shape and sum to total.
    """

    m_values: np.ndarray
    k_values: np.ndarray
    total: np.ndarray
    time: TimePoint
    channels: Dict[str, np.ndarray] = field(default_factory=dict)
    imag_residue: float = 0.0

    @property
    def x_c(self) -> np.ndarray:
        """Mean position (s + s')/2 for each m."""
        return self.m_values / 2.0

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.k_values.size

    def k_marginal(self) -> np.ndarray:
        """dk-weighted sum over k for each m (rho_{m/2, m/2} at even m, 0 at odd m)."""
        return self.dk * self.total.sum(axis=1)

    def trace(self) -> float:
        """sum_m int dk W, the surviving probability carried by the grid."""
        return float(math.fsum(self.k_marginal()))


def _check_grid(m_max: int, k_nodes: int) -> None:
    if m_max < 2:
        raise InvalidArgumentError(f"m_max must be >= 2, got {m_max}")
    if k_nodes < 4:
        raise InvalidArgumentError(f"k_nodes must be >= 4, got {k_nodes}")


def _bilinear_grid(left: np.ndarray, right: np.ndarray, m_values: np.ndarray,
                   k_values: np.ndarray) -> np.ndarray:
    """Complex (1/2pi) sum_n left_n conj(right_{m-n}) e^{-i(2n-m)k} for every (m, k).

    left and right are indexed from site 1 and may be shorter than m_max - 1.
    """
    grid = np.zeros((m_values.size, k_values.size), dtype=complex)
    size = min(left.size, right.size)
    for row, m in enumerate(m_values):
        n = np.arange(max(1, m - size), min(m - 1, size) + 1)
        if n.size == 0:
            continue
        products = left[n - 1] * np.conj(right[m - n - 1])
        phases = np.exp(-1j * np.outer(2 * n - m, k_values))
        grid[row] = products @ phases
    return grid / (2.0 * math.pi)


def _realify(grid: np.ndarray) -> Tuple[np.ndarray, float]:
    residue = float(np.max(np.abs(grid.imag))) if grid.size else 0.0
    if residue > IMAG_LIMIT:
        raise ConsistencyError(f"Wigner imaginary residue {residue:.3e} exceeds {IMAG_LIMIT:.0e}")
    return grid.real.copy(), residue


def wigner_field_from_density(rho: np.ndarray, m_max: int, k_nodes: int,
                              tp: TimePoint) -> WignerField:
    """Wigner function of an arbitrary surviving-sector density matrix.

    rho is indexed from site 1.

    Raises:
        ConsistencyError: If rho is not Hermitian enough to give a real field
    """
    _check_grid(m_max, k_nodes)
    rho = np.asarray(rho, dtype=complex)
    m_values = np.arange(2, m_max + 1)
    k_values = k_grid(k_nodes)
    size = rho.shape[0]
    grid = np.zeros((m_values.size, k_values.size), dtype=complex)
    for row, m in enumerate(m_values):
        n = np.arange(max(1, m - size), min(m - 1, size) + 1)
        if n.size == 0:
            continue
        phases = np.exp(-1j * np.outer(2 * n - m, k_values))
        grid[row] = rho[n - 1, m - n - 1] @ phases
    total, residue = _realify(grid / (2.0 * math.pi))
    return WignerField(m_values, k_values, total, tp, imag_residue=residue)


def wigner_field(state: AmplitudeVector, m_max: int, k_nodes: int, tp: TimePoint) -> WignerField:
    """Wigner function of a pure surviving-sector state.

    Raises:
        ConsistencyError: If the imaginary residue exceeds 1e-9
    """
    _check_grid(m_max, k_nodes)
    m_values = np.arange(2, m_max + 1)
    k_values = k_grid(k_nodes)
    psi = state.amplitudes
    total, residue = _realify(_bilinear_grid(psi, psi, m_values, k_values))
    return WignerField(m_values, k_values, total, tp, imag_residue=residue)


def _decomposed(first: np.ndarray, second: np.ndarray, names, m_max: int, k_nodes: int,
                tp: TimePoint) -> WignerField:
    m_values = np.arange(2, m_max + 1)
    k_values = k_grid(k_nodes)
    same_first = _bilinear_grid(first, first, m_values, k_values)
    cross = (_bilinear_grid(first, second, m_values, k_values)
             + _bilinear_grid(second, first, m_values, k_values))
    same_second = _bilinear_grid(second, second, m_values, k_values)

    channels = {}
    residue = 0.0
    for name, grid in zip(names, (same_first, cross, same_second)):
        channels[name], channel_residue = _realify(grid)
        residue = max(residue, channel_residue)
    total = channels[names[0]] + channels[names[1]] + channels[names[2]]
    return WignerField(m_values, k_values, total, tp, channels=channels, imag_residue=residue)


def wigner_weak_decomposition(s0: int, m_max: int, k_nodes: int, tp: TimePoint,
                              params: WalkParams, cfg: SeriesConfig = SeriesConfig()) -> WignerField:
    """W = W_DD + (W_DB + W_BD) + W_BB for eta <= 1.

    D is the hard-wall amplitude and B the boundary-return series, both with
    the common phase e^{-i Omega t} removed.

    Raises:
        RegimeError: If eta > 1
    """
    _check_grid(m_max, k_nodes)
    if params.eta > 1.0:
        raise RegimeError(f"weak decomposition needs eta <= 1, got {params.eta}")
    split = propagator_split(s0, tp, params, m_max - 1)
    return _decomposed(split.first, split.second, WEAK_CHANNELS, m_max, k_nodes, tp)


def wigner_strong_decomposition(s0: int, m_max: int, k_nodes: int, tp: TimePoint,
                                params: WalkParams, cfg: SeriesConfig = SeriesConfig()) -> WignerField:
    """W = W_cc + (W_cp + W_pc) + W_pp for eta > 1 (continuum and pole pieces).

    Raises:
        RegimeError: If eta <= 1
    """
    _check_grid(m_max, k_nodes)
    if params.eta <= 1.0:
        raise RegimeError(f"strong decomposition needs eta > 1, got {params.eta}")
    split = propagator_split(s0, tp, params, m_max - 1)
    logger.debug("strong Wigner split s0=%d m_max=%d k_nodes=%d x=%.6g", s0, m_max, k_nodes, tp.x)
    return _decomposed(split.first, split.second, STRONG_CHANNELS, m_max, k_nodes, tp)


def _require_pole(params: WalkParams):
    pole = boundary_pole(params)
    if pole is None:
        raise RegimeError(f"no boundary pole for eta = {params.eta} <= 1")
    return pole


def pole_envelope(m: int, tp: TimePoint, s0: int, params: WalkParams) -> float:
    """(1 + eta^-2)^2/(2pi) e^{-Gamma_p t} eta^{-(m + 2 s0 - 4)}."""
    pole = _require_pole(params)
    eta = params.eta
    return ((1.0 + 1.0 / (eta * eta)) ** 2 / (2.0 * math.pi)
            * math.exp(-pole.gamma_p * tp.t) * eta ** -(m + 2 * s0 - 4))


def wigner_pole_closed_form(m: int, k: float, tp: TimePoint, s0: int, params: WalkParams) -> float:
    """Pole droplet W_pp from the finite geometric sum.

    |1 - q_p^2|^2/(2pi) e^{-Gamma_p t} q_p^{s0-2} (q_p*)^{m+s0-2} e^{imk} (alpha - alpha^m)/(1 - alpha)
    with alpha = (q_p/q_p*) e^{-2ik} = -e^{-2ik}.
    """
    if m < 2:
        raise InvalidArgumentError(f"m must be >= 2, got {m}")
    pole = _require_pole(params)
    eta = params.eta
    alpha = -cmath.exp(-2j * k)
    if abs(1.0 - alpha) < ALPHA_GUARD:
        ratio = complex(m - 1)
    else:
        ratio = (alpha - alpha ** m) / (1.0 - alpha)
    # q_p = -i/eta, q_p* = i/eta
    phase = i_power(-(s0 - 2)) * i_power(m + s0 - 2)
    magnitude = abs(pole.residue_prefactor) ** 2 / (2.0 * math.pi) * math.exp(-pole.gamma_p * tp.t)
    value = magnitude * eta ** -(m + 2 * s0 - 4) * phase * cmath.exp(1j * m * k) * ratio
    return value.real


def wigner_pole_cosine_form(m: int, k: float, tp: TimePoint, s0: int, params: WalkParams) -> float:
    """Pole droplet W_pp as an explicit cosine sum.

    envelope * sum_{n=1}^{m-1} cos(pi m/2 + pi n + (m - 2n) k)
    """
    if m < 2:
        raise InvalidArgumentError(f"m must be >= 2, got {m}")
    n = np.arange(1, m)
    total = math.fsum(np.cos(0.5 * math.pi * m + math.pi * n + (m - 2 * n) * k))
    return pole_envelope(m, tp, s0, params) * total


def localization_length(eta: float) -> float:
    """xi_loc = 1/ln(eta) of the boundary mode.

    Raises:
        RegimeError: If eta <= 1 (no localized mode)
    """
    if not eta > 1.0:
        raise RegimeError(f"no localized boundary mode for eta = {eta} <= 1")
    return 1.0 / math.log(eta)
