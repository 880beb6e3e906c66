"""Green functions of the half-line walk with an absorbing edge site.

The absorber is a rank-one imaginary defect -(i*kappa/2)|1><1| on top of the
hard-wall tight-binding Hamiltonian. All Green functions are written in terms
of the conformal variable q(z), defined by z = Omega*(1 - (q + 1/q)/2) with
|q| < 1 away from the band [0, 2*Omega].
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .exceptions import (
    BranchDegeneracyError,
    InvalidArgumentError,
    PoleEvaluationError,
)
from .quadrature import integrate_refined

logger = logging.getLogger(__name__)

# |1 - i*eta*q| below this is treated as sitting on the boundary pole.
POLE_GUARD = 1e-10
# ||q| - 1| below this is treated as a band-edge degeneracy off the cut.
EDGE_GUARD = 1e-14


@dataclass(frozen=True)
class WalkParams:
    """Physical constants of the walk.

    Attributes:
        omega: Hopping rate (> 0)
        kappa: Absorption rate at the edge site (>= 0)
    """

    omega: float
    kappa: float

    def __post_init__(self):
        if not math.isfinite(self.omega) or self.omega <= 0.0:
            raise InvalidArgumentError(f"omega must be finite and > 0, got {self.omega}")
        if not math.isfinite(self.kappa) or self.kappa < 0.0:
            raise InvalidArgumentError(f"kappa must be finite and >= 0, got {self.kappa}")

    @property
    def eta(self) -> float:
        """Dimensionless absorption strength kappa/omega."""
        return self.kappa / self.omega

    @property
    def is_strong(self) -> bool:
        """True when a boundary pole exists (eta > 1)."""
        return self.eta > 1.0

    @classmethod
    def from_eta(cls, eta: float, omega: float = 1.0) -> "WalkParams":
        """Build parameters from eta at a given hopping rate."""
        return cls(omega=omega, kappa=eta * omega)

    def dual(self) -> "WalkParams":
        """Return the eta -> 1/eta partner (kappa' = omega**2 / kappa).

        Raises:
            InvalidArgumentError: If kappa is zero (the partner is eta = inf)
        """
        if self.kappa == 0.0:
            raise InvalidArgumentError("eta = 0 has no finite dual")
        return WalkParams(omega=self.omega, kappa=self.omega ** 2 / self.kappa)


class CutSide(Enum):
    """Which limit to take when z lies on the branch cut (0, 2*Omega)."""

    OFF_CUT = "off_cut"
    ABOVE = "above"
    BELOW = "below"


@dataclass(frozen=True)
class SpectralVariable:
    """A complex energy paired with its branch value q(z)."""

    z: complex
    q: complex
    side: CutSide = CutSide.OFF_CUT

    def round_trip_residual(self, omega: float) -> float:
        """|z - Omega*(1 - (q + 1/q)/2)|."""
        return abs(self.z - omega * (1.0 - 0.5 * (self.q + 1.0 / self.q)))


@dataclass(frozen=True)
class PoleData:
    """Boundary mode of the strong regime.

    Attributes:
        q_p: Pole position in the q plane (-i/eta)
        z_p: Complex energy of the localized mode
        gamma_p: Decay rate kappa - omega**2/kappa
        residue_prefactor: 1 - q_p**2
    """

    q_p: complex
    z_p: complex
    gamma_p: float
    residue_prefactor: complex


def q_of_z(z: complex, omega: float, side: CutSide = CutSide.OFF_CUT) -> SpectralVariable:
    """Map an energy onto the unit disk.

    Args:
        z: Complex energy
        omega: Hopping rate
        side: Required when z is real and inside (0, 2*omega)

    Returns:
        SpectralVariable with |q| < 1 off the cut, |q| = 1 on it

    Raises:
        InvalidArgumentError: For non-finite z, or an on-cut z without a side
        BranchDegeneracyError: For z at a band edge
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidArgumentError(f"z must be finite, got {z}")

    w = (omega - z) / omega
    on_cut = z.imag == 0.0 and 0.0 < z.real < 2.0 * omega

    if on_cut:
        if side is CutSide.OFF_CUT:
            raise InvalidArgumentError(
                f"z = {z} lies on the cut (0, {2.0 * omega}); choose ABOVE or BELOW"
            )
        root = math.sqrt(1.0 - w.real * w.real)
        q = complex(w.real, root if side is CutSide.ABOVE else -root)
        return SpectralVariable(z=z, q=q, side=side)

    if z.imag == 0.0 and (z.real == 0.0 or z.real == 2.0 * omega):
        raise BranchDegeneracyError(f"z = {z} is a band edge (q = {'1' if z.real == 0.0 else '-1'})")

    # Take the large root without cancellation, then q = 1/q_big.
    disc = cmath.sqrt(w * w - 1.0)
    q_big = w + disc if abs(w + disc) >= abs(w - disc) else w - disc
    q = 1.0 / q_big
    if abs(abs(q) - 1.0) < EDGE_GUARD:
        raise BranchDegeneracyError(f"|q(z)| = 1 at z = {z}")
    return SpectralVariable(z=z, q=q, side=CutSide.OFF_CUT)


def _require_inside(sv: SpectralVariable) -> None:
    if abs(sv.q) >= 1.0 and sv.side is CutSide.OFF_CUT:
        raise BranchDegeneracyError(f"|q| = {abs(sv.q)} is not inside the unit disk")
    if abs(1.0 - sv.q * sv.q) == 0.0:
        raise BranchDegeneracyError(f"1 - q^2 vanishes at z = {sv.z}")


def g_line(n: int, sv: SpectralVariable, omega: float) -> complex:
    """Full-line lattice Green function g_n(z) = -(2/Omega) q^{|n|+1} / (1 - q^2)."""
    _require_inside(sv)
    q = sv.q
    return -(2.0 / omega) * q ** (abs(n) + 1) / (1.0 - q * q)


def green_line_fourier(n: int, z: complex, omega: float, panels: int = 64) -> complex:
    """g_n(z) from its momentum integral, for z off the band.

    Only intended as an independent check of g_line; it converges slowly as z
    approaches the cut.
    """
    def integrand(k: np.ndarray) -> np.ndarray:
        return np.exp(1j * k * n) / (z - omega * (1.0 - np.cos(k)))

    result = integrate_refined(integrand, -math.pi, math.pi, panels, 1e-13, 12)
    return complex(result.value) / (2.0 * math.pi)


def green_hard_wall(s: int, s0: int, sv: SpectralVariable, omega: float) -> complex:
    """Hard-wall Green function G_D(s, s0; z) = g_{s-s0} - g_{s+s0} by images.

    s = 0 is accepted and returns the image zero.
    """
    if s < 0 or s0 < 1:
        raise InvalidArgumentError(f"sites must satisfy s >= 0, s0 >= 1 (got {s}, {s0})")
    _require_inside(sv)
    q = sv.q
    return -(2.0 / (omega * (1.0 - q * q))) * (q ** (abs(s - s0) + 1) - q ** (s + s0 + 1))


def _check_sites(s: int, s0: int) -> None:
    if s < 1 or s0 < 1:
        raise InvalidArgumentError(f"sites must be >= 1 (got s={s}, s0={s0})")


def green_absorbing(s: int, s0: int, sv: SpectralVariable, params: WalkParams) -> complex:
    """Exact resolvent of the absorbing walk.

    G_kappa(s, s0; z) = G_D(s, s0; z) - (2 i eta / Omega) q^{s+s0} / (1 - i eta q)

    Raises:
        PoleEvaluationError: If z is at the boundary pole
    """
    _check_sites(s, s0)
    eta = params.eta
    denominator = 1.0 - 1j * eta * sv.q
    if abs(denominator) < POLE_GUARD:
        pole = boundary_pole(params)
        z_p = pole.z_p if pole is not None else complex(params.omega, 0.0)
        raise PoleEvaluationError(f"z = {sv.z} is the boundary pole z_p = {z_p}", z_p=z_p)
    defect = (2j * eta / params.omega) * sv.q ** (s + s0) / denominator
    return green_hard_wall(s, s0, sv, params.omega) - defect


def green_boundary(s0: int, sv: SpectralVariable, params: WalkParams) -> complex:
    """G_kappa(1, s0; z) from the closed boundary equation."""
    _check_sites(1, s0)
    g11 = green_hard_wall(1, 1, sv, params.omega)
    denominator = 1.0 + 0.5j * params.kappa * g11
    if abs(denominator) < POLE_GUARD:
        raise PoleEvaluationError(f"z = {sv.z} is the boundary pole")
    return green_hard_wall(1, s0, sv, params.omega) / denominator


def spectral_jump(s: int, s0: int, energy: float, params: WalkParams) -> complex:
    """Discontinuity G(E + i0) - G(E - i0) across the cut at 0 < E < 2*Omega."""
    above = q_of_z(energy, params.omega, CutSide.ABOVE)
    below = q_of_z(energy, params.omega, CutSide.BELOW)
    return green_absorbing(s, s0, above, params) - green_absorbing(s, s0, below, params)


def boundary_pole(params: WalkParams) -> Optional[PoleData]:
    """Boundary-localized mode, present only for eta > 1.

    eta = 1 returns None: the pole then sits on |q| = 1, on the cut itself.
    """
    if not params.is_strong:
        return None
    eta = params.eta
    omega, kappa = params.omega, params.kappa
    gamma_p = kappa - omega * omega / kappa
    q_p = complex(0.0, -1.0 / eta)
    return PoleData(
        q_p=q_p,
        z_p=complex(omega, -0.5 * gamma_p),
        gamma_p=gamma_p,
        residue_prefactor=complex(1.0 + 1.0 / (eta * eta), 0.0),
    )
