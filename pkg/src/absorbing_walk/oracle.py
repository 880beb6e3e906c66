"""Brute-force reference computations on a truncated lattice.

Nothing here uses the closed forms. Time evolution integrates
d(psi)/dt = -i H_eff psi directly on sites 1..L, the resolvent is a banded
linear solve and Bessel values come from their integral representation.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from .exceptions import (
    BranchDegeneracyError,
    ConsistencyError,
    ConvergenceError,
    InvalidArgumentError,
    TruncationError,
)
from .propagator import AmplitudeVector, TimePoint, cone_buffer
from .quadrature import integrate_refined
from .resolvent import WalkParams, q_of_z

logger = logging.getLogger(__name__)

METHODS = ("expm", "expm_multiply", "ode")
EDGE_LIMIT = 1e-12
RESIDUAL_LIMIT = 1e-12
ODE_RTOL = 2.5e-14
BESSEL_MAX_ORDER = 60
BESSEL_MAX_ARG = 100.0


@dataclass(frozen=True)
class TruncatedHamiltonian:
    """H_eff restricted to sites 1..L with an open edge at L.

    Attributes:
        L: Number of sites
        diag: Omega on every site, Omega - i kappa/2 on site 1
        offdiag: -Omega/2 on the L - 1 bonds (same above and below)
        params: Walk parameters the matrix was built from
    """

    L: int
    diag: np.ndarray
    offdiag: np.ndarray
    params: WalkParams

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def sparse(self) -> sparse.csr_matrix:
        return sparse.diags([self.offdiag, self.diag, self.offdiag], [-1, 0, 1], format="csr")

    def shifted_banded(self, z: complex) -> np.ndarray:
        """(z - H_eff) in the (1, 1) banded layout of scipy.linalg.solve_banded."""
        ab = np.zeros((3, self.L), dtype=complex)
        ab[0, 1:] = -self.offdiag
        ab[1, :] = z - self.diag
        ab[2, :-1] = -self.offdiag
        return ab


def build_truncated(L: int, params: WalkParams) -> TruncatedHamiltonian:
    """Tridiagonal H_eff on L sites.

    Raises:
        InvalidArgumentError: If L < 2
    """
    if L < 2:
        raise InvalidArgumentError(f"lattice needs L >= 2 sites, got {L}")
    diag = np.full(L, params.omega, dtype=complex)
    diag[0] -= 0.5j * params.kappa
    offdiag = np.full(L - 1, -0.5 * params.omega)
    return TruncatedHamiltonian(L=L, diag=diag, offdiag=offdiag, params=params)


def default_oracle_sites(s0: int, x: float) -> int:
    """Lattice size with twice the cone buffer used by the closed forms."""
    return s0 + math.ceil(x) + 2 * cone_buffer(x)


def _padded(initial: AmplitudeVector, L: int) -> np.ndarray:
    support = initial.support
    if support == 0:
        raise InvalidArgumentError("initial state has empty support")
    if support > L:
        raise InvalidArgumentError(f"initial support {support} exceeds lattice size {L}")
    psi = np.zeros(L, dtype=complex)
    psi[:support] = initial.amplitudes[:support]
    return psi


def _evolve_ode(hamiltonian: TruncatedHamiltonian, psi: np.ndarray, t: float, tol: float) -> np.ndarray:
    matrix = -1j * hamiltonian.sparse()

    def rhs(_, y):
        return matrix @ y

    solution = solve_ivp(rhs, (0.0, t), psi, method="DOP853", rtol=ODE_RTOL, atol=tol * 1e-4)
    if solution.status != 0:
        raise ConvergenceError(f"oracle time stepping failed: {solution.message}")
    logger.debug("DOP853 used %d right-hand-side evaluations", solution.nfev)
    return solution.y[:, -1]


def evolve_oracle(
    initial: AmplitudeVector,
    tp: TimePoint,
    L: int,
    tol: float = 1e-12,
    method: str = "expm",
) -> AmplitudeVector:
    """Evolve a surviving-sector state on sites 1..L.

    Args:
        initial: State at t = 0 (support must fit in L)
        tp: Target time
        L: Lattice size
        tol: Requested global accuracy, at most 1e-10
        method: "expm" (dense exponential), "expm_multiply" or "ode" (DOP853)

    Returns:
        Amplitudes on all L sites

    Raises:
        TruncationError: If the amplitude on site L exceeds 1e-12
        ConvergenceError: If the time stepper gives up
    """
    if method not in METHODS:
        raise InvalidArgumentError(f"unknown oracle method {method!r}; choose from {METHODS}")
    if not 0.0 < tol <= 1e-10:
        raise InvalidArgumentError(f"oracle tolerance must lie in (0, 1e-10], got {tol}")
    params = initial.params
    if params is None:
        raise InvalidArgumentError("oracle evolution needs the state's WalkParams")

    hamiltonian = build_truncated(L, params)
    psi = _padded(initial, L)
    if tp.t == 0.0:
        return AmplitudeVector(psi, params)

    logger.debug("oracle %s evolution on L=%d sites to t=%.6g", method, L, tp.t)
    if method == "expm":
        evolved = linalg.expm(-1j * tp.t * hamiltonian.dense()) @ psi
    elif method == "expm_multiply":
        evolved = expm_multiply(-1j * tp.t * hamiltonian.sparse().tocsc(), psi)
    else:
        evolved = _evolve_ode(hamiltonian, psi, tp.t, tol)

    edge = abs(evolved[-1])
    if edge > EDGE_LIMIT:
        suggested = initial.support + math.ceil(tp.x) + 2 * cone_buffer(tp.x)
        raise TruncationError(
            f"|psi_L| = {edge:.3e} at L = {L}; the walker reached the lattice edge",
            suggested_sites=max(suggested, 2 * L),
        )
    return AmplitudeVector(np.asarray(evolved, dtype=complex), params)


def oracle_column(s0: int, tp: TimePoint, params: WalkParams, L: Optional[int] = None,
                  method: str = "expm") -> np.ndarray:
    """K(s, s0; t) for s = 1..L by truncated-lattice evolution."""
    size = default_oracle_sites(s0, tp.x) if L is None else L
    initial = AmplitudeVector.localized(s0, size, params)
    return evolve_oracle(initial, tp, size, method=method).amplitudes


def oracle_propagator(s: int, s0: int, tp: TimePoint, params: WalkParams,
                      L: Optional[int] = None, method: str = "expm") -> complex:
    """Single propagator element K(s, s0; t) from oracle_column."""
    column = oracle_column(s0, tp, params, L, method)
    if not 1 <= s <= column.size:
        raise InvalidArgumentError(f"site {s} outside the oracle lattice 1..{column.size}")
    return complex(column[s - 1])


def oracle_resolvent(s: int, s0: int, z: complex, params: WalkParams, L: int) -> complex:
    """Component s of the solution of (z - H_eff) g = e_{s0} on L sites.

    Raises:
        ConsistencyError: If the system is singular or the residual exceeds 1e-12;
            the message gives the distance from z to the nearest eigenvalue
    """
    if not (1 <= s <= L and 1 <= s0 <= L):
        raise InvalidArgumentError(f"sites ({s}, {s0}) outside lattice 1..{L}")
    hamiltonian = build_truncated(L, params)
    try:
        q = q_of_z(z, params.omega).q
        if abs(q) ** L >= 1e-14:
            logger.warning("|q|^L = %.2e at L = %d; truncation is visible in the resolvent", abs(q) ** L, L)
    except (InvalidArgumentError, BranchDegeneracyError):
        pass

    rhs = np.zeros(L, dtype=complex)
    rhs[s0 - 1] = 1.0
    try:
        g = linalg.solve_banded((1, 1), hamiltonian.shifted_banded(z), rhs)
    except linalg.LinAlgError as exc:
        raise ConsistencyError(
            f"singular resolvent at z = {z}: {_eigen_distance(hamiltonian, z):.3e} from nearest eigenvalue"
        ) from exc

    residual = np.max(np.abs(z * g - hamiltonian.dense() @ g - rhs))
    if residual > RESIDUAL_LIMIT * max(1.0, float(np.max(np.abs(g)))):
        raise ConsistencyError(
            f"resolvent residual {residual:.3e} at z = {z}; "
            f"{_eigen_distance(hamiltonian, z):.3e} from nearest eigenvalue"
        )
    return complex(g[s - 1])


def _eigen_distance(hamiltonian: TruncatedHamiltonian, z: complex) -> float:
    eigenvalues = linalg.eigvals(hamiltonian.dense())
    return float(np.min(np.abs(eigenvalues - z)))


def bessel_oracle(n: int, x: float) -> float:
    """J_n(x) = (1/pi) int_0^pi cos(n theta - x sin theta) d theta by quadrature.

    Raises:
        InvalidArgumentError: Outside 0 <= n <= 60, 0 <= x <= 100
        ConvergenceError: If panel doubling does not settle
    """
    if not 0 <= n <= BESSEL_MAX_ORDER:
        raise InvalidArgumentError(f"bessel_oracle needs 0 <= n <= {BESSEL_MAX_ORDER}, got {n}")
    if not (math.isfinite(x) and 0.0 <= x <= BESSEL_MAX_ARG):
        raise InvalidArgumentError(f"bessel_oracle needs 0 <= x <= {BESSEL_MAX_ARG}, got {x}")

    def integrand(theta: np.ndarray) -> np.ndarray:
        return np.cos(n * theta - x * np.sin(theta))

    panels = max(8, math.ceil((n + x) / 2.0))
    result = integrate_refined(integrand, 0.0, math.pi, panels, 5e-14, 12)
    return float(result.value) / math.pi
