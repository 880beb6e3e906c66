"""absorbing-walk - Exact quantum walk on the half-line with a boundary sink."""

__version__ = "0.1.0-dev"
__author__ = "absorbing-walk Contributors"

# Import main classes and functions
from .special_functions import (
    BesselRow,
    bessel_j_row,
    bessel_j,
)

from .resolvent import (
    WalkParams,
    CutSide,
    SpectralVariable,
    PoleData,
    q_of_z,
    g_line,
    green_hard_wall,
    green_absorbing,
    boundary_pole,
)

from .propagator import (
    TimePoint,
    SeriesConfig,
    AmplitudeVector,
    hard_wall_propagator,
    weak_propagator,
    strong_continuum,
    pole_propagator,
    propagator,
    propagator_column,
    propagate_state,
    propagate_density,
)

from .observables import (
    QuadratureConfig,
    ScatteringMode,
    survival,
    first_passage_density,
    reflection_amplitude,
    absorption_fraction,
    absorption_probability,
    absorption_probability_timedomain,
)

from .wigner import (
    WignerField,
    wigner_field,
    wigner_weak_decomposition,
    wigner_strong_decomposition,
    wigner_pole_closed_form,
    localization_length,
)

from .oracle import (
    TruncatedHamiltonian,
    build_truncated,
    evolve_oracle,
    oracle_resolvent,
    bessel_oracle,
)

from .exceptions import (
    AbsorbingWalkError,
    InvalidArgumentError,
    BranchDegeneracyError,
    PoleEvaluationError,
    RegimeError,
    ConvergenceError,
    TruncationError,
    ConsistencyError,
)

__all__ = [
    # Version info
    '__version__',
    '__author__',

    # Special functions
    'BesselRow',
    'bessel_j_row',
    'bessel_j',

    # Resolvent
    'WalkParams',
    'CutSide',
    'SpectralVariable',
    'PoleData',
    'q_of_z',
    'g_line',
    'green_hard_wall',
    'green_absorbing',
    'boundary_pole',

    # Propagator
    'TimePoint',
    'SeriesConfig',
    'AmplitudeVector',
    'hard_wall_propagator',
    'weak_propagator',
    'strong_continuum',
    'pole_propagator',
    'propagator',
    'propagator_column',
    'propagate_state',
    'propagate_density',

    # Observables
    'QuadratureConfig',
    'ScatteringMode',
    'survival',
    'first_passage_density',
    'reflection_amplitude',
    'absorption_fraction',
    'absorption_probability',
    'absorption_probability_timedomain',

    # Wigner
    'WignerField',
    'wigner_field',
    'wigner_weak_decomposition',
    'wigner_strong_decomposition',
    'wigner_pole_closed_form',
    'localization_length',

    # Oracle
    'TruncatedHamiltonian',
    'build_truncated',
    'evolve_oracle',
    'oracle_resolvent',
    'bessel_oracle',

    # Exceptions
    'AbsorbingWalkError',
    'InvalidArgumentError',
    'BranchDegeneracyError',
    'PoleEvaluationError',
    'RegimeError',
    'ConvergenceError',
    'TruncationError',
    'ConsistencyError',
]
