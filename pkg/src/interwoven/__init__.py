"""Born-Oppenheimer spectra of two heavy bosons and N-2 light ones.

The light particles bind to the heavy pair with momentum kappa(R), which
produces an attractive (s_N^2 + 1/4)/R^2 potential at unitarity. Its
bound states form geometric ladders with ratio e^{2 pi / s_N}; ladders for
successive N hang below each other's levels and interleave.
"""

__version__ = "0.1.0"

from .constants import (
    OMEGA,
    ScalingFactor,
    adiabatic_s,
    geometric_ratio,
    hybrid_s,
    omega_constant,
    reference_s0,
    scaling_factor,
    tetramer_level_count,
    three_body_s,
    trimer_level_count,
)
from .potential import (
    PotentialProfile,
    SystemParams,
    coulomb_coefficient,
    effective_potential,
    fit_epsilon,
    kappa_closed_form,
    potential_profile,
    solve_kappa,
    solve_kappa_narrow,
)
from .bessel import besselk_imag, besselk_phase, besselk_zeros
from .eigensolver import (
    BoundaryConditions,
    EnergyLadder,
    RadialProblem,
    bessel_spectrum,
    bound_states,
    fd_extrapolated,
    fd_oracle,
    level_count,
    numerov_count_nodes,
    unitary_box_spectrum,
)
from .spectrum import (
    InterwovenSpectrum,
    ScalingCurve,
    attached_ladder,
    intermediate_state_count,
    interwoven_spectrum,
    ratio_table,
    scaling_curve,
    trimer_ladder,
)
from .errors import (
    ConstraintViolation,
    DomainError,
    InsufficientLevels,
    MissingReference,
    NoBoundLevel,
    SolverError,
)
