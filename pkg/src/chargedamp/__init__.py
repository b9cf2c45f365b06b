"""Damped charged-particle dynamics in crossed fields via variable-mass Hamiltonians.

Dissipation is modelled by a time-dependent effective mass; the package
solves the resulting classical motion twice (direct ODE integration and a
canonical-transformation symplectic map) and evolves Gaussian wave
packets through the same machinery (closed-form amplitude plus a
Green-kernel quadrature route), with cross-checks between every pair of
routes.
"""

from .errors import (
    BadStrideError,
    BadWindowError,
    BetaDomainError,
    ChargedampError,
    DivisionDomainError,
    MassDomainError,
    MassNonPositiveError,
    QuadratureNotConvergedError,
    SingularStartError,
    SingularTimeError,
    SolverError,
    StepFailureError,
    ValidationError,
    VerificationError,
    WrongModelError,
)
from .mass_models import (
    ConstantMass,
    ExponentialMass,
    LinearMass,
    MassModel,
    SoftplusMass,
    asymptotic_interpolation_check,
)
from .fields import (
    ConstantProfile,
    ExponentialProfile,
    FieldSample,
    Fields,
    RampProfile,
    SinusoidalProfile,
    TimeProfile,
    rotated_field,
    sample_fields,
)
from .scenario import (
    CODATA,
    PhysicalConstants,
    Scenario,
    TimeGrid,
    gaas_scenario,
    load_scenario,
    save_scenario,
    scenario_from_parser,
    scenario_to_parser,
    scenario_from_mobility,
    validate_scenario,
    with_mass_model,
)
from .classical_direct import (
    IntegratorConfig,
    KinematicState,
    Trajectory,
    integrate_newtonian,
    integrate_variable_mass,
    saturation_time,
    stationary_velocity_general,
    stationary_velocity_ltdmm,
)
from .canonical import (
    CanonicalConfig,
    CanonicalSolution,
    ShearParams,
    SymplecticMap,
    TranslationParams,
    assemble_map,
    classical_trajectory_canonical,
    closed_form_constant_field,
    hyperbola_residual,
    integrate_shear,
    integrate_theta,
    integrate_translations,
    propagate,
    solve_parameters,
    symplecticity_defect,
    trajectory_from_solution,
)
from .quantum import (
    Grid2D,
    PacketSpec,
    default_packet_spec,
    ehrenfest_residual,
    greens_function,
    grid_norm,
    homogeneous_center_residual,
    packet_center,
    params_at_time,
    probability_density,
    propagate_via_green,
    psi,
    sigma,
)
from .verify import CheckResult, run_verification

__version__ = "0.1.0"
