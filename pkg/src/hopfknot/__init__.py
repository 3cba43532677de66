"""Numerical laboratory for an exact electromagnetic knot.

The field studied here is a vacuum Maxwell solution whose electric and
magnetic lines are, at time zero, the fibers of two complementary Hopf
maps: every pair of lines of either family links exactly once. The
package evaluates the fields in closed form at any time, integrates the
global diagnostics (energy, momentum, helicity, size), pushes relativistic
test electrons through the knot, traces field lines and measures their
linking, and verifies all of it against identities the solution must
satisfy.

Hot loops (field kernels, the adaptive stepper, the linking double sum)
run in a compiled extension when it is available; a line-for-line pure
Python twin is selected otherwise, producing bit-identical results. See
hopfknot._backend.BACKEND for which one is active.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .knot_fields import (
    AuxQuantities,
    FieldSample,
    MapPoleError,
    aux_quantities,
    cauchy_fields,
    field_at,
    field_components,
    fields_from_maps,
    h_vectors,
    hopf_maps_t0,
    potentials_t0,
    time_maps,
)
from .quadrature import (
    GridSpec,
    IntegralEstimate,
    integrate_ball,
    integrate_r3,
    integrate_r3_vec,
    pairwise_sum,
)
from .diagnostics import (
    EnergyReport,
    energy_density,
    energy_fraction_within,
    energy_max_position,
    energy_report,
    grid_export,
    helicities_t0,
    mean_quadratic_radius,
    poynting_total,
    second_moment_eigenvalues,
    total_energy,
)
from .particle_dynamics import (
    EnsembleResult,
    ParticleState,
    PushConfig,
    StepSizeError,
    SuperluminalError,
    Trajectory,
    axes_ensemble,
    coupling_strength,
    integrate_momentum_rk4,
    integrate_particle,
    lorentz_rhs,
    momentum_rhs,
    run_ensemble,
)
from .topology import (
    CurveProximityError,
    FieldLine,
    OpenCurveError,
    ZeroFieldError,
    gauss_linking_number,
    trace_field_line,
)
from .verification import (
    CheckReport,
    check_maxwell,
    check_null_field,
    check_representations,
    conservation_sweep,
    run_all,
)

__all__ = [
    "BACKEND",
    "__version__",
    "AuxQuantities",
    "FieldSample",
    "MapPoleError",
    "aux_quantities",
    "cauchy_fields",
    "field_at",
    "field_components",
    "fields_from_maps",
    "h_vectors",
    "hopf_maps_t0",
    "potentials_t0",
    "time_maps",
    "GridSpec",
    "IntegralEstimate",
    "integrate_ball",
    "integrate_r3",
    "integrate_r3_vec",
    "pairwise_sum",
    "EnergyReport",
    "energy_density",
    "energy_fraction_within",
    "energy_max_position",
    "energy_report",
    "grid_export",
    "helicities_t0",
    "mean_quadratic_radius",
    "poynting_total",
    "second_moment_eigenvalues",
    "total_energy",
    "EnsembleResult",
    "ParticleState",
    "PushConfig",
    "StepSizeError",
    "SuperluminalError",
    "Trajectory",
    "axes_ensemble",
    "coupling_strength",
    "integrate_momentum_rk4",
    "integrate_particle",
    "lorentz_rhs",
    "momentum_rhs",
    "run_ensemble",
    "CurveProximityError",
    "FieldLine",
    "OpenCurveError",
    "ZeroFieldError",
    "gauss_linking_number",
    "trace_field_line",
    "CheckReport",
    "check_maxwell",
    "check_null_field",
    "check_representations",
    "conservation_sweep",
    "run_all",
]
