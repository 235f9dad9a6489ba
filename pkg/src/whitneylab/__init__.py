"""whitneylab: exact Whitney-type constants for mean-zero functions on the line.

The package computes, with exact rational arithmetic, the quantities in
the classical comparison

    sup |f|  <=  W * (largest even-order difference of f at scale h)

for compactly supported piecewise-linear functions that have zero mean on
every interval of a step-h grid: exact moduli of smoothness, the identity
machinery connecting averages to point values, closed-form bound tables,
and a linear-programming search for near-extremal functions with exact
certification of every reported ratio.
"""

__version__ = "0.1.0"

from .rational import BACKEND, Rat, rat, rat_float, rat_str, rational_from_float
from .errors import (
    CertificationError,
    DegenerateInputError,
    FunctionFormatError,
    InvalidArgumentError,
    InvalidGeometryError,
    InvalidLengthError,
    InvalidRangeError,
    InvalidScaleError,
    RequiresGenericPointError,
    RequiresNonPoleError,
    RequiresOscillationError,
    SimplexStallError,
    UnsupportedOrderError,
    WhitneyLabError,
)
from .funcspace import (
    Breakpoint,
    PiecewiseFunction,
    Spike,
    add,
    build,
    check_oscillation,
    definite_integral,
    evaluate,
    evaluate_triple,
    extremal_example,
    function_from_json,
    function_to_json,
    is_oscillating,
    load_function,
    make_oscillating,
    oscillation_violations,
    random_oscillating,
    save_function,
    scale_values,
    signed_integral,
    spike_function,
    sup_norm,
    translate,
)
from .differences import (
    ModulusReport,
    Witness,
    central_difference,
    critical_vertices,
    modulus_both,
    modulus_exact,
    modulus_grid,
    replay_witness,
    vertex_table,
    whitney_ratio,
    write_vertex_csv,
)
from .steklov import (
    CheckResult,
    check_integer_point_identity,
    check_integral_factorization,
    check_integral_representation,
    check_product_identity,
    check_remainder_decomposition,
    envelope,
    integral_bound,
    steklov,
    steklov_remainder,
    two_param_difference,
)
from .bounds import (
    BoundPair,
    BoundScan,
    CombinedBound,
    bounds_table,
    central_binomial,
    combined_upper_bound,
    harmonic,
    shrunk_step_bound,
    shrunk_step_one_sided_term,
    unit_step_bound,
    upper_bound_scan,
    whitney2_bounds,
    whitney_bounds,
)
from .simplex import SimplexResult
from .extremal import (
    Certificate,
    SearchGeometry,
    SearchReport,
    build_lp,
    certificate_from_json,
    certify,
    geometry_from_json,
    geometry_to_json,
    load_geometry,
    make_geometry,
    modulus_forms,
    replay_certificate,
    save_geometry,
    search,
    shipped_geometry,
    solve_lp,
)
from .kernels import KERNEL_BACKEND, available_backends

__all__ = [name for name in dir() if not name.startswith("_")]
