"""Symbolic-numeric calculus for scalar fields, curves, and their
composition: total derivatives along curves, reconstruction of any one of
the triple (field, curve, path function) from the other two, differential
forms on field space, coherent families of local functions, and finite
filter limits.
"""

from .calculus import (
    DEFAULT_CONFIG,
    Curve,
    PathFunction,
    SampledCurve,
    ScalarField,
    ToleranceConfig,
    advective_term,
    advective_term_expression,
    compose,
    epsilon_delta_witness,
    gradient,
    rate_expression,
    spatial_names,
    time_partial,
    total_derivative,
    total_derivative_expression,
    velocity,
)
from .cases import (
    CaseDiagnostics,
    CaseSolution,
    CharacteristicData,
    SkewMatrix,
    VerificationReport,
    characteristic_pde_residual,
    rk4_integrate,
    skew_annihilator,
    solve_e_case,
    solve_f_case,
    solve_p_case,
    verify_composition,
    xi_names,
)
from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    EvaluationError,
    FieldPathError,
    FilterError,
    IntegrationError,
    NondifferentiableError,
    ParseError,
    RegionError,
    UnboundVariableError,
)
from .expr import (
    BinOp,
    Call,
    Expression,
    Num,
    Var,
    differentiate,
    equivalent,
    evaluate,
    free_variables,
    parse,
    simplify,
    substitute,
    to_string,
)
from .filters import (
    BallLimitResult,
    ElementMap,
    Filter,
    FilterCheck,
    FiniteSpace,
    Partition,
    ball_filter_limit,
    filter_limit,
    general_function_limit,
    image_filter,
    is_filter,
    principal_filter,
    stronger_than,
)
from .genfun import (
    Ball,
    Box,
    CoherenceReport,
    FunctionalElement,
    GeneralFunction,
    PointSet,
    ProlongationResult,
    Region,
    coherence_check,
    derivative_general_function,
    direct_prolongation,
    overlap,
    region_samples,
    restrict,
)
from .geometry import (
    OneForm,
    VectorField,
    exterior_derivative,
    hamilton_jacobi_residual,
    line_integral,
    pairing,
    poincare_cartan,
    skew_field,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
