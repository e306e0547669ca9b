"""Similarity solutions of a one-phase Stefan problem with nonlinear
thermal coefficients and heat sources, plus a finite-difference
moving-boundary solver used to verify them.

Public API is re-exported from the submodules; see README.md for an
overview and the cli module for the command-line entry points.
"""

from .checks import CheckResult, run_checks
from .errors import (
    BracketExpansionFailed,
    ConfigError,
    FrontCollapse,
    InvalidInput,
    MaxSubdivisionsExceeded,
    MismatchedProblem,
    NonConvergence,
    NotBracketed,
    OutOfDomain,
    OutOfRange,
    StefanError,
)
from .model import (
    BoundaryData,
    Dimensionless,
    ExponentialSource,
    FluxFeedbackSource,
    Material,
    NoSource,
    SimilaritySource,
    SourceSpec,
    conductivity,
    diffusivity,
    dimensionless_groups,
    feedback_coefficient,
    specific_heat,
    stefan_number,
)
from .numerics import (
    Bracket,
    Tolerance,
    erf,
    find_root_increasing,
    integrate,
    integrate_cumulative,
    invert_increasing,
)
from .oracle import OracleConfig, OracleRun, compare, run_oracle, run_oracle_for
from .reconstruct import (
    PhysicalQuery,
    fixed_face_flux,
    front_position,
    similarity_coordinate,
    source_field,
    temperature,
    temperature_at,
)
from .similarity import (
    LambdaEquation,
    PsiProfile,
    SimilaritySolution,
    lambda_equation_exponential,
    lambda_equation_nosource,
    lambda_equation_source1,
    lambda_equation_source2,
    phi_inverse,
    phi_inverse_quadratic,
    phi_map,
    phi_map_deriv,
    psi_profile,
    psi_profile_feedback,
    solve_exponential_case,
    solve_lambda,
    solve_lambda_source1,
    solve_lambda_source2,
    solve_problem,
    y_prime_at_zero,
    y_profile_source1,
    y_profile_source2,
)

__all__ = [
    "BoundaryData",
    "Bracket",
    "BracketExpansionFailed",
    "CheckResult",
    "ConfigError",
    "Dimensionless",
    "ExponentialSource",
    "FluxFeedbackSource",
    "FrontCollapse",
    "InvalidInput",
    "LambdaEquation",
    "Material",
    "MaxSubdivisionsExceeded",
    "MismatchedProblem",
    "NoSource",
    "NonConvergence",
    "NotBracketed",
    "OracleConfig",
    "OracleRun",
    "OutOfDomain",
    "OutOfRange",
    "PhysicalQuery",
    "PsiProfile",
    "SimilaritySolution",
    "SimilaritySource",
    "SourceSpec",
    "StefanError",
    "Tolerance",
    "compare",
    "conductivity",
    "diffusivity",
    "dimensionless_groups",
    "erf",
    "feedback_coefficient",
    "find_root_increasing",
    "fixed_face_flux",
    "front_position",
    "integrate",
    "integrate_cumulative",
    "invert_increasing",
    "lambda_equation_exponential",
    "lambda_equation_nosource",
    "lambda_equation_source1",
    "lambda_equation_source2",
    "phi_inverse",
    "phi_inverse_quadratic",
    "phi_map",
    "phi_map_deriv",
    "psi_profile",
    "psi_profile_feedback",
    "run_checks",
    "run_oracle",
    "run_oracle_for",
    "similarity_coordinate",
    "solve_exponential_case",
    "solve_lambda",
    "solve_lambda_source1",
    "solve_lambda_source2",
    "solve_problem",
    "source_field",
    "specific_heat",
    "stefan_number",
    "temperature",
    "temperature_at",
    "y_prime_at_zero",
    "y_profile_source1",
    "y_profile_source2",
]
