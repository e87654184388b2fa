"""Hardy Z-function evaluation, zero location, and zero-path continuation.

The package evaluates Z(t) = e^{i theta(t)} zeta(1/2 + it) through several
routes (Riemann-Siegel with low-order remainder, the bare main sum, the long
Spira truncation, an Euler-Maclaurin oracle), generalizes the main sum to
coefficient families Z_N(t; a), and follows individual zeros along curves in
coefficient space, recording collisions of adjacent zeros and their returns
to the real axis.
"""

from .backends import available_backends, backend_name, use_backend
from .engine import (
    CoefficientVector,
    EvalConfig,
    Method,
    Summation,
    ZValue,
    afe_term_count,
    rs_remainder,
    section_eval,
    spira_term_count,
    z_value,
    z_value_and_derivative,
    zeta_em,
)
from .search import SearchSpec, SearchResult, score_path, search_split_indices
from .special import (
    ConfigurationError,
    DomainError,
    PrecisionError,
    PrecisionPolicy,
    lambert_w0,
    theta,
    theta_prime,
)
from .tracker import (
    CollisionEvent,
    NonCollidingReport,
    PathKind,
    PathSpec,
    StepControl,
    ZeroTrace,
    continue_complex_pair,
    path_eval,
    trace_pair,
    trace_zero,
    verify_noncolliding,
)
from .zeros import NewtonReport, core_zero, core_zero_seed, find_real_zeros, newton_solve

__version__ = "0.1.0"

__all__ = [
    "CoefficientVector",
    "CollisionEvent",
    "ConfigurationError",
    "DomainError",
    "EvalConfig",
    "Method",
    "NewtonReport",
    "NonCollidingReport",
    "PathKind",
    "PathSpec",
    "PrecisionError",
    "PrecisionPolicy",
    "SearchResult",
    "SearchSpec",
    "StepControl",
    "Summation",
    "ZValue",
    "ZeroTrace",
    "afe_term_count",
    "available_backends",
    "backend_name",
    "continue_complex_pair",
    "core_zero",
    "core_zero_seed",
    "find_real_zeros",
    "lambert_w0",
    "newton_solve",
    "path_eval",
    "rs_remainder",
    "score_path",
    "search_split_indices",
    "section_eval",
    "spira_term_count",
    "theta",
    "theta_prime",
    "trace_pair",
    "trace_zero",
    "use_backend",
    "verify_noncolliding",
    "z_value",
    "z_value_and_derivative",
    "zeta_em",
]
