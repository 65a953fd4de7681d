"""Riemannian ascent on unitary symmetric matrices, with a BD-RIS
rate-maximization application and experiment harness."""

from .bdris import (
    ChannelSet,
    InapplicableMethodError,
    RateObjective,
    Scenario,
    euclid_grad,
    gen_channels,
    h_eq,
    low_cost_bdris,
    mo_u_proj_baseline,
    per_phase_opt,
    rate,
    rate_bits,
)
from .harness import (
    BenchRow,
    ExperimentResult,
    ResultRow,
    RunSpec,
    bench,
    build_run_spec,
    load_run_spec,
    run_experiment,
)
from .linalg import NumericalError, eig_real_symmetric, expm_skew_hermitian, takagi
from .manifold import (
    DRIFT_TOL,
    GeodesicFrame,
    RetractionNonUniqueWarning,
    TangentDirection,
    UPoint,
    UsPoint,
    point_from_factor,
    u_geodesic,
    u_random,
    u_tangent_project,
    us_geodesic_frame,
    us_point_at,
    us_random,
    us_retract,
    us_tangent_project,
)
from .optimizer import (
    IterationRecord,
    IterationTrace,
    Objective,
    OptimizerConfig,
    optimize_u_armijo,
    optimize_us,
)

__version__ = "0.1.0"

__all__ = [
    "BenchRow",
    "ChannelSet",
    "DRIFT_TOL",
    "ExperimentResult",
    "GeodesicFrame",
    "InapplicableMethodError",
    "IterationRecord",
    "IterationTrace",
    "NumericalError",
    "Objective",
    "OptimizerConfig",
    "RateObjective",
    "ResultRow",
    "RetractionNonUniqueWarning",
    "RunSpec",
    "Scenario",
    "TangentDirection",
    "UPoint",
    "UsPoint",
    "bench",
    "build_run_spec",
    "eig_real_symmetric",
    "euclid_grad",
    "expm_skew_hermitian",
    "gen_channels",
    "h_eq",
    "load_run_spec",
    "low_cost_bdris",
    "mo_u_proj_baseline",
    "optimize_u_armijo",
    "optimize_us",
    "per_phase_opt",
    "point_from_factor",
    "rate",
    "rate_bits",
    "run_experiment",
    "takagi",
    "u_geodesic",
    "u_random",
    "u_tangent_project",
    "us_geodesic_frame",
    "us_point_at",
    "us_random",
    "us_retract",
    "us_tangent_project",
]
