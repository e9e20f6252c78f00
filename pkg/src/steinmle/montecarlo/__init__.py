"""Monte Carlo verification harness with selectable sampling kernels."""

from .backends import active_backend, available_backends, get_backend
from .harness import (
    ConditionalCheckResult,
    CoverageResult,
    SimulationConfig,
    SimulationReport,
    ci_coverage,
    conditional_expectation_check,
    mle,
    mle_abs_error_sampler,
    reports_to_csv,
    run_mse_sweep,
    run_simulation,
    sample,
)

__all__ = [
    "ConditionalCheckResult",
    "CoverageResult",
    "SimulationConfig",
    "SimulationReport",
    "active_backend",
    "available_backends",
    "get_backend",
    "ci_coverage",
    "conditional_expectation_check",
    "mle",
    "mle_abs_error_sampler",
    "reports_to_csv",
    "run_mse_sweep",
    "run_simulation",
    "sample",
]
