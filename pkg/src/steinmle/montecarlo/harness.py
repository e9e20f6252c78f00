"""Simulation harness: empirical distances, MSE sweeps, coverage checks.

Protocol for the distance experiments: draw ``trials`` independent samples
of size n, evaluate the estimator on each, standardise (by
sqrt(n i(theta0)) toward Z, or by sqrt(n) toward N(0, theta0) on the
boundary route), push the standardised values through the test function h,
and compare the trial mean of h with the Gaussian expectation of h computed
by quadrature.  The reported "empirical distance" is that h-specific
discrepancy; it is a lower proxy of the class-supremum distance that the
attached bound controls, never an estimate of the supremum itself.

Reproducibility: trial t consumes the dedicated stream Philox(seed) jumped
t times, so results are independent of how trials are scheduled; trial
summaries are reduced with exactly-rounded summation (fsum), which is
permutation-invariant.  Identical config therefore yields byte-identical
serialised reports at any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import stdev
from typing import Callable, Optional, Sequence

import numpy as np

from .. import registry
from ..errors import DegenerateSampleError, DomainError
from ..msebound import BetaParams, beta_ingredients, minimal_n
from ..specfun import normal_expectation
from ..steincore import (
    BoundBreakdown,
    TestFunction,
    conservative_ci,
    inv_quadratic_test_function,
    kolmogorov_from_bw,
)
from . import backends
from ._pykernels import RNG_ALGORITHM

__all__ = [
    "SimulationConfig",
    "SimulationReport",
    "CoverageResult",
    "ConditionalCheckResult",
    "sample",
    "mle",
    "run_simulation",
    "run_mse_sweep",
    "ci_coverage",
    "conditional_expectation_check",
    "mle_abs_error_sampler",
    "reports_to_csv",
]

REPORT_CSV_COLUMNS = (
    "model",
    "theta0",
    "n",
    "trials",
    "seed",
    "empirical_distance",
    "empirical_mse",
    "bound_total",
    "error",
)


@dataclass(frozen=True)
class SimulationConfig:
    """One distance experiment: model, true parameter, sizes, seed, h."""

    model: str
    theta0: float
    n: int
    trials: int = 10000
    seed: int = 0
    test_function: TestFunction = field(default_factory=inv_quadratic_test_function)
    beta: float = 1.0  # Beta model's known second shape
    epsilon: Optional[float] = None
    c: object = "auto"  # Poisson perturbation constant
    workers: int = 1
    backend: Optional[str] = None

    def __post_init__(self):
        if self.model not in registry.MODEL_NAMES:
            raise DomainError(
                f"model must be one of {registry.MODEL_NAMES}, got {self.model!r}"
            )
        for name in ("n", "trials", "workers"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {self.seed!r}")


@dataclass(frozen=True)
class SimulationReport:
    """Outcome of one experiment row.

    ``target`` records which quantity ``bound_total`` controls: the
    h-specific distance ("distance") or the estimator MSE ("mse").  The
    ``error`` column of the CSV schema is bound minus the corresponding
    empirical value.
    """

    model: str
    theta0: float
    n: int
    trials: int
    seed: int
    empirical_distance: float
    empirical_mse: float
    bound_total: float
    bound_terms: BoundBreakdown
    standard_error: Optional[float]
    expected_h: float
    target: str = "distance"
    rng_algorithm: str = RNG_ALGORITHM
    backend: str = "python"

    @property
    def empirical(self) -> float:
        return self.empirical_mse if self.target == "mse" else self.empirical_distance

    @property
    def error(self) -> float:
        return self.bound_total - self.empirical

    def to_dict(self) -> dict:
        return {
            "schema": "steinmle/simulation-report/v1",
            "model": self.model,
            "theta0": self.theta0,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "empirical_distance": self.empirical_distance,
            "empirical_mse": self.empirical_mse,
            "bound_total": self.bound_total,
            "bound_terms": self.bound_terms.to_dict(),
            "standard_error": self.standard_error,
            "expected_h": self.expected_h,
            "target": self.target,
            "error": self.error,
            "rng_algorithm": self.rng_algorithm,
            "backend": self.backend,
        }

    def csv_row(self) -> tuple:
        return (
            self.model,
            repr(self.theta0),
            str(self.n),
            str(self.trials),
            str(self.seed),
            repr(self.empirical_distance),
            repr(self.empirical_mse),
            repr(self.bound_total),
            repr(self.error),
        )


def reports_to_csv(reports: Sequence[SimulationReport]) -> str:
    """Render reports in the fixed CSV schema (comma, UTF-8, header row)."""
    lines = [",".join(REPORT_CSV_COLUMNS)]
    for rep in reports:
        lines.append(",".join(rep.csv_row()))
    return "\n".join(lines) + "\n"


def sample(model: str, theta0: float, n: int, rng, *, beta: float = 1.0) -> np.ndarray:
    """n independent draws from a registered model.

    ``rng`` is either a master seed (the draws come from the trial-0 stream)
    or a numpy Generator to consume in place.
    """
    entry = registry.get_model(model, beta=beta)
    entry.validate_theta0(theta0)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    backend = backends.get_backend()
    if isinstance(rng, np.random.Generator):
        return backend.draw(model, theta0, beta, n, rng)
    if isinstance(rng, bool) or not isinstance(rng, int) or rng < 0:
        raise DomainError(f"rng must be a seed (nonnegative int) or a numpy Generator, got {rng!r}")
    return backend.draw_sample(model, theta0, beta, n, rng, 0)


def mle(model: str, sample_values, *, beta: float = 1.0) -> float:
    """The registered model's maximum-likelihood estimate for a raw sample."""
    entry = registry.get_model(model, beta=beta)
    return entry.mle(sample_values)


def _stats_chunk(args):
    backend_name, model, theta0, beta, n, seed, t0, t1 = args
    backend = backends.get_backend(backend_name)
    return backend.trial_stats(model, theta0, beta, n, seed, t0, t1)


def _collect_stats(
    model: str,
    theta0: float,
    beta: float,
    n: int,
    seed: int,
    trial_start: int,
    trials: int,
    workers: int,
    backend_name: Optional[str],
) -> np.ndarray:
    resolved = backends.active_backend(backend_name)
    if workers <= 1:
        return _stats_chunk((resolved, model, theta0, beta, n, seed, trial_start, trial_start + trials))
    chunk = max(1, math.ceil(trials / (workers * 4)))
    tasks = []
    t = trial_start
    while t < trial_start + trials:
        hi = min(t + chunk, trial_start + trials)
        tasks.append((resolved, model, theta0, beta, n, seed, t, hi))
        t = hi
    out = np.empty(trials)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for task, res in zip(tasks, pool.map(_stats_chunk, tasks)):
            lo = task[6] - trial_start
            out[lo : lo + len(res)] = res
    return out


def _theta_hats(entry, stats: np.ndarray, n: int) -> np.ndarray:
    return np.array([entry.mle_from_stat(float(s), n) for s in stats])


def run_simulation(cfg: SimulationConfig) -> SimulationReport:
    """Run one distance experiment and attach the model's bound.

    The bound is h-weighted for the exponential models (their assembler
    takes the norms of the configured test function); the Poisson and Beta
    closed forms absorb the norms at the class ceiling and dominate any h in
    the bounded-Lipschitz class.  Raises the underlying validation error if
    the bound is undefined at (theta0, n), e.g. a Beta sample size below the
    minimal admissible n.
    """
    entry = registry.get_model(cfg.model, beta=cfg.beta)
    theta0 = entry.validate_theta0(cfg.theta0)
    h = cfg.test_function
    bound = entry.distance_bound(
        theta0, cfg.n, h_weights=h.weights, epsilon=cfg.epsilon, c=cfg.c
    )

    stats = _collect_stats(
        cfg.model, theta0, cfg.beta, cfg.n, cfg.seed, 0, cfg.trials, cfg.workers, cfg.backend
    )
    theta_hats = _theta_hats(entry, stats, cfg.n)
    standardized = entry.standardize_scale(theta0, cfg.n) * (theta_hats - theta0)
    h_values = [h.evaluator(float(v)) for v in standardized]
    expected_h = normal_expectation(h, scale=entry.target_sigma(theta0))
    mean_h = math.fsum(h_values) / cfg.trials
    empirical_distance = abs(mean_h - expected_h)
    empirical_mse = math.fsum((t - theta0) ** 2 for t in theta_hats) / cfg.trials
    se = stdev(h_values) / math.sqrt(cfg.trials) if cfg.trials > 1 else None
    return SimulationReport(
        model=cfg.model,
        theta0=theta0,
        n=cfg.n,
        trials=cfg.trials,
        seed=cfg.seed,
        empirical_distance=empirical_distance,
        empirical_mse=empirical_mse,
        bound_total=bound.total,
        bound_terms=bound,
        standard_error=se,
        expected_h=expected_h,
        target="distance",
        backend=backends.active_backend(cfg.backend),
    )


def run_mse_sweep(
    params: BetaParams,
    n_values: Sequence[int],
    trials: int = 10000,
    seed: int = 0,
    workers: int = 1,
    backend: Optional[str] = None,
) -> list:
    """Empirical MSE against its bound over a range of Beta sample sizes.

    Every n must be at least the minimal admissible size.  Row r uses trial
    streams [r * trials, (r+1) * trials) off the master seed, so rows are
    independent and any row subset is reproducible in isolation.
    """
    entry = registry.get_model("beta", beta=params.beta)
    n_list = [int(n) for n in n_values]
    if not n_list:
        raise DomainError("n_values must be nonempty")
    floor_n = minimal_n(beta_ingredients(params))
    bad = [n for n in n_list if n < floor_n]
    if bad:
        raise DomainError(f"n below minimal n = {floor_n}: {bad}")
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    h = inv_quadratic_test_function()
    expected_h = normal_expectation(h, scale=1.0)
    reports = []
    for row, n in enumerate(n_list):
        stats = _collect_stats(
            "beta", params.theta0, params.beta, n, seed, row * trials, trials, workers, backend
        )
        theta_hats = _theta_hats(entry, stats, n)
        scale = entry.standardize_scale(params.theta0, n)
        h_values = [h.evaluator(float(scale * (t - params.theta0))) for t in theta_hats]
        mean_h = math.fsum(h_values) / trials
        empirical_mse = math.fsum((t - params.theta0) ** 2 for t in theta_hats) / trials
        mse_bound = entry.mse_bound(params.theta0, n)
        reports.append(
            SimulationReport(
                model="beta",
                theta0=params.theta0,
                n=n,
                trials=trials,
                seed=seed,
                empirical_distance=abs(mean_h - expected_h),
                empirical_mse=empirical_mse,
                bound_total=mse_bound,
                bound_terms=BoundBreakdown(terms=(("mse_bound", mse_bound),)),
                standard_error=stdev(h_values) / math.sqrt(trials) if trials > 1 else None,
                expected_h=expected_h,
                target="mse",
                backend=backends.active_backend(backend),
            )
        )
    return reports


@dataclass(frozen=True)
class CoverageResult:
    coverage: float
    trials: int
    b_k: float
    degenerate: bool
    alpha: float


def ci_coverage(
    model: str,
    theta0: float,
    n: int,
    alpha: float,
    trials: int,
    seed: int = 0,
    *,
    beta: float = 1.0,
    workers: int = 1,
    backend: Optional[str] = None,
) -> CoverageResult:
    """Fraction of conservative intervals containing the true parameter.

    B_K is the Kolmogorov conversion of the model's whole-class distance
    bound.  Degenerate (whole-line) intervals count as covering.  Only
    models standardised toward the unit normal are supported; the Poisson
    boundary route targets N(0, theta0) and is rejected.
    """
    entry = registry.get_model(model, beta=beta)
    if not entry.supports_ci:
        raise DomainError(
            f"{model}: the conservative interval construction requires the "
            "unit-normal standardisation; the boundary route targets N(0, theta0)"
        )
    theta0 = entry.validate_theta0(theta0)
    if not (isinstance(alpha, float) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie strictly in (0, 1), got {alpha!r}")
    bound = entry.distance_bound(theta0, n, h_weights=(1.0, 1.0))
    b_k = kolmogorov_from_bw(bound.total)
    if b_k >= alpha / 2.0:
        return CoverageResult(coverage=1.0, trials=trials, b_k=b_k, degenerate=True, alpha=alpha)
    fisher = entry.fisher_info(theta0)
    stats = _collect_stats(model, theta0, beta, n, seed, 0, trials, workers, backend)
    theta_hats = _theta_hats(entry, stats, n)
    covered = 0
    for th in theta_hats:
        ci = conservative_ci(float(th), n, fisher, alpha, b_k)
        if ci.degenerate or ci.contains(theta0):
            covered += 1
    return CoverageResult(
        coverage=covered / trials, trials=trials, b_k=b_k, degenerate=False, alpha=alpha
    )


@dataclass(frozen=True)
class ConditionalCheckResult:
    lhs: float  # E[f(M) | M <= eps] estimate
    rhs: float  # E[f(M)] estimate
    lhs_se: float
    rhs_se: float
    conditioned_count: int
    trials: int

    @property
    def combined_se(self) -> float:
        return math.hypot(self.lhs_se, self.rhs_se)


def conditional_expectation_check(
    dist: Callable[[np.random.Generator, int], np.ndarray],
    f: Callable[[float], float],
    eps: float,
    trials: int,
    seed: int = 0,
) -> ConditionalCheckResult:
    """Monte Carlo estimates of E[f(M) | M <= eps] and E[f(M)].

    For increasing nonnegative f the conditioned mean cannot exceed the
    unconditioned one; the test suite asserts the estimated gap against the
    combined standard error.  ``dist`` draws M values: a callable
    (generator, size) -> array.  An empty conditioning event is an error.
    """
    if not (isinstance(eps, (int, float)) and eps > 0.0):
        raise DomainError(f"eps must be positive, got {eps!r}")
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 2:
        raise DomainError(f"trials must be an integer >= 2, got {trials!r}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    m_draws = np.asarray(dist(rng, trials), dtype=float)
    if m_draws.shape != (trials,):
        raise DomainError(f"dist must return {trials} draws, got shape {m_draws.shape}")
    if np.any(m_draws < 0.0):
        raise DomainError("dist must produce nonnegative draws")
    f_all = np.array([f(float(m)) for m in m_draws])
    inside = m_draws <= eps
    count = int(inside.sum())
    if count == 0:
        raise DegenerateSampleError(
            f"empty conditioning event: no draws with M <= {eps!r} in {trials} trials"
        )
    f_in = f_all[inside]
    lhs = float(math.fsum(f_in) / count)
    rhs = float(math.fsum(f_all) / trials)
    lhs_se = float(f_in.std(ddof=1) / math.sqrt(count)) if count > 1 else float("inf")
    rhs_se = float(f_all.std(ddof=1) / math.sqrt(trials))
    return ConditionalCheckResult(
        lhs=lhs, rhs=rhs, lhs_se=lhs_se, rhs_se=rhs_se, conditioned_count=count, trials=trials
    )


def mle_abs_error_sampler(
    model: str, theta0: float, n: int, *, beta: float = 1.0
) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sampler of M = |theta_hat - theta0| for use with the conditional check."""
    backend = backends.get_backend()
    entry = registry.get_model(model, beta=beta)
    entry.validate_theta0(theta0)

    def draw_m(rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty(size)
        for i in range(size):
            x = backend.draw(model, theta0, beta, n, rng)
            stat = float(np.log(x).mean()) if entry.stat_kind == "mean-log" else float(x.mean())
            out[i] = abs(entry.mle_from_stat(stat, n) - theta0)
        return out

    return draw_m
