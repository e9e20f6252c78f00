"""Generic normal-approximation bound assembly.

The estimator-to-normal distance bounds computed here all have the additive
shape

    score term + Markov tail term + R2 term + Taylor remainder term,

where the score term alone bounds the distance for the standardised score
statistic, and the remaining terms price the Taylor expansion of the score
around the estimator.  Model-specific moments enter through
:class:`BoundIngredients`; the assemblers are pure arithmetic so every model
shares one audited code path.

Conventions
-----------
* ``h_weights = (sup_norm, lip_norm)`` weights each term by the norm of the
  test function it multiplies.  ``(1, 1)`` gives the bound for the whole
  bounded-Lipschitz class (sup + Lipschitz norm <= 1), which is the bounded
  Wasserstein bound; the simulation harness passes the norms of its concrete
  test function instead.
* ``sup_third_deriv`` stores the full n-dependent bound on the third
  log-likelihood derivative (e.g. 16n/theta0^3); assemblers never inject
  additional n factors.
* When ``sup_third_is_deterministic`` is set the third-derivative bound holds
  for every sample, so the Taylor term multiplies it by the MSE directly
  instead of taking the Cauchy-Schwarz route through the fourth moment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Tuple

from .errors import DomainError
from .specfun import std_normal_quantile

__all__ = [
    "TestFunction",
    "inv_quadratic_test_function",
    "BoundIngredients",
    "BoundBreakdown",
    "ConfidenceInterval",
    "score_bound",
    "mle_bound_general",
    "kolmogorov_from_bw",
    "conservative_ci",
    "direct_sum_bound",
    "holder_third_from_fourth",
]

TERM_SCORE = "score"
TERM_MARKOV = "markov_tail"
TERM_R2 = "r2"
TERM_TAYLOR = "taylor_remainder"


def _check_nonneg(value, what, allow_inf=True):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DomainError(f"{what} must be a real number, got {value!r}")
    v = float(value)
    if math.isnan(v):
        raise DomainError(f"{what} must not be NaN")
    if v < 0.0:
        raise DomainError(f"{what} must be nonnegative, got {v!r}")
    if not allow_inf and math.isinf(v):
        raise DomainError(f"{what} must be finite, got {v!r}")
    return v


@dataclass(frozen=True)
class TestFunction:
    """A test function h with its sup norm and Lipschitz constant.

    ``sup_norm + lip_norm <= 1`` puts h inside the bounded-Lipschitz class
    over which the bounded Wasserstein distance takes its supremum; the
    harness relies on that containment when comparing h-discrepancies to
    whole-class bounds.
    """

    __test__ = False  # keep pytest collection away from the Test* name

    evaluator: Callable[[float], float]
    sup_norm: float
    lip_norm: float
    label: str = ""

    def __post_init__(self):
        if not callable(self.evaluator):
            raise DomainError("TestFunction.evaluator must be callable")
        _check_nonneg(self.sup_norm, "sup_norm", allow_inf=False)
        _check_nonneg(self.lip_norm, "lip_norm", allow_inf=False)

    @property
    def weights(self) -> Tuple[float, float]:
        return (self.sup_norm, self.lip_norm)

    def in_bounded_lipschitz_class(self, tol=1e-12) -> bool:
        return self.sup_norm + self.lip_norm <= 1.0 + tol


def inv_quadratic_test_function() -> TestFunction:
    """The harness default h(x) = 1/(x^2 + 2).

    Exact norms: sup 1/2 at x = 0, Lipschitz constant 3*sqrt(1.5)/16
    (attained at x = sqrt(2/3)).  sup + lip ~= 0.7296 < 1, so h lies in the
    bounded-Lipschitz class.
    """
    return TestFunction(
        evaluator=lambda x: 1.0 / (x * x + 2.0),
        sup_norm=0.5,
        lip_norm=3.0 * math.sqrt(1.5) / 16.0,
        label="inv-quadratic",
    )


@dataclass(frozen=True)
class BoundIngredients:
    """Per-model moment inputs for the general estimator bound.

    fisher_info is the expected information of a single observation;
    third_abs_score_moment is E|d/dtheta log f(X_1|theta0)|^3 (or an upper
    bound on it, e.g. via Holder); mse and fourth_mle_moment are the second
    and fourth central moments of the estimator; r2_conditional_bound bounds
    the conditional mean of |(theta_hat - theta0)(l'' + n i)| given the
    estimator is epsilon-close; sup_third_deriv bounds the sup of |l'''| on
    the epsilon-neighbourhood (full n-dependent form).
    """

    theta0: float
    n: int
    fisher_info: float
    third_abs_score_moment: float
    mse: float
    fourth_mle_moment: float
    sup_third_deriv: float
    r2_conditional_bound: float
    epsilon: float
    sup_third_is_deterministic: bool = False

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise DomainError(f"n must be an integer, got {self.n!r}")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not (isinstance(self.theta0, (int, float)) and math.isfinite(self.theta0)):
            raise DomainError(f"theta0 must be a finite real, got {self.theta0!r}")
        fisher = _check_nonneg(self.fisher_info, "fisher_info", allow_inf=False)
        if fisher <= 0.0:
            raise DomainError(f"fisher_info must be positive, got {fisher!r}")
        _check_nonneg(self.third_abs_score_moment, "third_abs_score_moment")
        _check_nonneg(self.mse, "mse")
        _check_nonneg(self.fourth_mle_moment, "fourth_mle_moment")
        _check_nonneg(self.sup_third_deriv, "sup_third_deriv")
        _check_nonneg(self.r2_conditional_bound, "r2_conditional_bound")
        eps = _check_nonneg(self.epsilon, "epsilon", allow_inf=False)
        if eps <= 0.0:
            raise DomainError(f"epsilon must be positive, got {eps!r}")

    def to_dict(self):
        return {
            "theta0": self.theta0,
            "n": self.n,
            "fisher_info": self.fisher_info,
            "third_abs_score_moment": self.third_abs_score_moment,
            "mse": self.mse,
            "fourth_mle_moment": self.fourth_mle_moment,
            "sup_third_deriv": self.sup_third_deriv,
            "r2_conditional_bound": self.r2_conditional_bound,
            "epsilon": self.epsilon,
            "sup_third_is_deterministic": self.sup_third_is_deterministic,
        }


@dataclass(frozen=True)
class BoundBreakdown:
    """A labelled term-by-term decomposition of a bound and its total.

    The total is the exactly-rounded (fsum) sum of the term values, so
    permuting terms cannot change it.
    """

    terms: Tuple[Tuple[str, float], ...]
    total: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        terms = tuple((str(label), float(value)) for label, value in self.terms)
        for label, value in terms:
            if math.isnan(value):
                raise DomainError(f"breakdown term {label!r} is NaN")
            if value < 0.0:
                raise DomainError(f"breakdown term {label!r} is negative: {value!r}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "total", math.fsum(v for _, v in terms))

    @property
    def labels(self):
        return tuple(label for label, _ in self.terms)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.total)

    def term(self, label: str) -> float:
        for lab, value in self.terms:
            if lab == label:
                return value
        raise KeyError(label)

    def to_dict(self):
        return {
            "terms": [{"label": lab, "value": val} for lab, val in self.terms],
            "total": self.total,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv_rows(self):
        rows = [(lab, repr(val)) for lab, val in self.terms]
        rows.append(("total", repr(self.total)))
        return rows


@dataclass(frozen=True)
class ConfidenceInterval:
    """A (possibly degenerate) two-sided interval.

    When the Kolmogorov widening swallows the whole alpha/2 tail the interval
    is the real line; ``degenerate`` marks that case and both endpoints are
    infinite.
    """

    lower: float
    upper: float
    degenerate: bool = False

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _validate_weights(h_weights):
    try:
        sup, lip = h_weights
    except (TypeError, ValueError) as exc:
        raise DomainError(
            f"h_weights must be a (sup_norm, lip_norm) pair, got {h_weights!r}"
        ) from exc
    return _check_nonneg(sup, "sup weight", allow_inf=False), _check_nonneg(
        lip, "lip weight", allow_inf=False
    )


def score_bound(ing: BoundIngredients, h_weights=(1.0, 1.0)) -> BoundBreakdown:
    """Distance bound for the standardised score statistic.

    Single term  lip * (1/sqrt(n)) * (2 + third_moment / fisher^{3/2}).
    With weights (1, 1) this is the bounded Wasserstein bound for the score.
    """
    _, lip = _validate_weights(h_weights)
    value = (
        lip
        / math.sqrt(ing.n)
        * (2.0 + ing.third_abs_score_moment / ing.fisher_info**1.5)
    )
    return BoundBreakdown(terms=((TERM_SCORE, value),))


def mle_bound_general(ing: BoundIngredients, h_weights=(1.0, 1.0)) -> BoundBreakdown:
    """Four-term distance bound for sqrt(n * i(theta0)) (theta_hat - theta0).

    Terms: the score bound; a Markov tail term 2*sup*MSE/eps^2; the
    conditional R2 term; and the Taylor remainder term, which uses
    sup_third_deriv * sqrt(fourth moment) via Cauchy-Schwarz, or
    sup_third_deriv * MSE when the sup bound is sample-free.

    Non-finite ingredient values propagate into a non-finite total rather
    than raising; check ``BoundBreakdown.is_finite``.
    """
    sup, lip = _validate_weights(h_weights)
    root_ni = math.sqrt(ing.n * ing.fisher_info)
    t_score = (
        lip
        / math.sqrt(ing.n)
        * (2.0 + ing.third_abs_score_moment / ing.fisher_info**1.5)
    )
    t_markov = 2.0 * sup * ing.mse / ing.epsilon**2
    t_r2 = lip / root_ni * ing.r2_conditional_bound
    if ing.sup_third_is_deterministic:
        taylor_factor = ing.sup_third_deriv * ing.mse
    else:
        taylor_factor = ing.sup_third_deriv * math.sqrt(ing.fourth_mle_moment)
    t_taylor = lip / root_ni * 0.5 * taylor_factor
    return BoundBreakdown(
        terms=(
            (TERM_SCORE, t_score),
            (TERM_MARKOV, t_markov),
            (TERM_R2, t_r2),
            (TERM_TAYLOR, t_taylor),
        )
    )


def kolmogorov_from_bw(bw_bound: float) -> float:
    """Kolmogorov-distance bound from a bounded-Wasserstein bound: 2*sqrt(b)."""
    b = _check_nonneg(bw_bound, "bounded Wasserstein bound")
    return 2.0 * math.sqrt(b)


def conservative_ci(
    theta_hat: float,
    n: int,
    fisher_info: float,
    alpha: float,
    b_k: float,
) -> ConfidenceInterval:
    """Conservative 100(1-alpha)% interval widening normal quantiles by b_k.

    ( theta_hat - PhiInv(1 - alpha/2 + b_k)/sqrt(n i),
      theta_hat - PhiInv(alpha/2 - b_k)/sqrt(n i) ).

    When b_k >= alpha/2 both quantile arguments leave (0, 1) and the interval
    degenerates to the whole line (coverage trivially 1).
    """
    if not (isinstance(alpha, float) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie strictly in (0, 1), got {alpha!r}")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    fisher = _check_nonneg(fisher_info, "fisher_info", allow_inf=False)
    if fisher <= 0.0:
        raise DomainError(f"fisher_info must be positive, got {fisher!r}")
    bk = _check_nonneg(b_k, "b_k", allow_inf=False)
    lo_arg = alpha / 2.0 - bk
    hi_arg = 1.0 - alpha / 2.0 + bk
    if lo_arg <= 0.0 or hi_arg >= 1.0:
        return ConfidenceInterval(-math.inf, math.inf, degenerate=True)
    scale = math.sqrt(n * fisher)
    lower = theta_hat - std_normal_quantile(hi_arg) / scale
    upper = theta_hat - std_normal_quantile(lo_arg) / scale
    return ConfidenceInterval(lower, upper, degenerate=False)


def direct_sum_bound(sigma: float, third_abs_moment: float, n: int) -> float:
    """Distance bound for a normalised i.i.d. sum against N(0, sigma^2).

    (1/sqrt(n)) * (2 + third_abs_moment / sigma^3), for W = n^{-1/2} sum Y_i
    with E Y = 0, Var Y = sigma^2.  This is the route that skips the Taylor
    expansion entirely when the estimator already is a normalised sum.
    """
    s = _check_nonneg(sigma, "sigma", allow_inf=False)
    if s <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    m3 = _check_nonneg(third_abs_moment, "third_abs_moment")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return (2.0 + m3 / s**3) / math.sqrt(n)


def holder_third_from_fourth(fourth_moment: float) -> float:
    """Holder upper bound for a third absolute moment: fourth^(3/4)."""
    m4 = _check_nonneg(fourth_moment, "fourth_moment")
    return m4**0.75
