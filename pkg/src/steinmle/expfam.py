"""One-parameter exponential families and the two exponential worked models.

A density of the form exp{ k(theta) T(x) - A(theta) + S(x) } on a support
that does not depend on theta.  The score of one observation is
k'(theta) (T(x) - D(theta)) with D = A'/k', which gives the two generic
ingredient formulas implemented here:

    fisher_info        = k'(theta0)^2 * Var T(X)
    third score moment = |k'(theta0)|^3 * E|T(X) - D(theta0)|^3

The exponential distribution enters twice: parametrised by its rate (the
canonical case, estimator 1/sample-mean) and by its mean (non-canonical,
estimator the sample mean).  Both ship closed-form ingredient generators;
everything downstream of the moments is assembled by ``steincore``.

The constant ``EXP_THIRD_ABS_BOUND`` (2.41456) is a slightly rounded-up
bound on theta^3 * E|1/theta - X|^3 for X ~ Exp(theta); the exact value is
12/e - 2 ~= 2.4145533, and the test suite re-derives it by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

from .errors import DomainError
from .steincore import BoundIngredients

__all__ = [
    "ExpFamilySpec",
    "ModelDescriptor",
    "EXP_THIRD_ABS_BOUND",
    "exp_canonical_family",
    "exp_noncanonical_family",
    "expfam_fisher_info",
    "expfam_third_score_moment",
    "exp_canonical_ingredients",
    "exp_noncanonical_ingredients",
]

EXP_THIRD_ABS_BOUND = 2.41456


@dataclass(frozen=True)
class ExpFamilySpec:
    """Structural description of a one-parameter exponential family.

    ``support`` and ``theta_space`` are (low, high) interval endpoints; the
    support must not depend on theta.  ``k_prime`` must be nonvanishing on
    the parameter space, which makes D(theta) = A'(theta)/k'(theta)
    well-defined.
    """

    k: Callable[[float], float]
    k_prime: Callable[[float], float]
    A: Callable[[float], float]
    A_prime: Callable[[float], float]
    T: Callable[[float], float]
    S: Callable[[float], float]
    support: Tuple[float, float]
    theta_space: Tuple[float, float]

    def D(self, theta: float) -> float:
        kp = self.k_prime(theta)
        if kp == 0.0:
            raise DomainError(f"k'(theta) vanishes at theta={theta!r}")
        return self.A_prime(theta) / kp

    def _check_theta(self, theta: float) -> float:
        lo, hi = self.theta_space
        if not (lo < theta < hi):
            raise DomainError(
                f"theta={theta!r} outside the open parameter space ({lo!r}, {hi!r})"
            )
        return float(theta)


def exp_canonical_family() -> ExpFamilySpec:
    """Exponential distribution with rate theta: k(theta)=theta, T(x)=-x."""
    return ExpFamilySpec(
        k=lambda t: t,
        k_prime=lambda t: 1.0,
        A=lambda t: -math.log(t),
        A_prime=lambda t: -1.0 / t,
        T=lambda x: -x,
        S=lambda x: 0.0,
        support=(0.0, math.inf),
        theta_space=(0.0, math.inf),
    )


def exp_noncanonical_family() -> ExpFamilySpec:
    """Exponential distribution with mean theta: k(theta)=1/theta, T(x)=-x."""
    return ExpFamilySpec(
        k=lambda t: 1.0 / t,
        k_prime=lambda t: -1.0 / (t * t),
        A=lambda t: math.log(t),
        A_prime=lambda t: 1.0 / t,
        T=lambda x: -x,
        S=lambda x: 0.0,
        support=(0.0, math.inf),
        theta_space=(0.0, math.inf),
    )


def expfam_fisher_info(spec: ExpFamilySpec, theta0: float, var_T: float) -> float:
    """Expected information of one observation: k'(theta0)^2 * Var T."""
    theta0 = spec._check_theta(theta0)
    if not (isinstance(var_T, (int, float)) and math.isfinite(var_T)):
        raise DomainError(f"var_T must be a finite real, got {var_T!r}")
    if var_T <= 0.0:
        raise DomainError(
            f"degenerate family: Var T(X) must be positive, got {var_T!r}"
        )
    return spec.k_prime(theta0) ** 2 * var_T


def expfam_third_score_moment(
    spec: ExpFamilySpec, theta0: float, third_abs_central_T: float
) -> float:
    """Third absolute score moment: |k'(theta0)|^3 * E|T(X) - D(theta0)|^3."""
    theta0 = spec._check_theta(theta0)
    if not (isinstance(third_abs_central_T, (int, float)) and third_abs_central_T >= 0.0):
        raise DomainError(
            f"third_abs_central_T must be nonnegative, got {third_abs_central_T!r}"
        )
    return abs(spec.k_prime(theta0)) ** 3 * third_abs_central_T


def _check_theta0_eps(theta0, epsilon):
    if not (isinstance(theta0, (int, float)) and math.isfinite(theta0) and theta0 > 0):
        raise DomainError(f"theta0 must be a finite positive real, got {theta0!r}")
    theta0 = float(theta0)
    eps = theta0 / 2.0 if epsilon is None else float(epsilon)
    if not (0.0 < eps < theta0):
        # Theta = (0, inf): the epsilon-ball around theta0 must stay inside.
        raise DomainError(
            f"epsilon must lie in (0, theta0) = (0, {theta0!r}), got {eps!r}"
        )
    return theta0, eps


def exp_canonical_ingredients(
    theta0: float, n: int, epsilon: Optional[float] = None
) -> BoundIngredients:
    """Bound ingredients for the rate-parametrised exponential model.

    Estimator 1/sample-mean.  Requires n >= 3 for a finite MSE
    (n+2) theta0^2 / ((n-1)(n-2)).  The third-derivative sup
    2n/(theta0-eps)^3 holds for every sample, so the deterministic Taylor
    route applies.  The fourth estimator moment is finite only for n >= 5;
    it is unused on the deterministic route and stored as +inf below that.
    """
    theta0, eps = _check_theta0_eps(theta0, epsilon)
    if isinstance(n, bool) or not isinstance(n, int):
        raise DomainError(f"n must be an integer, got {n!r}")
    if n < 3:
        raise DomainError(f"canonical exponential MSE requires n >= 3, got {n}")
    mse = (n + 2) * theta0**2 / ((n - 1) * (n - 2))
    if n >= 5:
        # E[(1/mean)^k] = (n theta0)^k (n-1-k)!.../(n-1)! for k < n.
        mu = [1.0]
        for k in range(1, 5):
            mu.append((n * theta0) * mu[k - 1] / (n - k))
        fourth = mu[4] - 4 * theta0 * mu[3] + 6 * theta0**2 * mu[2] - 4 * theta0**3 * mu[1] + theta0**4
    else:
        fourth = math.inf
    return BoundIngredients(
        theta0=theta0,
        n=n,
        fisher_info=1.0 / theta0**2,
        third_abs_score_moment=EXP_THIRD_ABS_BOUND / theta0**3,
        mse=mse,
        fourth_mle_moment=fourth,
        sup_third_deriv=2.0 * n / (theta0 - eps) ** 3,
        r2_conditional_bound=0.0,  # canonical: l'' == -n i(theta0) identically
        epsilon=eps,
        sup_third_is_deterministic=True,
    )


def exp_noncanonical_ingredients(
    theta0: float, n: int, epsilon: Optional[float] = None
) -> BoundIngredients:
    """Bound ingredients for the mean-parametrised exponential model.

    Estimator the sample mean (Gamma(n, n/theta0) distributed), MSE
    theta0^2/n, fourth moment (3 theta0^4/n^2)(2/n + 1).  The conditional R2
    mean is bounded by 2/theta0 and the third-derivative sup by
    4n(2 theta0 + eps)/(theta0 - eps)^4, which is sample-dependent, so the
    Cauchy-Schwarz Taylor route is used.
    """
    theta0, eps = _check_theta0_eps(theta0, epsilon)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return BoundIngredients(
        theta0=theta0,
        n=n,
        fisher_info=1.0 / theta0**2,
        third_abs_score_moment=EXP_THIRD_ABS_BOUND / theta0**3,
        mse=theta0**2 / n,
        fourth_mle_moment=(3.0 * theta0**4 / n**2) * (2.0 / n + 1.0),
        sup_third_deriv=4.0 * n * (2.0 * theta0 + eps) / (theta0 - eps) ** 4,
        r2_conditional_bound=2.0 / theta0,
        epsilon=eps,
        sup_third_is_deterministic=False,
    )


@dataclass(frozen=True)
class ModelDescriptor:
    """A registered model at a fixed true parameter.

    ``mle`` maps a raw sample to the estimate; ``ingredients_for`` produces
    the bound ingredients at (theta0, n, epsilon).  Used by the registry and
    serialised (via the ingredients) for audit output.
    """

    name: str
    theta0: float
    closed_form_mle: bool
    mle: Callable[[Sequence[float]], float]
    ingredients_for: Callable[[float, int, Optional[float]], BoundIngredients]

    def audit(self, n: int, epsilon: Optional[float] = None) -> dict:
        ing = self.ingredients_for(self.theta0, n, epsilon)
        return {"model": self.name, "ingredients": ing.to_dict()}
