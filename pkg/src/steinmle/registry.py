"""Model registry: the four worked models keyed by stable names.

Each entry bundles what the Monte Carlo harness and the CLI need to treat a
model uniformly: parameter validation, the estimator (from a raw sample or
from the per-trial sufficient statistic), the standardisation used for the
distance experiments, the attached bound, and a JSON-serialisable audit of
the ingredient values.

Standardisation targets differ by route: the interior models compare
sqrt(n * i(theta0)) (theta_hat - theta0) with the unit normal, while the
boundary-perturbed Poisson compares sqrt(n) (theta_hat - theta0) with
N(0, theta0).
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from . import boundary, expfam, msebound
from .errors import DegenerateSampleError, DomainError, UnknownModelError
from .expfam import ModelDescriptor
from .steincore import BoundBreakdown, mle_bound_general

__all__ = ["MODEL_NAMES", "get_model", "RegistryEntry"]

MODEL_NAMES = ("exp-canonical", "exp-noncanonical", "poisson", "beta")


def _as_clean_sample(sample) -> np.ndarray:
    arr = np.asarray(list(sample), dtype=float)
    if arr.size == 0:
        raise DegenerateSampleError("sample must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise DomainError("sample contains non-finite values")
    return arr


class RegistryEntry:
    """Base behaviour shared by all registered models."""

    name: str = ""
    closed_form_mle: bool = True
    stat_kind: str = "mean"  # per-trial sufficient statistic
    supports_ci: bool = True

    def validate_theta0(self, theta0: float) -> float:
        if not (isinstance(theta0, (int, float)) and math.isfinite(theta0) and theta0 > 0):
            raise DomainError(f"{self.name}: theta0 must be a finite positive real, got {theta0!r}")
        return float(theta0)

    def fisher_info(self, theta0: float) -> float:
        raise NotImplementedError

    def standardize_scale(self, theta0: float, n: int) -> float:
        return math.sqrt(n * self.fisher_info(theta0))

    def target_sigma(self, theta0: float) -> float:
        """Standard deviation of the normal the standardised estimator targets."""
        return 1.0

    def mle(self, sample: Sequence[float]) -> float:
        raise NotImplementedError

    def mle_from_stat(self, stat: float, n: int) -> float:
        raise NotImplementedError

    def distance_bound(
        self, theta0: float, n: int, h_weights=(1.0, 1.0), epsilon: Optional[float] = None, c="auto"
    ) -> BoundBreakdown:
        raise NotImplementedError

    def mse_bound(self, theta0: float, n: int):
        """Model MSE bound where one exists (Beta only); None otherwise."""
        return None

    def audit(self, theta0: float, n: int, epsilon: Optional[float] = None) -> dict:
        raise NotImplementedError


class _ExpCanonical(RegistryEntry):
    name = "exp-canonical"

    def fisher_info(self, theta0):
        return 1.0 / self.validate_theta0(theta0) ** 2

    def mle(self, sample):
        arr = _as_clean_sample(sample)
        mean = float(arr.mean())
        if mean == 0.0:
            raise DegenerateSampleError("exp-canonical estimator needs a nonzero sample mean")
        return 1.0 / mean

    def mle_from_stat(self, stat, n):
        if stat == 0.0:
            raise DegenerateSampleError("exp-canonical estimator needs a nonzero sample mean")
        return 1.0 / stat

    def descriptor(self, theta0) -> ModelDescriptor:
        return ModelDescriptor(
            name=self.name,
            theta0=self.validate_theta0(theta0),
            closed_form_mle=True,
            mle=self.mle,
            ingredients_for=expfam.exp_canonical_ingredients,
        )

    def distance_bound(self, theta0, n, h_weights=(1.0, 1.0), epsilon=None, c="auto"):
        ing = expfam.exp_canonical_ingredients(theta0, n, epsilon)
        return mle_bound_general(ing, h_weights)

    def audit(self, theta0, n, epsilon=None):
        return self.descriptor(theta0).audit(n, epsilon)


class _ExpNonCanonical(_ExpCanonical):
    name = "exp-noncanonical"

    def mle(self, sample):
        return float(_as_clean_sample(sample).mean())

    def mle_from_stat(self, stat, n):
        return stat

    def descriptor(self, theta0) -> ModelDescriptor:
        return ModelDescriptor(
            name=self.name,
            theta0=self.validate_theta0(theta0),
            closed_form_mle=True,
            mle=self.mle,
            ingredients_for=expfam.exp_noncanonical_ingredients,
        )

    def distance_bound(self, theta0, n, h_weights=(1.0, 1.0), epsilon=None, c="auto"):
        ing = expfam.exp_noncanonical_ingredients(theta0, n, epsilon)
        return mle_bound_general(ing, h_weights)


class _Poisson(RegistryEntry):
    name = "poisson"
    supports_ci = False  # boundary route targets N(0, theta0), not Z

    def validate_theta0(self, theta0):
        if not (isinstance(theta0, (int, float)) and math.isfinite(theta0) and theta0 >= 0):
            raise DomainError(f"poisson: theta0 must be finite and >= 0, got {theta0!r}")
        return float(theta0)

    def fisher_info(self, theta0):
        theta0 = self.validate_theta0(theta0)
        if theta0 == 0.0:
            raise DomainError("poisson: the information number degenerates at theta0 = 0")
        return 1.0 / theta0

    def standardize_scale(self, theta0, n):
        return math.sqrt(n)

    def target_sigma(self, theta0):
        return math.sqrt(self.validate_theta0(theta0))

    def mle(self, sample):
        return float(_as_clean_sample(sample).mean())

    def mle_from_stat(self, stat, n):
        return stat

    def distance_bound(self, theta0, n, h_weights=(1.0, 1.0), epsilon=None, c="auto"):
        # The closed-form Poisson bound already absorbs the test-function
        # norms at their class ceiling (sup <= 1, Lipschitz <= 1), so it
        # dominates the h-discrepancy for any h in the class.
        return boundary.poisson_bound(theta0, n, c)

    def audit(self, theta0, n, epsilon=None):
        bd = self.distance_bound(theta0, n)
        return {"model": self.name, "theta0": theta0, "n": n, "bound": bd.to_dict()}


class _Beta(RegistryEntry):
    name = "beta"
    closed_form_mle = False
    stat_kind = "mean-log"

    def __init__(self, beta: float = 1.0):
        if not (isinstance(beta, (int, float)) and math.isfinite(beta) and beta > 0):
            raise DomainError(f"beta: known shape must be a finite positive real, got {beta!r}")
        self.beta = float(beta)

    def fisher_info(self, theta0):
        p = msebound.BetaParams(self.validate_theta0(theta0), self.beta)
        return msebound.beta_ingredients(p).fisher_info

    def mle(self, sample):
        return msebound.beta_mle(list(sample), self.beta)

    def mle_from_stat(self, stat, n):
        if stat >= 0.0:
            raise DegenerateSampleError("beta estimator needs a negative mean log-observation")
        if self.beta == 1.0:
            return -1.0 / stat
        return msebound._beta_mle_from_stats(n, stat * n, self.beta)

    def distance_bound(self, theta0, n, h_weights=(1.0, 1.0), epsilon=None, c="auto"):
        # Weights are absorbed at their class ceiling, as for Poisson.
        p = msebound.BetaParams(self.validate_theta0(theta0), self.beta)
        return msebound.beta_distance_bound(p, n)

    def mse_bound(self, theta0, n):
        p = msebound.BetaParams(self.validate_theta0(theta0), self.beta)
        b3 = msebound.beta_b3(p, n)
        return b3 * b3 / n

    def audit(self, theta0, n, epsilon=None):
        p = msebound.BetaParams(self.validate_theta0(theta0), self.beta)
        out = {"model": self.name, "theta0": theta0, "beta": self.beta}
        out.update(msebound.beta_b_constants(p))
        if n is not None:
            out["n"] = n
            out["B3"] = msebound.beta_b3(p, n)
        return out


def get_model(name: str, beta: float = 1.0) -> RegistryEntry:
    """Look up a registry entry; ``beta`` is the Beta model's known shape."""
    if name == "exp-canonical":
        return _ExpCanonical()
    if name == "exp-noncanonical":
        return _ExpNonCanonical()
    if name == "poisson":
        return _Poisson()
    if name == "beta":
        return _Beta(beta)
    raise UnknownModelError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")
