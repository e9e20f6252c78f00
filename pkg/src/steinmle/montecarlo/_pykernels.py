"""Pure numpy trial kernels: the fallback backend.

Both backends implement the same draw protocol so that a given
(seed, trial) pair produces the same sample stream:

* the stream for trial t is Philox4x64 keyed by the master seed and jumped
  t times (2^128 steps per jump), consumed one ``next_double`` per uniform;
* exponential draws invert the CDF: x = -log1p(-u) / rate;
* Poisson draws use sequential CDF search (one uniform per draw) for mean
  <= 30 and transformed rejection (PTRS, two uniforms per attempt) above;
* Beta draws take two uniforms and map them through inverse-CDF Gamma
  variates: B = G1/(G1 + G2) with G = gammaincinv(shape, u).

Within one backend results are bit-reproducible.  Across backends the
samples agree to a few ulps (numpy's SIMD log1p is not bit-identical to the
scalar libm used by the compiled kernel) and trial statistics to ~1e-13
relative (pairwise vs sequential summation); the parity test pins this.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import gammaincinv

from ..errors import DomainError, UnknownModelError

BACKEND_NAME = "python"

RNG_ALGORITHM = "philox4x64:jumped-per-trial"

# Uniforms of exactly 0.0 (probability 2^-53 per draw) would map to a
# boundary Beta observation; they are clamped to the smallest stream value.
_TINY_U = 2.0**-64

POISSON_INVERSION_CUT = 30.0

MODELS = ("exp-canonical", "exp-noncanonical", "poisson", "beta")


def make_generator(seed: int, trial: int) -> Generator:
    """The per-trial random stream: Philox keyed by seed, jumped per trial."""
    return Generator(Philox(key=seed).jumped(trial))


def _poisson_inversion(rng: Generator, lam: float, n: int) -> np.ndarray:
    u = rng.random(n)
    k = np.zeros(n)
    p = np.full(n, math.exp(-lam))
    cum = p.copy()
    active = u >= cum
    # Hard cap on the search depth; reaching it has probability ~1e-15.
    cap = int(lam + 60.0 * math.sqrt(lam + 1.0) + 100.0)
    steps = 0
    while active.any() and steps < cap:
        steps += 1
        ka = k[active] + 1.0
        k[active] = ka
        pa = p[active] * (lam / ka)
        p[active] = pa
        cum[active] = cum[active] + pa
        active = active & (u >= cum)
    return k


def _poisson_ptrs(rng: Generator, lam: float, n: int) -> np.ndarray:
    # Hoermann's transformed rejection with squeeze; the envelope comes from
    # a normal-shaped transformation, valid for lam >= 10 (used above 30).
    out = np.empty(n)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * math.sqrt(lam)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    for i in range(n):
        while True:
            u = rng.random() - 0.5
            v = rng.random()
            us = 0.5 - abs(u)
            k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
            if us >= 0.07 and v <= v_r:
                break
            if k < 0 or (us < 0.013 and v > us):
                continue
            if math.log(v) + math.log(inv_alpha) - math.log(a / (us * us) + b) <= (
                k * loglam - lam - math.lgamma(k + 1.0)
            ):
                break
        out[i] = k
    return out


def draw(model: str, theta0: float, beta: float, n: int, rng: Generator) -> np.ndarray:
    """n draws from the named model, consuming the given stream in order."""
    if model == "exp-canonical":
        u = rng.random(n)
        return -np.log1p(-u) / theta0
    if model == "exp-noncanonical":
        u = rng.random(n)
        return -theta0 * np.log1p(-u)
    if model == "poisson":
        if theta0 == 0.0:
            return np.zeros(n)
        if theta0 <= POISSON_INVERSION_CUT:
            return _poisson_inversion(rng, theta0, n)
        return _poisson_ptrs(rng, theta0, n)
    if model == "beta":
        u = rng.random(2 * n)
        u1 = np.maximum(u[0::2], _TINY_U)
        u2 = np.maximum(u[1::2], _TINY_U)
        g1 = gammaincinv(theta0, u1)
        g2 = gammaincinv(beta, u2)
        return g1 / (g1 + g2)
    raise UnknownModelError(f"unknown model {model!r}; expected one of {MODELS}")


def draw_sample(
    model: str, theta0: float, beta: float, n: int, seed: int, trial: int = 0
) -> np.ndarray:
    """The sample a given (seed, trial) pair produces."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    return draw(model, theta0, beta, n, make_generator(seed, trial))


def trial_stats(
    model: str,
    theta0: float,
    beta: float,
    n: int,
    seed: int,
    trial_start: int,
    trial_stop: int,
) -> np.ndarray:
    """Per-trial sufficient statistic for trials [trial_start, trial_stop).

    The statistic is the sample mean for the exponential and Poisson models
    and the mean log-observation for the Beta model; estimators are derived
    from it by the caller so both backends share that code path.
    """
    count = trial_stop - trial_start
    if count < 0:
        raise DomainError("trial_stop must be >= trial_start")
    out = np.empty(count)
    is_beta = model == "beta"
    if model not in MODELS:
        raise UnknownModelError(f"unknown model {model!r}; expected one of {MODELS}")
    for j in range(count):
        x = draw(model, theta0, beta, n, make_generator(seed, trial_start + j))
        out[j] = float(np.log(x).mean()) if is_beta else float(x.mean())
    return out
