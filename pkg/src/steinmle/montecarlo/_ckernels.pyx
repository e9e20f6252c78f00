# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled trial kernels: scalar C loops over the per-trial Philox streams.

Same draw protocol as ``_pykernels`` (that module documents the contract);
the speedup comes from consuming the bit generator draw-by-draw in C instead
of materialising uniform arrays and intermediate vectors.  Keep the two
implementations in lock-step: the parity test compares them element-wise.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport exp, fabs, floor, lgamma, log, log1p, sqrt
from numpy.random cimport bitgen_t

from numpy.random import Philox

from scipy.special.cython_special cimport gammaincinv

from ..errors import DomainError, UnknownModelError

cnp.import_array()

BACKEND_NAME = "cython"
RNG_ALGORITHM = "philox4x64:jumped-per-trial"

MODELS = ("exp-canonical", "exp-noncanonical", "poisson", "beta")

DEF TINY_U = 5.421010862427522e-20  # 2^-64, clamp for zero uniforms
cdef double POISSON_INVERSION_CUT = 30.0


cdef bitgen_t* _bitgen_from(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise DomainError("invalid BitGenerator capsule")
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef int _model_code(str model) except -1:
    if model == "exp-canonical":
        return 0
    if model == "exp-noncanonical":
        return 1
    if model == "poisson":
        return 2
    if model == "beta":
        return 3
    raise UnknownModelError(f"unknown model {model!r}; expected one of {MODELS}")


cdef inline double _next_u(bitgen_t* rng) noexcept:
    return rng.next_double(rng.state)


cdef double _poisson_inversion_one(bitgen_t* rng, double lam, long cap) noexcept:
    cdef double u = _next_u(rng)
    cdef double p = exp(-lam)
    cdef double cum = p
    cdef double k = 0.0
    cdef long steps = 0
    while u >= cum and steps < cap:
        steps += 1
        k += 1.0
        p *= lam / k
        cum += p
    return k


cdef double _poisson_ptrs_one(bitgen_t* rng, double lam, double loglam,
                              double b, double a, double inv_alpha, double v_r) noexcept:
    cdef double u, v, us, k
    while True:
        u = _next_u(rng) - 0.5
        v = _next_u(rng)
        us = 0.5 - fabs(u)
        k = floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= v_r:
            return k
        if k < 0.0 or (us < 0.013 and v > us):
            continue
        if log(v) + log(inv_alpha) - log(a / (us * us) + b) <= (
            k * loglam - lam - lgamma(k + 1.0)
        ):
            return k


cdef void _fill(int code, double theta0, double beta, Py_ssize_t n,
                bitgen_t* rng, double* out):
    cdef Py_ssize_t i
    cdef double u, u1, u2, g1, g2
    cdef double loglam, b, a, inv_alpha, v_r
    cdef long cap
    if code == 0:
        for i in range(n):
            u = _next_u(rng)
            out[i] = -log1p(-u) / theta0
    elif code == 1:
        for i in range(n):
            u = _next_u(rng)
            out[i] = -theta0 * log1p(-u)
    elif code == 2:
        if theta0 == 0.0:
            for i in range(n):
                out[i] = 0.0
        elif theta0 <= POISSON_INVERSION_CUT:
            cap = <long>(theta0 + 60.0 * sqrt(theta0 + 1.0) + 100.0)
            for i in range(n):
                out[i] = _poisson_inversion_one(rng, theta0, cap)
        else:
            loglam = log(theta0)
            b = 0.931 + 2.53 * sqrt(theta0)
            a = -0.059 + 0.02483 * b
            inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
            v_r = 0.9277 - 3.6224 / (b - 2.0)
            for i in range(n):
                out[i] = _poisson_ptrs_one(rng, theta0, loglam, b, a, inv_alpha, v_r)
    else:
        for i in range(n):
            u1 = _next_u(rng)
            u2 = _next_u(rng)
            if u1 < TINY_U:
                u1 = TINY_U
            if u2 < TINY_U:
                u2 = TINY_U
            g1 = gammaincinv(theta0, u1)
            g2 = gammaincinv(beta, u2)
            out[i] = g1 / (g1 + g2)


def draw(str model, double theta0, double beta, Py_ssize_t n, object rng):
    """n draws consuming the given numpy Generator's bit stream in order."""
    cdef int code = _model_code(model)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    bitgen_obj = rng.bit_generator
    cdef bitgen_t* bg = _bitgen_from(bitgen_obj)
    if n > 0:
        _fill(code, theta0, beta, n, bg, &out[0])
    return out


def draw_sample(str model, double theta0, double beta, Py_ssize_t n,
                object seed, Py_ssize_t trial=0):
    """The sample a given (seed, trial) pair produces."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    cdef int code = _model_code(model)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    bitgen_obj = Philox(key=seed).jumped(trial)
    cdef bitgen_t* bg = _bitgen_from(bitgen_obj)
    _fill(code, theta0, beta, n, bg, &out[0])
    return out


def trial_stats(str model, double theta0, double beta, Py_ssize_t n,
                object seed, Py_ssize_t trial_start, Py_ssize_t trial_stop):
    """Per-trial sufficient statistic (mean, or mean log for the Beta model)."""
    cdef Py_ssize_t count = trial_stop - trial_start
    if count < 0:
        raise DomainError("trial_stop must be >= trial_start")
    cdef int code = _model_code(model)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(count, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] buf = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double acc
    cdef bitgen_t* bg
    master = Philox(key=seed)
    for j in range(count):
        bitgen_obj = master.jumped(trial_start + j)
        bg = _bitgen_from(bitgen_obj)
        _fill(code, theta0, beta, n, bg, &buf[0])
        acc = 0.0
        if code == 3:
            for i in range(n):
                acc += log(buf[i])
        else:
            for i in range(n):
                acc += buf[i]
        out[j] = acc / n
    return out
