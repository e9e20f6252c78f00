"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled Cython kernels are a drop-in accelerator for the per-trial
sampling loops; they implement the same draw protocol as the numpy fallback
(see ``_pykernels``).  Selection order:

1. ``STEINMLE_BACKEND=python`` or ``=cython`` forces a backend (the latter
   raises if the extension is unavailable);
2. otherwise the compiled kernels are used when importable, the numpy
   fallback when not.

``active_backend()`` reports the resolved name; every simulation report
records it.
"""

from __future__ import annotations

import os

from ..errors import DomainError
from . import _pykernels

_ENV_VAR = "STEINMLE_BACKEND"

try:
    from . import _ckernels  # compiled extension, optional

    _HAVE_CYTHON = True
except ImportError:  # pragma: no cover - depends on build environment
    _ckernels = None
    _HAVE_CYTHON = False

_BACKENDS = {"python": _pykernels}
if _HAVE_CYTHON:
    _BACKENDS["cython"] = _ckernels


def available_backends():
    return tuple(sorted(_BACKENDS))


def get_backend(name=None):
    """Resolve a backend module by explicit name, env var, or default."""
    if name is None:
        name = os.environ.get(_ENV_VAR, "auto").lower()
    if name in (None, "", "auto"):
        name = "cython" if _HAVE_CYTHON else "python"
    if name not in _BACKENDS:
        raise DomainError(
            f"unknown or unavailable backend {name!r}; available: {available_backends()}"
        )
    return _BACKENDS[name]


def active_backend(name=None) -> str:
    return get_backend(name).BACKEND_NAME
