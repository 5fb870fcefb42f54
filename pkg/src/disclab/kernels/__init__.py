"""Hot numeric kernels with a compiled and a pure-numpy implementation.

The compiled (numba) backend is used when numba imports and the environment
variable ``DISCLAB_NO_NUMBA`` is unset or false. Both backends take and return
the same arrays; results agree exactly for integer kernels and to rounding for
the eigensolver.
"""

import contextlib
import os

from . import _numpy
from ._common import round_robin_schedule  # noqa: F401

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

_BACKENDS = {"numpy": _numpy}
if _numba is not None:
    _BACKENDS["numba"] = _numba


def _default_backend():
    flag = os.environ.get("DISCLAB_NO_NUMBA", "").strip().lower()
    if flag in {"1", "true", "yes", "on"} or _numba is None:
        return "numpy"
    return "numba"


_active = _default_backend()


def available_backends():
    return sorted(_BACKENDS)


def active_backend():
    return _active


def set_backend(name):
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; have {available_backends()}")
    _active = name


@contextlib.contextmanager
def use_backend(name):
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def enumerate_subsets(indptr, indices, n, m):
    return _BACKENDS[_active].enumerate_subsets(indptr, indices, n, m)


def jacobi_eigh(a, schedule, tol_abs, max_sweeps):
    return _BACKENDS[_active].jacobi_eigh(a, schedule, tol_abs, max_sweeps)


def triangle_hom_count(packed, indptr, indices):
    return int(_BACKENDS[_active].triangle_hom_count(packed, indptr, indices))


def repair_pairing(edges, n, draws, max_rounds):
    used, remaining = _BACKENDS[_active].repair_pairing(edges, n, draws, max_rounds)
    return int(used), int(remaining)
