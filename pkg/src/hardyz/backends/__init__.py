"""Summation backend selection.

Two interchangeable implementations of the hot inner sums live here: a numba
one with JIT-compiled kernels (the default whenever numba imports) and a plain
numpy one reduced with math.fsum. Both expose the same module-level functions;
see numpy_backend for the reference semantics.

Selection order: explicit use_backend() override, then the HARDYZ_BACKEND
environment variable ("numba" or "numpy"), then auto-detection. Requesting
numba when it is not importable is an error, not a silent fallback.
"""

from __future__ import annotations

import os

from ..special import ConfigurationError

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

ENV_VAR = "HARDYZ_BACKEND"

_override: str | None = None
_cached = None


def available_backends() -> list[str]:
    names = ["numpy"]
    if HAS_NUMBA:
        names.insert(0, "numba")
    return names


def use_backend(name: str | None) -> None:
    """Force a backend by name; None returns to env/auto selection."""
    global _override, _cached
    if name is not None:
        name = name.strip().lower()
        if name not in ("numba", "numpy"):
            raise ConfigurationError(
                f"unknown backend {name!r}; known backends: numba, numpy"
            )
    _override = name
    _cached = None


def get_backend():
    """The active backend module. The env variable is read once, then cached."""
    global _cached
    if _cached is not None:
        return _cached
    name = _override
    if name is None:
        env = os.environ.get(ENV_VAR, "").strip().lower()
        name = env or None
    if name is None:
        name = "numba" if HAS_NUMBA else "numpy"
    if name == "numba":
        if not HAS_NUMBA:
            raise ConfigurationError(
                "the numba backend was requested but numba is not importable"
            )
        from . import numba_backend as mod
    elif name == "numpy":
        from . import numpy_backend as mod
    else:
        raise ConfigurationError(
            f"unknown backend {name!r}; known backends: numba, numpy"
        )
    _cached = mod
    return _cached


def backend_name() -> str:
    return get_backend().NAME
