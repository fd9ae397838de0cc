"""Backend selection: numba-compiled kernels or the pure-numpy fallback.

The environment flag FORKJOINQ_BACKEND picks the default:

    auto   use numba when importable, else numpy      (default)
    numba  require the JIT backend, fail if missing
    numpy  vectorized non-purging/split-merge paths plus the uncompiled
           purging kernel (slow for long purging runs, fine for tests)

Both backends run the same event semantics; `python -m forkjoinq.bench`
compares their throughput.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from . import kernels as _py
from . import vectorized as _vec

__all__ = ["Backend", "get_backend", "available_backends", "ENV_FLAG"]

ENV_FLAG = "FORKJOINQ_BACKEND"


@dataclass(frozen=True)
class Backend:
    name: str
    nonpurging_paths: Callable
    purging_sojourns: Callable
    splitmerge_sojourns: Callable


_cache: dict[str, Backend] = {}


def _numpy_backend() -> Backend:
    return Backend(
        name="numpy",
        nonpurging_paths=_vec.nonpurging_paths,
        purging_sojourns=_py.purging_sojourns,
        splitmerge_sojourns=_vec.splitmerge_sojourns,
    )


def _numba_backend() -> Backend:
    from numba import njit

    jit = njit(cache=True)
    return Backend(
        name="numba",
        nonpurging_paths=jit(_py.nonpurging_paths),
        purging_sojourns=jit(_py.purging_sojourns),
        splitmerge_sojourns=jit(_py.splitmerge_sojourns),
    )


def available_backends() -> tuple[str, ...]:
    try:
        import numba  # noqa: F401

        return ("numba", "numpy")
    except ImportError:
        return ("numpy",)


def get_backend(name: str | None = None) -> Backend:
    """Resolve a backend by name, the env flag, or auto-detection."""
    if name is None:
        name = os.environ.get(ENV_FLAG, "auto")
    if name == "auto":
        name = "numba" if "numba" in available_backends() else "numpy"
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}; expected auto, numba or numpy")
    if name not in _cache:
        _cache[name] = _numba_backend() if name == "numba" else _numpy_backend()
    return _cache[name]
