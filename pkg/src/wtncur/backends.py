"""Kernel backend selection: compiled extension when available, NumPy otherwise.

The environment variable WTNCUR_BACKEND ("compiled", "pure", "auto") overrides
the default. Both backends implement the same contract and produce bit-equal
results; the compiled one is just faster.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _pure
from .errors import ParameterError

try:
    from . import _fastcore
except ImportError:
    _fastcore = None


@dataclass(frozen=True)
class Kernels:
    name: str
    sweep: Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], int]
    fixed_point: Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], bool]


def _compiled_sweep(coupling_t, prefs, order, scratch):
    order32 = np.ascontiguousarray(order, dtype=np.int32)
    return _fastcore.sweep(coupling_t, prefs, order32, scratch)


def _compiled_fixed_point(coupling_t, prefs, order, scratch):
    order32 = np.ascontiguousarray(order, dtype=np.int32)
    return _fastcore.fixed_point(coupling_t, prefs, order32, scratch)


_PURE = Kernels(name="pure", sweep=_pure.sweep, fixed_point=_pure.fixed_point)

if _fastcore is not None:
    _COMPILED = Kernels(
        name="compiled", sweep=_compiled_sweep, fixed_point=_compiled_fixed_point
    )
else:
    _COMPILED = None


def compiled_available() -> bool:
    return _COMPILED is not None


def get_kernels(backend: str = "auto") -> Kernels:
    """Resolve a backend name to its kernel pair.

    "auto" prefers the compiled extension; "compiled" raises if the extension
    was not built. WTNCUR_BACKEND overrides an "auto" argument.
    """
    if backend == "auto":
        backend = os.environ.get("WTNCUR_BACKEND", "auto")
    if backend == "auto":
        return _COMPILED if _COMPILED is not None else _PURE
    if backend == "pure":
        return _PURE
    if backend == "compiled":
        if _COMPILED is None:
            raise ParameterError("compiled backend requested but extension is not built")
        return _COMPILED
    raise ParameterError(f"unknown backend {backend!r} (want auto, compiled, or pure)")
