"""Input checks shared by the estimator and the command line."""
from __future__ import annotations

import os
from numbers import Integral, Real

import numpy as np

from .problems import KINDS, ProblemInstance, generate, read_instance


def check_instance(obj) -> ProblemInstance:
    """Coerce ``obj`` to a :class:`ProblemInstance`.

    Accepts an instance, a path to a graph file, or a ``(kind, n, seed)`` tuple.
    """
    if isinstance(obj, ProblemInstance):
        return obj
    if isinstance(obj, (str, os.PathLike)):
        if not os.path.exists(obj):
            raise FileNotFoundError(f"no graph file at {obj}")
        return read_instance(obj)
    if isinstance(obj, tuple) and len(obj) == 3:
        kind, n, seed = obj
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        return generate(kind, check_int(n, "n", 2), check_int(seed, "seed", 0))
    raise TypeError(f"cannot interpret {type(obj).__name__} as a problem instance")


def check_int(value, name: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_positive(value, name: str, strict: bool = True) -> float:
    if isinstance(value, bool) or not isinstance(value, Real) or not np.isfinite(value):
        raise TypeError(f"{name} must be a finite real number, got {value!r}")
    if value < 0 or (strict and value == 0):
        raise ValueError(f"{name} must be {'positive' if strict else 'non-negative'}, got {value}")
    return float(value)


def check_params(params, size: int | None = None) -> np.ndarray:
    """1-D finite float vector, optionally of a fixed length."""
    x = np.asarray(params, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"parameter vector must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("parameter vector contains non-finite values")
    if size is not None and x.size != size:
        raise ValueError(f"expected {size} parameters, got {x.size}")
    return x
