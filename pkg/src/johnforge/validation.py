"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import EmptyMaskError, ParameterError
from .geometry import MAX_LEVEL, MIN_LEVEL, CompactSetMask, WhitneyDecomposition, is_infinity


def check_mask(mask, allow_empty=False):
    if not isinstance(mask, CompactSetMask):
        raise ParameterError(f"expected a CompactSetMask, got {type(mask).__name__}")
    if not allow_empty and mask.count == 0:
        raise EmptyMaskError("mask has no occupied pixel")
    return mask


def check_whitney(w):
    if not isinstance(w, WhitneyDecomposition):
        raise ParameterError(f"expected a WhitneyDecomposition, got {type(w).__name__}")
    return w


def check_level(level):
    if not isinstance(level, numbers.Integral) or not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ParameterError(f"level must be an integer in [{MIN_LEVEL}, {MAX_LEVEL}]")
    return int(level)


def check_scalar(x, name, low=None, high=None, low_open=False, high_open=False):
    """A finite real within optional (half-)open bounds."""
    if isinstance(x, bool) or not isinstance(x, numbers.Real) or not np.isfinite(x):
        raise ParameterError(f"{name} must be a finite number")
    if low is not None and (x <= low if low_open else x < low):
        raise ParameterError(f"{name}={x} must be {'>' if low_open else '>='} {low}")
    if high is not None and (x >= high if high_open else x > high):
        raise ParameterError(f"{name}={x} must be {'<' if high_open else '<='} {high}")
    return x


def check_int(x, name, low=None, high=None):
    if isinstance(x, bool) or not isinstance(x, numbers.Integral):
        raise ParameterError(f"{name} must be an integer")
    return int(check_scalar(int(x), name, low, high))


def check_seed(seed):
    return check_int(seed, "seed", 0, 2 ** 32 - 1)


def check_n_list(n_list, low=1, high=None):
    vals = [check_int(n, "n", low, high) for n in n_list]
    if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ParameterError("n values must be a nonempty strictly increasing list")
    return vals


def check_center(center):
    if is_infinity(center):
        return "inf"
    try:
        x, y = (float(v) for v in center)
    except (TypeError, ValueError):
        raise ParameterError("center must be 'inf' or a pair of numbers") from None
    return (x, y)
