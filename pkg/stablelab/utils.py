"""Utility functions and validators shared by the schemas."""

import math
from collections.abc import Sequence
from typing import Any

import numpy as np
from scipy.special import gamma

FLOAT_DIGITS = 17


def check_list_not_empty(items: list[Any]) -> list[Any]:
    """Check if the input is a non-empty list, raising ValueError if empty.

    If the argument is a list and it is empty, raises a ValueError.

    Args:
        items (list[Any]): The input to check. Can be a list of any type or a single
            item.

    Returns:
        list[Any]: The original input if it is not an empty list.

    Raises:
        ValueError: If the input is a list and it is empty.

    """
    if isinstance(items, list) and len(items) <= 0:
        raise ValueError("List must not be empty")
    return items


def check_strictly_increasing(values: Sequence[float]) -> Sequence[float]:
    """Check that a sequence of reals is finite and strictly increasing.

    Args:
        values (Sequence[float]): The values to check.

    Returns:
        Sequence[float]: The original input.

    Raises:
        ValueError: If a value is not finite or the sequence is not strictly
            increasing.

    """
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("Values must be finite")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise ValueError("Values must be strictly increasing")
    return values


def format_float(value: float) -> str:
    """Format a float with 17 significant digits so that it round-trips exactly.

    Integral values keep a trailing ".0" so that they are parsed back as floats.
    Non-finite values are rendered as JSON null.

    Args:
        value (float): The value to format.

    Returns:
        str: The formatted number.

    """
    if not math.isfinite(value):
        return "null"
    text = format(value, f".{FLOAT_DIGITS}g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def sphere_area(dim: int) -> float:
    """Return the surface measure of the unit sphere S^{dim-1} in R^dim.

    Args:
        dim (int): Ambient dimension, at least 1. For dim = 1 the "sphere" is the two
            points {-1, 1}.

    Returns:
        float: 2 pi^{dim/2} / Gamma(dim/2).

    """
    return float(2.0 * math.pi ** (dim / 2.0) / gamma(dim / 2.0))
