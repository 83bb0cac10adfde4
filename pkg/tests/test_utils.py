"""Unit tests for stablelab.utils module.

These tests cover:
- check_list_not_empty and check_strictly_increasing validators
- format_float round-trips
- sphere_area against the closed forms in low dimension
"""

import math

import pytest

from stablelab.utils import (
    check_list_not_empty,
    check_strictly_increasing,
    format_float,
    sphere_area,
)


def test_check_list_not_empty():
    """Non-empty lists pass through, empty lists raise."""
    assert check_list_not_empty([1, 2]) == [1, 2]
    with pytest.raises(ValueError, match="must not be empty"):
        check_list_not_empty([])


@pytest.mark.parametrize("values", [[1.0], [0.0, 0.5, 2.0], []])
def test_check_strictly_increasing_accepts(values):
    """Strictly increasing finite sequences are returned unchanged."""
    assert check_strictly_increasing(values) is values


@pytest.mark.parametrize(
    "values", [[1.0, 1.0], [2.0, 1.0], [0.0, math.inf], [math.nan, 1.0]]
)
def test_check_strictly_increasing_rejects(values):
    """Repeated, decreasing and non-finite values raise."""
    with pytest.raises(ValueError):
        check_strictly_increasing(values)


@pytest.mark.parametrize("value", [0.1, 1 / 3, 2.0, -1e-300, 6.02214076e23])
def test_format_float_round_trip(value):
    """17 significant digits parse back to the same float."""
    assert float(format_float(value)) == value


def test_format_float_special_values():
    """Integral values keep a decimal point, non-finite values are null."""
    assert format_float(3.0) == "3.0"
    assert format_float(math.inf) == "null"
    assert format_float(math.nan) == "null"


@pytest.mark.parametrize(
    "dim,expected",
    [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2)],
)
def test_sphere_area(dim, expected):
    """|S^{n-1}| = 2, 2 pi, 4 pi and 2 pi^2 for n = 1, ..., 4."""
    assert sphere_area(dim) == pytest.approx(expected)
