"""Unit tests for stablelab.cones.calibration.

These tests cover:
- vanishing on the diagonal and oddness under s <-> t
- agreement with finite differences of X in full coordinates
- the sign scan threshold between m = 3 and m = 4
- the simons-calibration experiment with its default parameters
"""

import numpy as np
import pytest

from stablelab.cones.calibration import (
    calibration_divergence,
    calibration_sign_scan,
    calibration_vector_field,
)
from stablelab.cones.experiments import run_simons_calibration
from stablelab.cones.schemas import SimonsCalibrationParams
from stablelab.exceptions import DomainError
from stablelab.experiments.checks import CheckStatus
from stablelab.numerics.stencils import fd_derivative


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("s", [0.1, 1.0, 1.9])
def test_divergence_vanishes_on_the_cone(m, s):
    """div X = 0 on s = t."""
    assert calibration_divergence(m, s, s) == pytest.approx(0.0, abs=1e-10)


def test_divergence_is_odd():
    """Swapping s and t flips the sign."""
    s, t = np.meshgrid(np.linspace(0.1, 2, 7), np.linspace(0.2, 1.5, 5))
    assert np.allclose(
        calibration_divergence(5, s, t), -calibration_divergence(5, t, s), atol=0
    )


@pytest.mark.parametrize("m,s,t", [(3, 1.3, 0.6), (4, 0.5, 1.1), (2, 0.9, 0.8)])
def test_closed_form_matches_finite_differences(m, s, t):
    """The closed form equals the divergence of X computed in R^{2m}."""
    field = calibration_vector_field(m)
    point = np.zeros(2 * m)
    point[0], point[m] = s, t
    divergence = sum(
        fd_derivative(lambda y, i=i: field(y)[i], point, 1, 1e-5)[i]
        for i in range(2 * m)
    )
    assert divergence == pytest.approx(calibration_divergence(m, s, t), abs=1e-6)


@pytest.mark.parametrize("m", [4, 5, 6])
def test_sign_matches_from_m_four(m):
    """No violation on the 200 x 200 grid for m >= 4."""
    scan = calibration_sign_scan(m)
    assert scan.violations == 0
    assert scan.first_violation is None


@pytest.mark.parametrize("m", [2, 3])
def test_sign_fails_below_m_four(m):
    """Some node violates the sign property for m < 4."""
    scan = calibration_sign_scan(m)
    assert scan.violations > 0
    s, t = scan.first_violation
    assert np.sign(calibration_divergence(m, s, t)) != np.sign(s**4 - t**4)


def test_vertex_is_rejected():
    """The divergence is undefined at s = t = 0."""
    with pytest.raises(DomainError):
        calibration_divergence(4, 0.0, 0.0)


def test_run_simons_calibration_experiment(output_dir, mock_logger):
    """Default run: geometry, sign scans and gaps hold, Lawson is only observed."""
    outcome = run_simons_calibration(
        SimonsCalibrationParams(),
        tolerance=1e-6,
        seed=0,
        output_dir=output_dir,
        logger=mock_logger,
    )
    status = {c.name: c.status for c in outcome.checks}
    assert outcome.passed, status
    asserted = [
        *(f"simons_mean_curvature_m{m}" for m in (2, 3, 4)),
        *(f"simons_homogeneity_m{m}" for m in (2, 3, 4)),
        *(f"calibration_sign_m{m}" for m in range(2, 7)),
        *(f"simons_gap_equality_n{n}" for n in (4, 6, 8)),
        *(f"simons_gap_consistency_n{n}" for n in (4, 6, 8)),
    ]
    for name in asserted:
        assert status[name] == CheckStatus.passed
    for name in ("simons_coefficient_n8", "lawson_mean_curvature_m3_k5"):
        assert status[name] == CheckStatus.observed
    gaps = [c for c in outcome.checks if c.name.startswith("simons_gap")]
    references = {c.reference for c in gaps}
    assert references == {"Simons inequality"}
    assert outcome.artifacts == []
