"""Unit tests for stablelab.isoperimetric.

These tests cover:
- planar domains: areas, perimeters, the elliptic integral oracle and polylines
- the Neumann calibration of the disk, the square and the 2:1 ellipse
- the gradient image of the lower contact set and its control directions
- the isoperimetric ratio and its scale invariance
- checkpoint and polyline exports
- the isoperimetric experiment
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from pytest_cases import parametrize_with_cases

from stablelab.exceptions import DomainError
from stablelab.isoperimetric.calibration import (
    contact_set_coverage,
    interior_nodes_per_axis,
    isoperimetric_ratio,
    sample_directions,
    solve_neumann_calibration,
    write_boundary_polyline,
    write_neumann_checkpoint,
)
from stablelab.isoperimetric.experiments import run_isoperimetric
from stablelab.isoperimetric.schemas import IsoperimetricParams, PlanarDomain
from stablelab.numerics.checkpoint import read_grid_checkpoint

STEP = 0.03
DISK = PlanarDomain(kind="disk", radius=1.0)
SQUARE = PlanarDomain(kind="rectangle", width=1.0, height=1.0)
ELLIPSE = PlanarDomain(kind="ellipse", semi_major=2.0, semi_minor=1.0)


@pytest.fixture(scope="module")
def disk_solution():
    """Neumann calibration of the unit disk."""
    return solve_neumann_calibration(DISK, STEP)


@pytest.fixture(scope="module")
def ellipse_solution():
    """Neumann calibration of the 2:1 ellipse."""
    return solve_neumann_calibration(ELLIPSE, STEP)


def test_domain_measures():
    """Closed form areas and perimeters."""
    assert DISK.area == pytest.approx(math.pi)
    assert DISK.perimeter == pytest.approx(2 * math.pi)
    assert SQUARE.area == 1.0
    assert SQUARE.perimeter == 4.0
    assert ELLIPSE.area == pytest.approx(2 * math.pi)


def test_ellipse_perimeter_oracle():
    """Adaptive quadrature agrees with 4 a E(1 - b^2 / a^2)."""
    assert ELLIPSE.perimeter == pytest.approx(9.688448220547675, rel=1e-12)
    assert ELLIPSE.perimeter == pytest.approx(ELLIPSE.perimeter_oracle(), rel=1e-12)
    assert DISK.perimeter_oracle() == DISK.perimeter


def test_ellipse_axes_validation():
    """Ellipses need b < a."""
    with pytest.raises(ValidationError):
        PlanarDomain(kind="ellipse", semi_major=1.0, semi_minor=1.0)
    with pytest.raises(ValidationError):
        PlanarDomain(kind="disk", radius=-1.0)


@pytest.mark.parametrize("domain", [DISK, SQUARE, ELLIPSE])
def test_boundary_polyline_resolution(domain):
    """Closed polyline with segments below a tenth of the curvature radius."""
    x, y = domain.boundary_polyline(0.1)
    assert (x[0], y[0]) == (x[-1], y[-1])
    segments = np.hypot(np.diff(x), np.diff(y))
    assert segments.max() <= 0.1 * domain.min_curvature_radius + 1e-12
    assert segments.sum() == pytest.approx(domain.perimeter, rel=1e-2)


def test_scaled_domain():
    """Dilations scale every length."""
    scaled = ELLIPSE.scaled(3.0)
    assert scaled.semi_major == 6.0
    assert scaled.area == pytest.approx(9 * ELLIPSE.area)


def test_disk_reference_solution(disk_solution):
    """u = |x|^2 / 2 up to a constant in the unit disk."""
    exact = (disk_solution.x**2 + disk_solution.y**2) / 2.0
    assert disk_solution.error_against(exact) < 1e-6
    assert disk_solution.constant == pytest.approx(2.0, rel=1e-12)


def test_disk_reference_other_radius():
    """u = |x|^2 / (2R) for R = 2."""
    sol = solve_neumann_calibration(PlanarDomain(kind="disk", radius=2.0), 0.05)
    assert sol.error_against((sol.x**2 + sol.y**2) / 4.0) < 1e-6
    assert sol.constant == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("domain", [DISK, SQUARE, ELLIPSE])
def test_neumann_residuals(domain):
    """The discrete equation holds on interior and boundary nodes, the mean is 0."""
    sol = solve_neumann_calibration(domain, STEP)
    assert sol.interior_residual < 1e-6
    assert sol.boundary_residual < 1e-6
    assert abs(sol.mean) < 1e-9
    assert sol.values.shape == sol.x.shape == sol.volumes.shape


def test_ellipse_compatibility(ellipse_solution):
    """c = perimeter / area for the 2:1 ellipse."""
    expected = ELLIPSE.perimeter / ELLIPSE.area
    assert ellipse_solution.constant == pytest.approx(expected, abs=1e-4)
    assert ellipse_solution.discrete_area == pytest.approx(ELLIPSE.area, rel=1e-10)


def test_square_compatibility():
    """The square is measured exactly."""
    sol = solve_neumann_calibration(SQUARE, STEP)
    assert sol.discrete_perimeter == pytest.approx(4.0)
    assert sol.discrete_area == pytest.approx(1.0)
    assert sol.constant == pytest.approx(4.0)


def test_neumann_logs(mock_logger):
    """The solve is summarized at info level."""
    solve_neumann_calibration(SQUARE, STEP, logger=mock_logger)
    mock_logger.info.assert_called_once()


@pytest.mark.parametrize("domain", [DISK, SQUARE, ELLIPSE])
def test_unresolved_step(domain):
    """Fewer than 30 interior nodes per axis are refused."""
    assert interior_nodes_per_axis(domain, 0.1) < 30
    with pytest.raises(DomainError):
        solve_neumann_calibration(domain, 0.1)


def test_disk_gradient(disk_solution):
    """grad u = x on the unit disk, to second order away from the one sided rows."""
    gx, gy = disk_solution.gradient()
    gap = np.hypot(gx - disk_solution.x, gy - disk_solution.y)
    assert np.max(gap[1:-1]) < 1e-3
    assert np.max(gap) < STEP


def test_sample_directions():
    """Stratified directions fill the open unit disk, controls lie on a circle."""
    p = sample_directions(500, seed=3)
    radius = np.hypot(p[:, 0], p[:, 1])
    assert p.shape == (500, 2)
    assert radius.max() < 1.0
    assert np.mean(radius < math.sqrt(0.5)) == pytest.approx(0.5, abs=0.01)
    assert np.array_equal(p, sample_directions(500, seed=3))
    control = sample_directions(16, magnitude=1.5)
    assert np.hypot(control[:, 0], control[:, 1]) == pytest.approx(1.5)


def test_disk_coverage(disk_solution):
    """Every resolved p in B_1 is grad u at an interior contact point of the disk."""
    report = contact_set_coverage(disk_solution, sample_directions(500, seed=0))
    assert report.resolved > 400
    assert report.resolved_covered == report.resolved
    assert report.resolved_fraction == 1.0
    assert report.max_gradient_gap <= report.tolerance
    assert report.covered + report.boundary_minimizers == report.samples


def test_boundary_minimizer_is_not_covered(disk_solution):
    """p = (0.999, 0) has its grid minimizer on the rim and is not covered."""
    report = contact_set_coverage(disk_solution, np.array([[0.999, 0.0]]))
    assert report.boundary_minimizers == 1
    assert report.max_gradient_gap <= report.tolerance
    assert report.covered == 0
    assert report.resolved == 0
    assert report.resolved_fraction == 1.0


def test_interior_minimizer_is_covered(disk_solution):
    """p = (0.5, -0.2) is attained at the interior node closest to y = p R."""
    report = contact_set_coverage(disk_solution, np.array([[0.5, -0.2]]))
    assert report.boundary_minimizers == 0
    assert report.covered == report.resolved_covered == 1


def test_ellipse_coverage(ellipse_solution):
    """Every sampled p in B_1 is attained on the 2:1 ellipse."""
    report = contact_set_coverage(ellipse_solution, sample_directions(500, seed=0))
    assert report.samples == 500
    assert report.resolved_fraction == 1.0
    assert report.covered >= report.resolved


def test_control_directions_not_attained(disk_solution):
    """Directions with |p| = 1.5 end on the boundary with grad u far from p."""
    report = contact_set_coverage(disk_solution, sample_directions(32, magnitude=1.5))
    assert report.covered == 0
    assert report.boundary_minimizers == 32
    assert report.max_gradient_gap > 0.4


def test_isoperimetric_ratios():
    """2 sqrt(pi) for the disk, 4 for the square, more for the ellipse."""
    assert isoperimetric_ratio(DISK) == pytest.approx(2 * math.sqrt(math.pi), abs=1e-6)
    assert isoperimetric_ratio(SQUARE) == pytest.approx(4.0)
    assert isoperimetric_ratio(ELLIPSE) > 2 * math.sqrt(math.pi)


def case_disk():
    """Unit disk."""
    return DISK


def case_square():
    """Unit square."""
    return SQUARE


def case_ellipse():
    """2:1 ellipse."""
    return ELLIPSE


def case_flat_rectangle():
    """A 3:1 rectangle."""
    return PlanarDomain(kind="rectangle", width=3.0, height=1.0)


@parametrize_with_cases("domain", cases=".", prefix="case_")
@pytest.mark.parametrize("factor", [0.1, 7.0])
def test_ratio_scale_invariance(domain, factor):
    """ratio(t Omega) = ratio(Omega)."""
    scaled = isoperimetric_ratio(domain.scaled(factor))
    assert scaled == pytest.approx(isoperimetric_ratio(domain), abs=1e-8)


def test_neumann_checkpoint(disk_solution, output_dir):
    """The checkpoint holds c and the nodal values."""
    path = write_neumann_checkpoint(disk_solution, output_dir / "disk.txt")
    header, values = read_grid_checkpoint(path)
    assert header["c"] == pytest.approx(2.0)
    assert header["h"] == STEP
    assert np.allclose(values, disk_solution.values, atol=1e-15)


def test_boundary_polyline_export(output_dir):
    """x, y rows of the closed boundary."""
    name = write_boundary_polyline(ELLIPSE, output_dir, "ellipse.csv")
    lines = (output_dir / name).read_text().splitlines()
    assert lines[0] == "x,y"
    assert lines[1] == lines[-1]


def test_run_isoperimetric_experiment(output_dir, mock_logger):
    """A reduced run passes and lists its artifacts."""
    params = IsoperimetricParams(
        step=0.05, square_side=2.0, samples=100, refinement_factors=[1.2, 1.0]
    )
    outcome = run_isoperimetric(
        params, tolerance=1e-6, seed=0, output_dir=output_dir, logger=mock_logger
    )
    status = {c.name: c.status.value for c in outcome.checks}
    assert outcome.passed, status
    assert status["isoperimetric_coverage_control_disk"] == "observed"
    assert {
        "isoperimetric_disk_reference",
        "isoperimetric_residual_ellipse",
        "isoperimetric_compatibility_ellipse",
        "isoperimetric_coverage_ellipse",
        "isoperimetric_coverage_refinement_ellipse",
        "isoperimetric_ratio_minimizer",
        "isoperimetric_ratio_scaling",
    } <= set(status)
    assert "isoperimetric_neumann_ellipse.txt" in outcome.artifacts
    assert "isoperimetric_ratios.csv" in outcome.artifacts
    for name in outcome.artifacts:
        assert (output_dir / name).exists()


@pytest.mark.slow
def test_run_isoperimetric_experiment_defaults(output_dir, mock_logger):
    """The default configuration passes."""
    outcome = run_isoperimetric(
        IsoperimetricParams(),
        tolerance=1e-6,
        seed=0,
        output_dir=output_dir,
        logger=mock_logger,
    )
    assert outcome.passed
