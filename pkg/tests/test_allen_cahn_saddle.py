"""Unit tests for stablelab.allen_cahn.saddle.

These tests cover:
- the saddle solver: convergence, sign, symmetry, far field and monotonicity
- agreement of damped Newton with red-black Newton-Gauss-Seidel sweeps
- non-convergence reporting
- energy growth fits and their refinement
- phi = t^-b u_s - s^-b u_t, its operator image and the Rayleigh quotients
- grid checkpoints
- the allen-cahn-saddle experiment, with the full scale runs marked slow
"""

import numpy as np
import pytest

from stablelab.allen_cahn.experiments import run_allen_cahn_saddle
from stablelab.allen_cahn.saddle import (
    SupersolutionFields,
    energy_growth_fit,
    monotonicity_violations,
    read_saddle_checkpoint,
    sign_violations,
    solve_saddle,
    stability_quotient,
    supersolution_check,
    write_saddle_checkpoint,
)
from stablelab.allen_cahn.schemas import AllenCahnSaddleParams
from stablelab.exceptions import DomainError


@pytest.fixture(scope="module")
def saddle():
    """Saddle solution in R^4 on a reduced grid."""
    return solve_saddle(2, 16.0, 0.2, tol=1e-10)


def test_saddle_converges(saddle):
    """The residual drops below the tolerance."""
    assert saddle.converged
    assert saddle.residual <= 1e-10
    assert saddle.residual_history[-1] == saddle.residual
    assert saddle.residual_history[0] > saddle.residual


def test_saddle_properties(saddle):
    """u = 0 on s = t, 0 < u < 1 in {s > t}, odd and nondecreasing along (1, -1)."""
    assert np.all(np.diag(saddle.values) == 0.0)
    assert np.array_equal(saddle.values, -saddle.values.T)
    assert sign_violations(saddle) == 0
    assert monotonicity_violations(saddle) == 0
    assert saddle.query(saddle.length, 0.0) == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize("s,t", [(1.0, 0.4), (3.3, 2.1), (7.7, 0.05)])
def test_query_is_odd(saddle, s, t):
    """Querying (t, s) returns -u(s, t)."""
    assert saddle.query(t, s) == pytest.approx(-saddle.query(s, t), abs=1e-14)


def test_gauss_seidel_matches_newton(mock_logger):
    """Both methods reach the same discrete solution."""
    newton = solve_saddle(1, 3.0, 0.25, tol=1e-10)
    sweeps = solve_saddle(
        1,
        3.0,
        0.25,
        tol=1e-10,
        max_iter=5000,
        method="newton-gauss-seidel",
        logger=mock_logger,
    )
    assert sweeps.converged
    assert np.max(np.abs(sweeps.values - newton.values)) < 1e-6
    mock_logger.info.assert_called_once()


def test_non_convergence_returns_partial_field(mock_logger):
    """An exhausted budget is flagged, not raised."""
    field = solve_saddle(2, 8.0, 0.2, tol=1e-14, max_iter=1, logger=mock_logger)
    assert not field.converged
    assert field.iterations == 1
    assert len(field.residual_history) == 2
    mock_logger.warning.assert_called_once()


@pytest.mark.parametrize(
    "m,length,step", [(0, 10.0, 0.1), (2, -1.0, 0.1), (2, 10.0, 0.0), (2, 0.4, 0.2)]
)
def test_solver_errors(m, length, step):
    """m >= 1, L > 0, h > 0 and at least 3 cells."""
    with pytest.raises(DomainError):
        solve_saddle(m, length, step)


def test_energy_growth(saddle):
    """Energies increase with R and grow roughly like R^3 in R^4."""
    growth = energy_growth_fit(saddle, [4.0, 6.0, 8.0])
    assert np.all(np.diff(growth.energies) > 0)
    assert 2.0 < growth.exponent < 3.5


def test_energy_refinement():
    """Over three halvings of h the exponent settles and E(R) moves by under 1%."""
    radii = [4.0, 6.0, 8.0]
    fits = [
        energy_growth_fit(solve_saddle(2, 16.0, step, tol=1e-10), radii)
        for step in (0.2, 0.1, 0.05)
    ]
    exponents = [fit.exponent for fit in fits]
    changes = np.abs(np.diff(exponents))
    assert changes[1] < changes[0]
    assert 2.0 < exponents[-1] < 3.5
    assert fits[2].energies == pytest.approx(fits[1].energies, rel=0.01)


@pytest.mark.slow
def test_energy_refinement_full_scale():
    """At full scale the exponent settles toward 3 over three halvings of h."""
    radii = [8.0, 12.0, 16.0, 20.0]
    exponents = [
        energy_growth_fit(solve_saddle(2, 40.0, step, tol=1e-8), radii).exponent
        for step in (0.2, 0.1, 0.05)
    ]
    changes = np.abs(np.diff(exponents))
    assert changes[1] < changes[0]
    assert abs(exponents[-1] - 3.0) <= 0.2


@pytest.mark.parametrize("radii", [[4.0, 6.0], [4.0, 6.0, 9.0], [0.0, 2.0, 4.0]])
def test_energy_growth_errors(saddle, radii):
    """At least 3 radii in (0, L/2]."""
    with pytest.raises(DomainError):
        energy_growth_fit(saddle, radii)


@pytest.mark.parametrize("b", [0.5, 2.0, 3.5])
def test_phi_on_the_diagonal(saddle, b):
    """phi(s, s) = 2 s^-b u_s(s, s)."""
    fields = SupersolutionFields(saddle, 0.5, 0.5)
    k = np.arange(1, saddle.values.shape[0])
    s = saddle.axis[k]
    expected = 2 * s**-b * fields.u_s[k, k]
    assert fields.phi(b)[k, k] == pytest.approx(expected, rel=1e-12)


def test_commuted_image_on_the_diagonal(saddle):
    """On s = t the image is s^(-b-2) (u_s - u_t) ((m - 1) + b (b + 2 - m))."""
    b, m = 1.5, saddle.m
    fields = SupersolutionFields(saddle, 0.5, 0.5)
    k = np.arange(1, saddle.values.shape[0])
    s = saddle.axis[k]
    gap = fields.u_s[k, k] - fields.u_t[k, k]
    expected = s ** (-b - 2) * gap * ((m - 1) + b * (b + 2 - m))
    assert fields.commuted(b)[k, k] == pytest.approx(expected, rel=1e-10)


def test_commuted_and_direct_images_agree(saddle):
    """Both forms of (Laplacian + f'(u)) phi agree away from the axes and edges."""
    fields = SupersolutionFields(saddle, 0.5, 0.5)
    b = 1.0
    sample = fields.sample & (fields.t >= 1.0) & (fields.s <= 6.0)
    commuted = fields.commuted(b)[sample]
    direct = fields.direct(b)[sample]
    scale = np.max(np.abs(commuted))
    assert np.max(np.abs(direct - commuted)) < 0.2 * scale


@pytest.mark.parametrize("amplitude", [1e-3, 2.0, -7.5])
def test_quotient_is_homogeneous(saddle, amplitude):
    """Scaling the probe leaves the Rayleigh quotient unchanged."""
    base = stability_quotient(saddle, 1.0, 5.0)
    scaled = stability_quotient(saddle, 1.0, 5.0, amplitude=amplitude)
    assert scaled == pytest.approx(base, rel=1e-10)


def test_supersolution_report(saddle, mock_logger):
    """The scan returns sorted probes, one quotient per annulus and logs once."""
    report = supersolution_check(
        saddle, [3.0, 1.0, 2.0], refine_steps=2, logger=mock_logger
    )
    bs = [p.b for p in report.probes]
    assert bs == sorted(bs)
    assert {1.0, 2.0, 3.0} <= set(bs)
    assert report.samples > 0
    assert len(report.quotients) == 4
    assert all(p.min_phi > 0 for p in report.probes)
    if report.witness is not None:
        assert report.witness.is_witness(1e-6)
    mock_logger.info.assert_called_once()


def test_supersolution_errors(saddle):
    """Exponents must be positive, the sample set and annuli non-empty."""
    with pytest.raises(DomainError):
        supersolution_check(saddle, [0.0, 1.0])
    with pytest.raises(DomainError):
        supersolution_check(saddle, [1.0], axis_margin=100.0)
    with pytest.raises(DomainError):
        supersolution_check(saddle, [1.0], probes=[(5.0, 3.0)])


def test_checkpoint(saddle, tmp_path):
    """A checkpoint restores the field exactly."""
    path = write_saddle_checkpoint(saddle, tmp_path / "saddle.txt")
    header = path.read_text().splitlines()[0].split()
    assert header[:2] == ["m=2", "L=16.0"]
    assert [token.split("=")[0] for token in header[2:4]] == ["h", "residual"]
    restored = read_saddle_checkpoint(path)
    assert np.array_equal(restored.values, saddle.values)
    assert restored.residual == saddle.residual
    assert restored.m == saddle.m


def test_malformed_checkpoint(tmp_path):
    """A truncated checkpoint is rejected."""
    path = tmp_path / "broken.txt"
    path.write_text("m=2 L=1.0 h=0.25 residual=0.0 rows=5 cols=5\n0.0 1.0\n")
    with pytest.raises(DomainError):
        read_saddle_checkpoint(path)


def test_run_saddle_experiment(output_dir, mock_logger):
    """A reduced run writes its artifacts and passes the solver checks."""
    params = AllenCahnSaddleParams(
        length=16.0,
        step=0.2,
        energy_radii=[4.0, 6.0, 8.0],
        stability_m=2,
        stability_length=16.0,
        stability_step=0.2,
        b_values=[1.0, 2.0],
        refine_steps=1,
    )
    outcome = run_allen_cahn_saddle(
        params, tolerance=1e-6, seed=0, output_dir=output_dir, logger=mock_logger
    )
    status = {c.name: c.status.value for c in outcome.checks}
    for name in ("residual", "sign", "far_field", "odd", "monotone"):
        assert status[f"saddle_{name}_n4"] == "pass"
    assert "saddle_stability_n4" in status
    for artifact in outcome.artifacts:
        assert (output_dir / artifact).is_file()
    assert "saddle_m2.txt" in outcome.artifacts


@pytest.mark.slow
def test_saddle_in_r4_full_scale():
    """m = 2, L = 40, h = 0.05: residual, sign and growth exponent near 3."""
    field = solve_saddle(2, 40.0, 0.05, tol=1e-8)
    assert field.converged
    assert sign_violations(field) == 0
    growth = energy_growth_fit(field, [8.0, 12.0, 16.0, 20.0])
    assert abs(growth.exponent - 3.0) <= 0.2


@pytest.mark.slow
def test_saddle_in_r14_is_stable():
    """2m = 14, L = 30, h = 0.1: a positive supersolution and nonnegative quotients."""
    field = solve_saddle(7, 30.0, 0.1, tol=1e-8)
    report = supersolution_check(field, [0.5 * k for k in range(1, 13)])
    assert report.witness is not None
    assert report.witness.min_phi > 0
    assert report.witness.max_defect <= 1e-6
    assert all(q.quotient >= -1e-6 for q in report.quotients)
