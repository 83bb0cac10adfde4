"""Unit tests for stablelab.cones.stability.

These tests cover:
- positivity of the form with d = 0
- negative probes of the Simons cone in dimensions 4 and 6
- nonnegativity in dimension 8, where the finiteness window is empty
- dilation homogeneity of the form
- tail divergence detection and mesh coverage errors
- the cone-stability experiment with its default parameters
"""

import numpy as np
import pytest
from pydantic import ValidationError

from stablelab.cones.experiments import run_cone_stability
from stablelab.cones.geometry import measure_simons_coefficient
from stablelab.cones.schemas import (
    ConeStabilityParams,
    CutoffProbe,
    RadialConeProfile,
)
from stablelab.cones.stability import (
    cone_stability_probe,
    in_window,
    quadratic_form,
    scan_cone_stability,
)
from stablelab.exceptions import DomainError
from stablelab.experiments.checks import CheckStatus
from stablelab.numerics.schemas import Mesh1D


def simons_profile(n: int) -> RadialConeProfile:
    """Return the Simons cone profile with the measured coefficient."""
    return RadialConeProfile(
        n=n, d=measure_simons_coefficient(n // 2, samples=5).d, label="simons"
    )


@pytest.mark.parametrize("alpha,beta", [(-1.0, 1.0), (0.5, 2.0), (1.2, -0.3)])
def test_zero_coefficient_is_positive(alpha, beta):
    """With d = 0 the integrand is nonnegative."""
    probe = CutoffProbe(alpha=alpha, beta=beta, rho_in=0.01, rho_out=10.0)
    result = cone_stability_probe(RadialConeProfile(n=6, d=0.0), probe)
    assert result.q > 0


@pytest.mark.parametrize(
    "n,alpha,beta", [(4, -1.0, 1.0), (6, 0.0, 1.4)]
)
def test_low_dimensions_have_negative_admissible_probes(n, alpha, beta):
    """Admissible probes with Q < 0 exist below dimension 8."""
    probe = CutoffProbe(alpha=alpha, beta=beta, rho_in=0.01, rho_out=100.0)
    result = cone_stability_probe(simons_profile(n), probe)
    assert result.admissible
    assert result.q < 0


def test_dimension_eight_scan_is_nonnegative():
    """No probe gives Q < -1e-8 for n = 8."""
    grid = np.linspace(-1.4, 1.4, 8)
    scan = scan_cone_stability(
        simons_profile(8), grid, grid, [(0.01, 10.0), (0.01, 100.0)]
    )
    assert scan.min_admissible_q is None
    assert scan.min_tail_finite_q >= -1e-8
    assert all(r.q >= -1e-8 for r in scan.results)
    assert scan.min_q == min(r.q for r in scan.results)


def test_simons_form():
    """The form left by the Simons inequality follows the same dichotomy."""
    probe = CutoffProbe(alpha=-1.0, beta=1.0, rho_in=0.01, rho_out=100.0)
    low = cone_stability_probe(RadialConeProfile(n=4, d=2.0), probe, form="simons")
    high = cone_stability_probe(RadialConeProfile(n=8, d=6.0), probe, form="simons")
    assert low.q < 0
    assert high.q > 0


@pytest.mark.parametrize("factor", [0.5, 4.0])
def test_dilation_homogeneity(factor):
    """Dilating the test function and the mesh multiplies Q by factor^(n - 3)."""
    n, alpha = 7, 0.3
    profile = RadialConeProfile(n=n, d=3.0)
    mesh = Mesh1D.geometric(0.1, 1.0, 200)
    base = quadratic_form(
        profile, lambda r: r**-alpha, lambda r: -alpha * r ** (-alpha - 1), mesh
    )
    scaled = quadratic_form(
        profile,
        lambda r: (r / factor) ** -alpha,
        lambda r: -alpha * (r / factor) ** (-alpha - 1) / factor,
        Mesh1D(nodes=factor * mesh.nodes),
    )
    assert scaled == pytest.approx(base * factor ** (n - 3), rel=1e-9)


def test_user_mesh_matches_generated_mesh():
    """An explicit fine mesh gives the same value as the generated one."""
    profile = RadialConeProfile(n=6, d=4.0)
    probe = CutoffProbe(alpha=0.0, beta=1.4, rho_in=0.01, rho_out=100.0)
    fine = Mesh1D.geometric(0.01, 100.0, 4001)
    assert cone_stability_probe(profile, probe, fine).q == pytest.approx(
        cone_stability_probe(profile, probe).q, rel=1e-4
    )


def test_positive_tail_divergence_is_inadmissible():
    """A flat outer tail makes Q grow with the truncation radius."""
    probe = CutoffProbe(alpha=0.0, beta=0.0, rho_in=0.01, rho_out=10.0)
    result = cone_stability_probe(RadialConeProfile(n=6, d=0.0), probe)
    assert not result.tail_finite
    assert not result.admissible


@pytest.mark.parametrize(
    "n,alpha,beta,expected",
    [(4, -1.0, 1.0, True), (6, 0.0, 1.6, False), (8, 1.0, 1.4, False)],
)
def test_window(n, alpha, beta, expected):
    """alpha < (n - 5) / 2 < beta with both squares below 2."""
    assert in_window(n, alpha, beta) is expected


def test_mesh_must_cover_support():
    """A mesh shorter than the probe support is rejected."""
    probe = CutoffProbe(alpha=0.0, beta=1.0, rho_in=0.01, rho_out=10.0)
    with pytest.raises(DomainError):
        cone_stability_probe(
            RadialConeProfile(n=4, d=1.0), probe, Mesh1D.uniform(0.1, 10.0, 50)
        )


def test_probe_radii_are_validated():
    """The ramps must not overlap the pivot radius 1."""
    with pytest.raises(ValidationError):
        CutoffProbe(alpha=0.0, beta=1.0, rho_in=0.7, rho_out=10.0)


def test_run_cone_stability_experiment(output_dir, mock_logger):
    """Default run: unstable below dimension 8, nonnegative scan in dimension 8."""
    params = ConeStabilityParams()
    outcome = run_cone_stability(
        params, tolerance=1e-6, seed=0, output_dir=output_dir, logger=mock_logger
    )
    checks = {c.name: c for c in outcome.checks}
    assert outcome.passed, {name: c.status for name, c in checks.items()}
    assert set(checks) == {f"cone_stability_n{n}" for n in (4, 6, 8)}
    for n in (4, 6):
        values = checks[f"cone_stability_n{n}"].values
        assert values["min_admissible_q"] < 0
        assert values["min_q"] <= values["min_admissible_q"]
    stable = checks["cone_stability_n8"]
    assert stable.status == CheckStatus.passed
    assert stable.values["min_q"] is not None
    assert stable.values["min_q"] >= -params.probe_tolerance
    assert stable.values["min_admissible_q"] is None
    assert outcome.artifacts == [f"cone_stability_n{n}.csv" for n in (4, 6, 8)]
    lines = (output_dir / "cone_stability_n8.csv").read_text().splitlines()
    assert lines[0] == "alpha,beta,rho_in,rho_out,q,in_window,tail_finite"
    assert len(lines) == 1 + stable.values["probes"]
