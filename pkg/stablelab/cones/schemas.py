"""Pydantic models for level set fields, cone profiles and stability probes."""

from collections.abc import Callable
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from stablelab.config import get_settings
from stablelab.numerics.schemas import FloatArray, NumericModel

QuadraticForm = Literal["jacobi", "simons"]
RadialFunction = Callable[[np.ndarray], np.ndarray]


class LevelSetField(NumericModel):
    """Scalar field on R^n whose level sets are the surfaces under study.

    The outward normal of E = {u < 0} is grad u / |grad u|.
    """

    dimension: Annotated[int, Field(ge=2, description="Ambient dimension n")]
    evaluator: Annotated[
        Callable[[np.ndarray], float], Field(description="Field u(x)")
    ]
    gradient: Annotated[
        Callable[[np.ndarray], np.ndarray] | None,
        Field(default=None, description="Exact gradient, finite differences if None"),
    ]
    hessian: Annotated[
        Callable[[np.ndarray], np.ndarray] | None,
        Field(default=None, description="Exact Hessian, finite differences if None"),
    ]
    gradient_eps: Annotated[
        float,
        Field(
            default_factory=lambda: get_settings().GRADIENT_EPS,
            gt=0,
            description="Queries with |grad u| below this threshold are rejected",
        ),
    ]
    vertex_exclusion: Annotated[
        float | None,
        Field(
            default=None,
            description="For cone fields, queries closer than this radius to the "
            "vertex are rejected",
        ),
    ]
    label: Annotated[str, Field(default="field", description="Human readable name")]


class RadialConeProfile(BaseModel):
    """Cone whose squared second fundamental form is d / r^2 along rays."""

    n: Annotated[int, Field(ge=2, description="Ambient dimension")]
    d: Annotated[
        float,
        Field(ge=0, description="Curvature coefficient, c^2 = d / r^2 along rays"),
    ]
    label: Annotated[
        str, Field(default="cone", description="Cross-section label")
    ]


class CutoffProbe(BaseModel):
    """Test function r^-alpha inside B_1, r^-beta outside, cut off linearly.

    The probe vanishes below rho_in and above rho_out and is linear on
    [rho_in, 2 rho_in] and [rho_out / 2, rho_out].
    """

    alpha: Annotated[float, Field(description="Inner exponent")]
    beta: Annotated[float, Field(description="Outer exponent")]
    rho_in: Annotated[float, Field(gt=0, lt=0.5, description="Inner radius")]
    rho_out: Annotated[float, Field(gt=2, description="Outer radius")]

    def extended(self, factor: float) -> "CutoffProbe":
        """Return the same probe with both truncation radii moved by factor."""
        return self.model_copy(
            update={"rho_in": self.rho_in / factor, "rho_out": self.rho_out * factor}
        )

    def pieces(self) -> list[tuple[float, float, RadialFunction, RadialFunction]]:
        """Return (start, stop, eta, eta') for each smooth piece of the probe.

        eta' jumps at every piece boundary.
        """
        inner_end, outer_start = 2.0 * self.rho_in, 0.5 * self.rho_out
        inner_val = inner_end ** (-self.alpha)
        outer_val = outer_start ** (-self.beta)
        alpha, beta, rho_in, rho_out = self.alpha, self.beta, self.rho_in, self.rho_out
        return [
            (
                rho_in,
                inner_end,
                lambda r: inner_val * (r - rho_in) / rho_in,
                lambda r: np.full_like(r, inner_val / rho_in),
            ),
            (
                inner_end,
                1.0,
                lambda r: r ** (-alpha),
                lambda r: -alpha * r ** (-alpha - 1),
            ),
            (
                1.0,
                outer_start,
                lambda r: r ** (-beta),
                lambda r: -beta * r ** (-beta - 1),
            ),
            (
                outer_start,
                rho_out,
                lambda r: outer_val * (rho_out - r) / outer_start,
                lambda r: np.full_like(r, -outer_val / outer_start),
            ),
        ]


class ProbeResult(BaseModel):
    """Value of the cone quadratic form on one probe."""

    alpha: float
    beta: float
    rho_in: float
    rho_out: float
    q: Annotated[float, Field(description="Quadratic form value")]
    in_window: Annotated[
        bool, Field(description="Whether (alpha, beta) lies in the finiteness window")
    ]
    tail_finite: Annotated[
        bool,
        Field(
            description="False when extending the radii at least doubles a positive "
            "value"
        ),
    ]

    @property
    def admissible(self) -> bool:
        """Return True when the probe is in the window and its tails are finite."""
        return self.in_window and self.tail_finite


class ConeStabilityScan(BaseModel):
    """All probe results of a scan and their minima."""

    n: int
    d: float
    form: QuadraticForm
    results: Annotated[list[ProbeResult], Field(default_factory=list)]
    min_admissible_q: Annotated[
        float | None,
        Field(default=None, description="Smallest value over admissible probes"),
    ]
    min_tail_finite_q: Annotated[
        float | None,
        Field(default=None, description="Smallest value over tail-finite probes"),
    ]
    min_q: Annotated[
        float | None,
        Field(
            default=None,
            description="Smallest value over every probe, each truncation being a "
            "compactly supported test function",
        ),
    ]


class SimonsCoefficient(NumericModel):
    """Measured value of r^2 c^2 on the Simons cone and its symbolic oracle."""

    m: int
    samples: Annotated[FloatArray, Field(description="r^2 c^2 at each sample point")]
    d: Annotated[float, Field(description="Mean of the samples")]
    spread: Annotated[float, Field(description="Max minus min of the samples")]
    oracle: Annotated[
        float, Field(description="Cross-section value from symbolic differentiation")
    ]


class SimonsGap(NumericModel):
    """Simons inequality gap along a ray of a cone."""

    radii: FloatArray
    gaps: Annotated[FloatArray, Field(description="Closed form gap per radius")]
    fd_gaps: Annotated[
        FloatArray | None,
        Field(default=None, description="Finite difference gap, if cross-checked"),
    ]
    max_mismatch: Annotated[
        float | None,
        Field(default=None, description="Largest relative closed form / FD mismatch"),
    ]


class CalibrationScan(BaseModel):
    """Sign comparison of div X and s^4 - t^4 over a grid of (0, upper]^2."""

    m: int
    nodes: int
    upper: float
    violations: int
    first_violation: Annotated[
        tuple[float, float] | None,
        Field(default=None, description="(s, t) of the first violating node"),
    ]

    @model_validator(mode="after")
    def verify_counts(self) -> Self:
        """Validate that the number of violations fits in the grid.

        Raises:
            ValueError: If violations is negative or exceeds the number of nodes.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if not 0 <= self.violations <= self.nodes**2:
            raise ValueError("Violation count out of range")
        return self


class SimonsCalibrationParams(BaseModel):
    """Parameters of the simons-calibration experiment."""

    model_config = ConfigDict(extra="forbid")

    geometry_m: Annotated[
        list[int],
        Field(default=[2, 3, 4], description="Values of m for the geometry checks"),
    ]
    samples: Annotated[
        int, Field(default=100, ge=1, description="Random cone points per m")
    ]
    dilations: Annotated[
        list[float],
        Field(default=[0.5, 2.0], description="Ray dilations of the homogeneity check"),
    ]
    calibration_m: Annotated[
        list[int],
        Field(default=[2, 3, 4, 5, 6], description="Values of m for the sign scan"),
    ]
    calibration_nodes: Annotated[
        int, Field(default=200, ge=2, description="Sign scan nodes per axis")
    ]
    calibration_upper: Annotated[
        float, Field(default=2.0, gt=0, description="Sign scan grid covers (0, upper]")
    ]
    gap_dimensions: Annotated[
        list[int],
        Field(default=[4, 6, 8], description="Even dimensions of the Simons gap check"),
    ]
    gap_radii: Annotated[
        list[float],
        Field(default=[0.5, 1.0, 2.0, 4.0], description="Radii of the Simons gap"),
    ]
    consistency_tolerance: Annotated[
        float,
        Field(
            default=1e-4,
            gt=0,
            description="Relative tolerance of the closed form / FD gap comparison",
        ),
    ]
    lawson_m: Annotated[
        int, Field(default=3, ge=2, description="First factor of the Lawson cone")
    ]
    lawson_k: Annotated[
        int, Field(default=5, ge=2, description="Second factor of the Lawson cone")
    ]


class ConeStabilityParams(BaseModel):
    """Parameters of the cone-stability experiment."""

    model_config = ConfigDict(extra="forbid")

    dimensions: Annotated[
        list[int], Field(default=[4, 6, 8], description="Even ambient dimensions")
    ]
    alphas: Annotated[
        list[float],
        Field(
            default=[round(-1.4 + 0.1 * i, 10) for i in range(29)],
            description="Inner exponents of the probes",
        ),
    ]
    betas: Annotated[
        list[float],
        Field(
            default=[round(-1.4 + 0.1 * i, 10) for i in range(29)],
            description="Outer exponents of the probes",
        ),
    ]
    radii: Annotated[
        list[tuple[float, float]],
        Field(
            default=[(0.01, 10.0), (0.01, 100.0)],
            description="(rho_in, rho_out) truncation radii",
        ),
    ]
    form: Annotated[
        QuadraticForm, Field(default="jacobi", description="jacobi or simons")
    ]
    nodes_per_decade: Annotated[
        int, Field(default=400, ge=10, description="Probe mesh resolution")
    ]
    probe_tolerance: Annotated[
        float,
        Field(
            default=1e-8,
            gt=0,
            description="Negative values above -probe_tolerance count as zero",
        ),
    ]
    samples: Annotated[
        int,
        Field(default=20, ge=1, description="Cone points used to measure d"),
    ]
