"""Pydantic models for the radial Gelfand problem -Laplacian u = lambda f(u) in B_1."""

import math
from typing import Annotated, Literal

import numpy as np
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator
from scipy.interpolate import CubicHermiteSpline
from typing_extensions import Self

from stablelab.numerics.schemas import FloatArray, NumericModel
from stablelab.utils import check_list_not_empty


class Nonlinearity(BaseModel):
    """Positive, nondecreasing and superlinear f: e^u or (1 + u)^p.

    The power is extended by 0 below u = -1 so that overshooting shots stay finite.
    """

    kind: Annotated[
        Literal["exponential", "power"],
        Field(default="exponential", description="e^u or (1 + u)^p"),
    ]
    p: Annotated[float, Field(default=2.0, gt=1, description="Exponent of the power")]

    def f(self, u: np.ndarray | float) -> np.ndarray | float:
        """Return f(u)."""
        if self.kind == "exponential":
            return np.exp(u)
        return np.maximum(1.0 + np.asarray(u, dtype=float), 0.0) ** self.p

    def df(self, u: np.ndarray | float) -> np.ndarray | float:
        """Return f'(u)."""
        if self.kind == "exponential":
            return np.exp(u)
        base = np.maximum(1.0 + np.asarray(u, dtype=float), 0.0)
        return self.p * base ** (self.p - 1.0)

    def primitive(self, u: np.ndarray | float) -> np.ndarray | float:
        """Return F(u), the primitive of f with F(0) = 0."""
        if self.kind == "exponential":
            return np.expm1(u)
        base = np.maximum(1.0 + np.asarray(u, dtype=float), 0.0)
        return (base ** (self.p + 1.0) - 1.0) / (self.p + 1.0)

    @property
    def label(self) -> str:
        """Return a short name, used in check and artifact names."""
        return "exp" if self.kind == "exponential" else f"power{self.p:g}"


class RadialProfile(NumericModel):
    """Shot u(r) of u'' + (n - 1) u' / r + lambda f(u) = 0 with u(0) = M, u'(0) = 0.

    The nodes start at r = 0, followed by the series launch point and the accepted
    integration steps.
    """

    n: Annotated[int, Field(ge=1, description="Dimension")]
    lam: Annotated[float, Field(ge=0, description="lambda")]
    center: Annotated[float, Field(ge=0, description="M = u(0)")]
    nonlinearity: Nonlinearity
    r: Annotated[FloatArray, Field(description="Radii, from 0 to the last step")]
    u: FloatArray
    du: Annotated[FloatArray, Field(description="u_r at the nodes")]
    ddu: Annotated[FloatArray, Field(description="u_rr at the nodes")]
    residual: Annotated[
        float,
        Field(
            default=0.0,
            description="Largest cell average defect of the flux identity "
            "(r^{n-1} u')' = -lambda r^{n-1} f(u), relative to 1 + lambda f(u)",
        ),
    ]
    reason: Annotated[str, Field(default="completed")]
    supercritical: Annotated[
        bool,
        Field(
            default=False,
            description="The shot blew up or failed before reaching r = 1",
        ),
    ]

    @model_validator(mode="after")
    def verify_nodes(self) -> Self:
        """Validate the samples.

        Raises:
            ValueError: If the arrays differ in length or the radii do not start at 0
                and increase.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if not (self.r.shape == self.u.shape == self.du.shape == self.ddu.shape):
            raise ValueError("Profile arrays must share one shape")
        if self.r.size < 2 or self.r[0] != 0.0 or np.any(np.diff(self.r) <= 0):
            raise ValueError("Profile radii must start at 0 and increase")
        return self

    @property
    def boundary_value(self) -> float:
        """Return u at the last node, u(1) for complete shots."""
        return float(self.u[-1])

    @property
    def sup_norm(self) -> float:
        """Return max |u|."""
        return float(np.max(np.abs(self.u)))

    def resample(self, radii: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return u and u_r at the given radii by cubic Hermite interpolation."""
        radii = np.asarray(radii, dtype=float)
        u = CubicHermiteSpline(self.r, self.u, self.du)(radii)
        du = CubicHermiteSpline(self.r, self.du, self.ddu)(radii)
        return u, du


class BranchRecord(BaseModel):
    """One solution of the branch."""

    center: Annotated[float, Field(description="M = u(0)")]
    lam: Annotated[float, Field(description="lambda(M)")]
    sup_norm: float
    mu1: Annotated[
        float, Field(description="First eigenvalue of -Laplacian - lambda f'(u)")
    ]
    multivalued: Annotated[
        bool,
        Field(
            default=False,
            description="u(1) changed sign more than once along the lambda scan",
        ),
    ]


class SkippedShot(BaseModel):
    """Value of M for which no lambda was found."""

    center: float
    reason: str


class ExtremalEstimate(BaseModel):
    """Largest lambda along the branch and where it is reached."""

    lam: Annotated[float, Field(description="Estimate of lambda*")]
    center: Annotated[float, Field(description="M at the estimate")]
    interior: Annotated[
        bool,
        Field(
            description="False when lambda(M) is largest at the end of the M grid, "
            "so lambda* is only bounded from below"
        ),
    ]


class Branch(BaseModel):
    """Solutions ordered by M = u(0), with the estimate of lambda*."""

    n: int
    nonlinearity: Nonlinearity
    records: Annotated[list[BranchRecord], Field(default_factory=list)]
    skipped: Annotated[list[SkippedShot], Field(default_factory=list)]
    extremal: ExtremalEstimate | None = None

    @property
    def lambda_star(self) -> float | None:
        """Return the estimate of lambda*, None for an empty branch."""
        return self.extremal.lam if self.extremal is not None else None

    @property
    def minimal_records(self) -> list[BranchRecord]:
        """Return the records with M below the maximizer of lambda(M)."""
        if self.extremal is None:
            return []
        if not self.extremal.interior:
            return list(self.records)
        return [r for r in self.records if r.center < self.extremal.center]

    @property
    def multivalued(self) -> bool:
        """Return True when some scan met more than one sign change."""
        return any(r.multivalued for r in self.records)


class SingularSolutionCheck(BaseModel):
    """-2 log r against -Laplacian u = 2 (n - 2) e^u in B_1 minus the origin."""

    n: int
    symbolic_residual: Annotated[
        str, Field(description="Simplified symbolic residual, '0' when exact")
    ]
    sample_radii: list[float]
    sample_residuals: Annotated[
        list[float], Field(description="Residual of the symbolic expression")
    ]
    fd_residuals: Annotated[
        list[float],
        Field(description="Finite difference residual relative to 2 (n - 2) / r^2"),
    ]
    coefficient: Annotated[float, Field(description="lambda f'(u) r^2 = 2 (n - 2)")]
    hardy_constant: Annotated[float, Field(description="(n - 2)^2 / 4")]

    @property
    def margin(self) -> float:
        """Return (n - 2)^2 / 4 - 2 (n - 2), nonnegative exactly when n >= 10."""
        return self.hardy_constant - self.coefficient

    @property
    def stable(self) -> bool:
        """Return True when Hardy's inequality controls the linearized potential."""
        return self.margin >= 0


class StabilitySlack(BaseModel):
    """Both sides of int lambda f'(u) xi^2 <= int |grad xi|^2 for one xi."""

    name: str
    alpha: float
    lhs: Annotated[float, Field(description="int lambda f'(u) xi^2")]
    rhs: Annotated[float, Field(description="int |grad xi|^2")]

    @property
    def slack(self) -> float:
        """Return rhs - lhs."""
        return self.rhs - self.lhs


class GelfandParams(BaseModel):
    """Parameters of the gelfand-branch experiment."""

    model_config = ConfigDict(extra="forbid")

    kind: Annotated[
        Literal["exponential", "power"],
        Field(default="exponential", description="Nonlinearity of the branches"),
    ]
    p: Annotated[float, Field(default=2.0, gt=1, description="Exponent of (1 + u)^p")]
    dimensions: Annotated[
        list[int],
        Field(default=[2, 3], description="Dimensions of the stability branches"),
        AfterValidator(check_list_not_empty),
    ]
    center_max: Annotated[
        float, Field(default=4.0, gt=0, description="Largest M of those branches")
    ]
    center_step: Annotated[
        float, Field(default=0.25, gt=0, description="M grid step of those branches")
    ]
    root_tol: Annotated[
        float, Field(default=1e-10, gt=0, description="Bisection tolerance on lambda")
    ]
    scan_points: Annotated[
        int, Field(default=8, ge=2, description="Cells of the bracketing scan")
    ]
    stability_tolerance: Annotated[
        float, Field(default=1e-6, gt=0, description="Bound on -mu_1 on the branch")
    ]
    known_extremal_tolerance: Annotated[
        float,
        Field(default=1e-3, gt=0, description="Distance of lambda* to 2 when n = 2"),
    ]
    refinement_tolerance: Annotated[
        float,
        Field(
            default=0.01,
            gt=0,
            description="Relative change of lambda* between M grid refinements",
        ),
    ]
    singular_dimension: Annotated[
        int, Field(default=10, ge=3, description="Dimension of the large M study")
    ]
    singular_centers: Annotated[
        list[float],
        Field(default=[2.0, 5.0, 10.0, 15.0, 20.0], description="M values"),
        AfterValidator(check_list_not_empty),
    ]
    singular_gap: Annotated[
        float,
        Field(default=0.5, gt=0, description="|lambda(M_max) - 2 (n - 2)| bound"),
    ]
    singular_distance: Annotated[
        float,
        Field(default=0.1, gt=0, description="Distance to -2 log r on [0.1, 0.9]"),
    ]
    threshold_dimensions: Annotated[
        list[int],
        Field(
            default=[3, 9, 10, 11], description="Dimensions of the singular solution"
        ),
        AfterValidator(check_list_not_empty),
    ]
    singular_residual_tolerance: Annotated[float, Field(default=1e-9, gt=0)]
    testfunction_dimension: Annotated[int, Field(default=3, ge=1)]
    testfunction_alpha: Annotated[
        float, Field(default=1.9, gt=0, lt=2, description="xi = e^{alpha u} - 1")
    ]
    radial_alpha: Annotated[
        float,
        Field(default=1.0, gt=0, description="xi = u_r r (r^-alpha - 2^alpha)_+"),
    ]
    testfunction_profiles: Annotated[
        int, Field(default=3, ge=1, description="Minimal branch profiles tested")
    ]
    slack_tolerance: Annotated[float, Field(default=1e-8, gt=0)]
    eigen_max_spacing: Annotated[
        float, Field(default=2e-3, gt=0, description="Eigenvalue mesh spacing")
    ]


def singular_profile(r: np.ndarray) -> np.ndarray:
    """Return -2 log r."""
    return -2.0 * np.log(np.asarray(r, dtype=float))


def singular_coefficient(n: int) -> float:
    """Return 2 (n - 2), the lambda for which -2 log r solves the problem with e^u."""
    return 2.0 * (n - 2)


def known_extremal(n: int) -> float | None:
    """Return lambda* for f = e^u when it has a closed form, 2 in the plane."""
    return 2.0 if n == 2 else None


def planar_branch(center: float) -> float:
    """Return lambda(M) in the plane for f = e^u.

    The solutions are log(8 mu / (lambda (1 + mu r^2)^2)) with
    lambda = 8 mu / (1 + mu)^2 and M = 2 log(1 + mu).
    """
    mu = math.expm1(0.5 * center)
    return 8.0 * mu / (1.0 + mu) ** 2
