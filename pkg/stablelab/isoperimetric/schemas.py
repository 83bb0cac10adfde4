"""Pydantic models for planar domains and the Neumann calibration problem."""

import math
from typing import Annotated, Literal

import numpy as np
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, special
from typing_extensions import Self

from stablelab.numerics.schemas import BoolArray, FloatArray, NumericModel
from stablelab.utils import check_list_not_empty

DomainKind = Literal["disk", "rectangle", "ellipse"]


class PlanarDomain(BaseModel):
    """Disk, rectangle or ellipse centered at the origin.

    Rectangles and ellipses are axis aligned; the ellipse has its major axis on x.
    """

    kind: Annotated[DomainKind, Field(default="disk")]
    radius: Annotated[float, Field(default=1.0, gt=0, description="Disk radius")]
    width: Annotated[
        float, Field(default=1.0, gt=0, description="Rectangle side on x")
    ]
    height: Annotated[
        float, Field(default=1.0, gt=0, description="Rectangle side on y")
    ]
    semi_major: Annotated[float, Field(default=2.0, gt=0, description="Ellipse a")]
    semi_minor: Annotated[float, Field(default=1.0, gt=0, description="Ellipse b")]

    @model_validator(mode="after")
    def verify_axes(self) -> Self:
        """Validate the ellipse axes.

        Raises:
            ValueError: If an ellipse has b >= a; circles are disks.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if self.kind == "ellipse" and self.semi_minor >= self.semi_major:
            raise ValueError("Ellipses need semi_minor < semi_major, use a disk")
        return self

    @property
    def area(self) -> float:
        """Return |Omega|."""
        if self.kind == "disk":
            return math.pi * self.radius**2
        if self.kind == "rectangle":
            return self.width * self.height
        return math.pi * self.semi_major * self.semi_minor

    @property
    def perimeter(self) -> float:
        """Return |boundary of Omega|, by adaptive quadrature for the ellipse."""
        if self.kind == "disk":
            return 2.0 * math.pi * self.radius
        if self.kind == "rectangle":
            return 2.0 * (self.width + self.height)
        a, b = self.semi_major, self.semi_minor
        value, _ = integrate.quad(
            lambda t: math.hypot(a * math.sin(t), b * math.cos(t)),
            0.0,
            0.5 * math.pi,
            epsabs=1e-14,
            epsrel=1e-13,
        )
        return 4.0 * value

    def perimeter_oracle(self) -> float:
        """Return the perimeter in closed form, 4 a E(1 - b^2 / a^2) for the ellipse."""
        if self.kind != "ellipse":
            return self.perimeter
        a, b = self.semi_major, self.semi_minor
        return 4.0 * a * float(special.ellipe(1.0 - (b / a) ** 2))

    @property
    def min_curvature_radius(self) -> float:
        """Return the smallest radius of curvature, the shorter side for rectangles."""
        if self.kind == "disk":
            return self.radius
        if self.kind == "rectangle":
            return min(self.width, self.height)
        return self.semi_minor**2 / self.semi_major

    def scaled(self, factor: float) -> "PlanarDomain":
        """Return the domain dilated by factor."""
        return self.model_copy(
            update={
                "radius": factor * self.radius,
                "width": factor * self.width,
                "height": factor * self.height,
                "semi_major": factor * self.semi_major,
                "semi_minor": factor * self.semi_minor,
            }
        )

    def boundary_polyline(
        self, fraction: float = 0.1
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return a closed counterclockwise polyline of the boundary.

        Segments are at most fraction times min_curvature_radius long; the first point
        is repeated at the end.
        """
        limit = fraction * self.min_curvature_radius
        if self.kind == "rectangle":
            w, h = 0.5 * self.width, 0.5 * self.height
            corners = [(w, -h), (w, h), (-w, h), (-w, -h), (w, -h)]
            xs, ys = [], []
            for (x0, y0), (x1, y1) in zip(corners, corners[1:], strict=False):
                count = math.ceil(math.hypot(x1 - x0, y1 - y0) / limit)
                s = np.arange(count) / count
                xs.append(x0 + s * (x1 - x0))
                ys.append(y0 + s * (y1 - y0))
            x, y = np.concatenate(xs), np.concatenate(ys)
        else:
            a, b = (
                (self.radius, self.radius)
                if self.kind == "disk"
                else (self.semi_major, self.semi_minor)
            )
            count = math.ceil(2.0 * math.pi * a / limit)
            t = 2.0 * math.pi * np.arange(count) / count
            x, y = a * np.cos(t), b * np.sin(t)
        return np.append(x, x[0]), np.append(y, y[0])


class NeumannSolution(NumericModel):
    """Solution of Laplacian u = c in Omega, u_nu = 1 on the boundary, zero mean.

    Nodes live on a logical rows x cols grid of boundary fitted coordinates: polar for
    the disk, elliptic for the ellipse, Cartesian for the rectangle.
    """

    domain: PlanarDomain
    step: Annotated[float, Field(gt=0, description="Nominal mesh size h")]
    x: Annotated[FloatArray, Field(description="Node abscissas, rows x cols")]
    y: Annotated[FloatArray, Field(description="Node ordinates, rows x cols")]
    values: Annotated[FloatArray, Field(description="u at the nodes, rows x cols")]
    volumes: Annotated[FloatArray, Field(description="Control volume areas")]
    boundary: Annotated[
        BoolArray, Field(description="True on nodes carrying boundary flux")
    ]
    edges: Annotated[
        np.ndarray, Field(description="Pairs of flat node indices sharing a face")
    ]
    constant: Annotated[float, Field(description="c = discrete perimeter / area")]
    discrete_perimeter: float
    discrete_area: float
    interior_residual: Annotated[
        float, Field(description="max |Laplacian_h u - c| on interior nodes")
    ]
    boundary_residual: Annotated[
        float, Field(description="Same on the boundary control volumes")
    ]

    @property
    def mean(self) -> float:
        """Return the discrete mean of u."""
        return float(np.sum(self.volumes * self.values) / np.sum(self.volumes))

    def error_against(self, exact: np.ndarray) -> float:
        """Return max |u - exact| at the nodes, both shifted to zero mean."""
        exact = np.asarray(exact, dtype=float)
        shifted = exact - np.sum(self.volumes * exact) / np.sum(self.volumes)
        return float(np.max(np.abs(self.values - shifted)))

    def gradient(self) -> tuple[np.ndarray, np.ndarray]:
        """Return grad u at the nodes by least squares over the face neighbours."""
        x, y, u = self.x.ravel(), self.y.ravel(), self.values.ravel()
        a, b = self.edges[:, 0], self.edges[:, 1]
        dx, dy, du = x[b] - x[a], y[b] - y[a], u[b] - u[a]
        normal = np.zeros((x.size, 2, 2))
        rhs = np.zeros((x.size, 2))
        for node in (a, b):
            np.add.at(normal[:, 0, 0], node, dx * dx)
            np.add.at(normal[:, 0, 1], node, dx * dy)
            np.add.at(normal[:, 1, 1], node, dy * dy)
            np.add.at(rhs[:, 0], node, dx * du)
            np.add.at(rhs[:, 1], node, dy * du)
        normal[:, 1, 0] = normal[:, 0, 1]
        grad = np.linalg.solve(normal, rhs[..., None])[..., 0]
        shape = self.values.shape
        return grad[:, 0].reshape(shape), grad[:, 1].reshape(shape)


class CoverageReport(BaseModel):
    """Directions p of the unit disk attained by grad u at interior contact points.

    A direction is covered when its grid minimizer is an interior node with
    |grad u - p| <= tolerance. Directions within tolerance of the unit circle are not
    resolved by the grid: their contact points may sit in the boundary cells.
    """

    samples: int
    covered: Annotated[
        int, Field(description="Interior minimizers with grad u = p within tolerance")
    ]
    boundary_minimizers: Annotated[
        int, Field(description="Directions whose grid minimizer is a boundary node")
    ]
    resolved: Annotated[
        int, Field(description="Directions with |p| <= 1 - tolerance")
    ]
    resolved_covered: Annotated[
        int, Field(description="Covered directions among the resolved ones")
    ]
    max_gradient_gap: Annotated[
        float, Field(description="Largest |grad u - p| at the grid minimizers")
    ]
    tolerance: float

    @property
    def fraction(self) -> float:
        """Return covered / samples."""
        return self.covered / self.samples

    @property
    def resolved_fraction(self) -> float:
        """Return resolved_covered / resolved, 1 when nothing is resolved."""
        return self.resolved_covered / self.resolved if self.resolved else 1.0


class IsoperimetricParams(BaseModel):
    """Parameters of the isoperimetric experiment."""

    model_config = ConfigDict(extra="forbid")

    disk_radius: Annotated[float, Field(default=1.0, gt=0)]
    square_side: Annotated[float, Field(default=1.0, gt=0)]
    ellipse_axes: Annotated[
        tuple[float, float],
        Field(default=(2.0, 1.0), description="Semi-axes a > b of the ellipse"),
    ]
    step: Annotated[
        float, Field(default=0.02, gt=0, description="Mesh size of the Neumann solves")
    ]
    samples: Annotated[
        int, Field(default=500, ge=1, description="Directions p of the coverage test")
    ]
    control_radius: Annotated[
        float, Field(default=1.5, gt=1, description="|p| of the control directions")
    ]
    gradient_factor: Annotated[
        float,
        Field(default=2.0, gt=0, description="grad u = p tolerance in units of h"),
    ]
    reference_tolerance: Annotated[
        float, Field(default=1e-6, gt=0, description="Disk solution vs r^2 / (2R)")
    ]
    residual_tolerance: Annotated[float, Field(default=1e-6, gt=0)]
    compatibility_tolerance: Annotated[
        float, Field(default=1e-4, gt=0, description="c against perimeter / area")
    ]
    ratio_tolerance: Annotated[float, Field(default=1e-6, gt=0)]
    scale_factor: Annotated[
        float, Field(default=3.0, gt=0, description="Dilation of the invariance test")
    ]
    refinement_factors: Annotated[
        list[float],
        Field(
            default=[2.0, 1.5, 1.0],
            description="Coarsening factors of the coverage study",
        ),
        AfterValidator(check_list_not_empty),
    ]
    polyline_fraction: Annotated[float, Field(default=0.1, gt=0, le=1)]
    checkpoint: Annotated[
        bool, Field(default=True, description="Write the Neumann solutions")
    ]
