"""Per-check records collected by the experiments."""

from enum import Enum
from typing import Annotated, Any, Self

import numpy as np
from pydantic import BaseModel, Field, model_validator


class CheckStatus(str, Enum):
    """Outcome of a single check."""

    passed = "pass"
    failed = "fail"
    observed = "observed"


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to JSON friendly python values."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


class CheckRecord(BaseModel):
    """Asserted inequality or observation with its values and tolerance."""

    name: Annotated[str, Field(description="Check identifier")]
    anchor: Annotated[str, Field(description="Claim the check is about")]
    reference: Annotated[
        str | None,
        Field(default=None, description="Named result the claim belongs to"),
    ]
    status: Annotated[CheckStatus, Field(description="pass, fail or observed")]
    values: Annotated[
        dict[str, Any], Field(default_factory=dict, description="Measured values")
    ]
    tolerance: Annotated[
        float | None, Field(default=None, description="Tolerance of the assertion")
    ]

    @classmethod
    def assertion(
        cls,
        name: str,
        anchor: str,
        holds: bool,
        *,
        reference: str,
        tolerance: float | None = None,
        **values: Any,
    ) -> "CheckRecord":
        """Build a pass or fail record."""
        return cls(
            name=name,
            anchor=anchor,
            reference=reference,
            status=CheckStatus.passed if holds else CheckStatus.failed,
            values=_plain(values),
            tolerance=tolerance,
        )

    @model_validator(mode="after")
    def verify_reference(self) -> Self:
        """Require a reference on every pass or fail record.

        Raises:
            ValueError: If an asserted check has no reference.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if self.status != CheckStatus.observed and not self.reference:
            raise ValueError(f"Assertion {self.name!r} has no reference")
        return self

    @classmethod
    def observation(cls, name: str, anchor: str, **values: Any) -> "CheckRecord":
        """Build a record that never fails."""
        return cls(
            name=name, anchor=anchor, status=CheckStatus.observed, values=_plain(values)
        )


class ExperimentOutcome(BaseModel):
    """Checks and artifact files produced by one experiment run."""

    checks: Annotated[list[CheckRecord], Field(default_factory=list)]
    artifacts: Annotated[
        list[str],
        Field(default_factory=list, description="Artifact file names"),
    ]

    @property
    def passed(self) -> bool:
        """Return False when any asserted check failed."""
        return all(c.status != CheckStatus.failed for c in self.checks)
