"""Module with the configuration parameters."""

import logging
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Annotated

from pydantic import BeforeValidator, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing_extensions import Self


class LogLevelEnum(int, Enum):
    """Enumeration of supported logging levels."""

    DEBUG = logging.DEBUG
    INFO = logging.INFO
    WARNING = logging.WARNING
    ERROR = logging.ERROR
    CRITICAL = logging.CRITICAL


class ReportFormatEnum(str, Enum):
    """Enumeration of supported report serializations."""

    json = "json"
    csv = "csv"
    human = "human"


def get_level(value: int | str | LogLevelEnum) -> int:
    """Convert a string, integer, or LogLevelEnum value to a logging level integer.

    Args:
        value: The log level as a string (case-insensitive), integer, or LogLevelEnum.

    Returns:
        int: The corresponding logging level integer.

    """
    if isinstance(value, str):
        return LogLevelEnum.__getitem__(value.upper())
    return value


class Settings(BaseSettings):
    """Model with the lab settings."""

    PROJECT_NAME: Annotated[
        str,
        Field(default="stablelab", description="Project name shown in the reports"),
    ]
    LOG_LEVEL: Annotated[
        LogLevelEnum,
        Field(default=LogLevelEnum.INFO, description="Logs level"),
        BeforeValidator(get_level),
    ]
    OUTPUT_DIR: Annotated[
        Path,
        Field(
            default=Path("results"),
            description="Directory receiving reports and artifacts when the "
            "experiment configuration does not set one",
        ),
    ]
    REPORT_FORMAT: Annotated[
        ReportFormatEnum,
        Field(
            default=ReportFormatEnum.json,
            description="Serialization printed on stdout. Allowed values: json, csv, "
            "human",
        ),
    ]
    DEFAULT_TOLERANCE: Annotated[
        float,
        Field(
            default=1e-6,
            gt=0,
            description="Tolerance applied to checks without an explicit override",
        ),
    ]
    FD_STEP: Annotated[
        float,
        Field(
            default=1e-4,
            gt=0,
            description="Relative step of the central differences used when a field "
            "has no exact derivatives",
        ),
    ]
    GRADIENT_EPS: Annotated[
        float,
        Field(
            default=1e-8,
            gt=0,
            description="Gradient norm below which a level set is considered "
            "degenerate",
        ),
    ]
    VERTEX_EXCLUSION: Annotated[
        float,
        Field(
            default=1e-3,
            gt=0,
            description="Queries closer than this radius to a cone vertex are rejected",
        ),
    ]
    EIGEN_MAX_ITER: Annotated[
        int,
        Field(
            default=500,
            ge=1,
            description="Default iteration budget of the smallest eigenvalue solver",
        ),
    ]
    RK_MIN_STEP: Annotated[
        float,
        Field(
            default=1e-14,
            gt=0,
            description="Adaptive Runge-Kutta steps below this size abort the "
            "integration",
        ),
    ]

    model_config = SettingsConfigDict(env_file=".env")

    @model_validator(mode="after")
    def verify_vertex_exclusion(self) -> Self:
        """Validate the relation between the degeneracy thresholds.

        Raises:
            ValueError: If the gradient threshold is not smaller than the vertex
                exclusion radius.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if self.GRADIENT_EPS >= self.VERTEX_EXCLUSION:
            raise ValueError(
                "GRADIENT_EPS must be smaller than VERTEX_EXCLUSION, otherwise every "
                "point near a vertex is rejected twice."
            )
        return self


@lru_cache
def get_settings() -> Settings:
    """Retrieve cached settings."""
    return Settings()
