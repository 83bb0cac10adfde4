"""Experiment configuration and report models."""

from pathlib import Path
from typing import Annotated, Any

from pydantic import BaseModel, ConfigDict, Field

from stablelab.allen_cahn.schemas import AllenCahnLayerParams, AllenCahnSaddleParams
from stablelab.cones.schemas import ConeStabilityParams, SimonsCalibrationParams
from stablelab.experiments.checks import CheckRecord
from stablelab.foliation.schemas import FoliationParams
from stablelab.gelfand.schemas import GelfandParams
from stablelab.hardy.schemas import HardyParams
from stablelab.isoperimetric.schemas import IsoperimetricParams


class ExperimentConfig(BaseModel):
    """Configuration of one run.

    Every experiment reads its own section; the other sections are echoed with their
    defaults. Unknown keys are rejected at every level.
    """

    model_config = ConfigDict(extra="forbid")

    experiment: Annotated[
        str,
        Field(default="simons-calibration", description="Name of the experiment"),
    ]
    output_dir: Annotated[
        Path | None,
        Field(
            default=None,
            description="Directory of the report and the artifacts, "
            "Settings.OUTPUT_DIR when missing",
        ),
    ]
    seed: Annotated[
        int, Field(default=0, ge=0, description="Seed of every random sampling")
    ]
    tolerance: Annotated[
        float | None,
        Field(
            default=None,
            gt=0,
            description="Global tolerance, Settings.DEFAULT_TOLERANCE when missing",
        ),
    ]
    simons_calibration: Annotated[
        SimonsCalibrationParams, Field(default_factory=SimonsCalibrationParams)
    ]
    cone_stability: Annotated[
        ConeStabilityParams, Field(default_factory=ConeStabilityParams)
    ]
    foliation: Annotated[FoliationParams, Field(default_factory=FoliationParams)]
    hardy: Annotated[HardyParams, Field(default_factory=HardyParams)]
    allen_cahn_layer: Annotated[
        AllenCahnLayerParams, Field(default_factory=AllenCahnLayerParams)
    ]
    allen_cahn_saddle: Annotated[
        AllenCahnSaddleParams, Field(default_factory=AllenCahnSaddleParams)
    ]
    gelfand_branch: Annotated[GelfandParams, Field(default_factory=GelfandParams)]
    isoperimetric: Annotated[
        IsoperimetricParams, Field(default_factory=IsoperimetricParams)
    ]


class ExperimentReport(BaseModel):
    """Outcome of a run: the config echo, the checks and the artifacts.

    The wall clock is logged and printed in the human format but excluded from the
    JSON serialization, so that identical configurations give identical reports.
    """

    experiment: Annotated[str, Field(description="Name of the experiment")]
    passed: Annotated[bool, Field(description="False when any assertion failed")]
    config: Annotated[dict[str, Any], Field(description="Configuration echo")]
    checks: Annotated[list[CheckRecord], Field(default_factory=list)]
    artifacts: Annotated[
        list[str], Field(default_factory=list, description="Files in the output dir")
    ]
    wall_clock: Annotated[
        float, Field(default=0.0, exclude=True, description="Seconds")
    ]
