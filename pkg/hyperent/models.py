import math
from enum import Enum
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from hyperent.config import settings


class DofKind(str, Enum):
    POLARIZATION = "polarization"
    SPATIAL = "spatial"
    TIMEBIN = "timebin"
    SPIN = "spin"
    ARRIVAL = "arrival"


class BasisTag(str, Enum):
    LINEAR = "linear"
    CIRCULAR = "circular"
    PATH = "path"
    BIN = "bin"
    ARRIVAL = "arrival"
    SPIN = "spin"


class BellLabel(str, Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


class RunMode(str, Enum):
    EXACT = "exact"
    SAMPLE = "sample"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class HyperBellLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    pol: BellLabel
    spat: BellLabel

    @classmethod
    def all(cls) -> List["HyperBellLabel"]:
        return [cls(pol=p, spat=s) for p in BellLabel for s in BellLabel]

    def __str__(self) -> str:
        return f"({self.pol.value}, {self.spat.value})"


class PartialHyperParams(BaseModel):
    """Real amplitudes of (alpha|HH> + beta|VV>)(gamma|a1b1> + delta|a2b2>)"""
    model_config = ConfigDict(frozen=True)

    alpha: float
    beta: float
    gamma: float
    delta: float

    @model_validator(mode="after")
    def check_normalized(self) -> "PartialHyperParams":
        _check_pair("alpha", "beta", self.alpha, self.beta)
        _check_pair("gamma", "delta", self.gamma, self.delta)
        return self


class TimeBinParams(BaseModel):
    """Real amplitudes of (alpha|HH> + beta|VV>)(delta|SS> + eta|LL>)"""
    model_config = ConfigDict(frozen=True)

    alpha: float
    beta: float
    delta: float
    eta: float

    @model_validator(mode="after")
    def check_normalized(self) -> "TimeBinParams":
        _check_pair("alpha", "beta", self.alpha, self.beta)
        _check_pair("delta", "eta", self.delta, self.eta)
        return self


def _check_pair(first: str, second: str, x: float, y: float) -> None:
    for name, value in ((first, x), (second, y)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")
    deviation = abs(x * x + y * y - 1.0)
    if deviation > settings.normalization_tolerance:
        raise ValueError(f"{first}^2 + {second}^2 must equal 1 (off by {deviation:.3e})")


class RunConfig(BaseModel):
    protocol: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    mode: RunMode = RunMode.EXACT
    trials: Optional[int] = None
    seed: int = settings.default_seed
    output_path: Optional[str] = None
    output_format: OutputFormat = OutputFormat(settings.output_format)

    @model_validator(mode="after")
    def check_trials(self) -> "RunConfig":
        if self.mode == RunMode.SAMPLE:
            if self.trials is None:
                raise ValueError("trials is required when mode is 'sample'")
            if self.trials < 1:
                raise ValueError(f"trials must be >= 1, got {self.trials}")
        elif self.trials is not None:
            raise ValueError("trials is only accepted when mode is 'sample'")
        return self


class RunMetadata(BaseModel):
    tool: str
    version: str
    protocol: str
    mode: RunMode
    seed: int
    trials: Optional[int] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)


class CurveTable(BaseModel):
    variable: str
    grid: List[float]
    series: Dict[str, List[float]]
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_columns(self) -> "CurveTable":
        upper = 1.0 + settings.normalization_tolerance
        for name, column in self.series.items():
            if len(column) != len(self.grid):
                raise ValueError(
                    f"Column {name} has {len(column)} entries, grid has {len(self.grid)}"
                )
            for value in column:
                if not 0.0 <= value <= upper:
                    raise ValueError(f"Column {name} holds {value}, outside [0, 1]")
        return self

    def to_frame(self) -> pd.DataFrame:
        data = {self.variable: self.grid}
        data.update(self.series)
        return pd.DataFrame(data)
