"""
Run documents: one JSON file describing grid, kernels, model, schedule,
initial condition and monitors, validated with pydantic.
"""

import json
import logging
import os
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from splitting.schedule import SplitSchedule
from utils.data_models import GridSpec, KernelSpec
from utils.errors import ConfigError, ParameterError

logger = logging.getLogger(__name__)


class GridConfig(BaseModel):
    """Periodic box of side L with N points per axis in d dimensions."""
    extent: Union[float, List[float]]
    points: Union[int, List[int]]
    dim: int = Field(default=1, ge=1)

    def to_grid_spec(self) -> GridSpec:
        extent = self.extent if isinstance(self.extent, list) else [self.extent] * self.dim
        points = self.points if isinstance(self.points, list) else [self.points] * self.dim
        if len(extent) != self.dim or len(points) != self.dim:
            raise ConfigError(f"grid extent/points do not match dimension {self.dim}")
        try:
            return GridSpec(extent=tuple(float(e) for e in extent), points=tuple(int(n) for n in points))
        except ParameterError as e:
            raise ConfigError(f"invalid grid: {e}") from e


class KernelConfig(BaseModel):
    sigma: float = Field(ge=0)
    beta: float = Field(gt=0, le=1)


class ModelConfig(BaseModel):
    variant: Literal["fisher", "cgl", "fhn", "population", "custom"]
    params: Dict[str, Any] = Field(default_factory=dict)


class ScheduleConfig(BaseModel):
    """Splitting period h and either the step count n or the final time T = n h."""
    h: float = Field(gt=0)
    n: Optional[int] = Field(default=None, ge=1)
    total_time: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def check_consistency(self) -> "ScheduleConfig":
        if self.n is None and self.total_time is None:
            raise ValueError("schedule needs n or total_time")
        if self.n is not None and self.total_time is not None:
            if abs(self.n * self.h - self.total_time) > 1e-9 * max(1.0, self.total_time):
                raise ValueError(f"h * n = {self.n * self.h} does not match total_time {self.total_time}")
        return self

    def to_schedule(self) -> SplitSchedule:
        try:
            if self.n is not None:
                return SplitSchedule(h=self.h, n=self.n)
            return SplitSchedule.from_total_time(self.total_time, self.h)
        except ParameterError as e:
            raise ConfigError(f"invalid schedule: {e}") from e


class InitialConditionConfig(BaseModel):
    """
    Initial datum descriptor.

    kind:
        constant: background everywhere
        cosine: background + amplitude · Π_i cos(2π mode x_i / L_i)
        logistic_front: 1 / (1 + exp(slope (x_0 - center))) along the first axis
        bump: background + amplitude · smooth compactly supported bump of radius width
        random_smooth: seeded low-mode field mapped onto [low, high]
        random_phase: amplitude · exp(i φ(x)) with a seeded smooth phase φ
        file: raw little-endian float64 snapshot or .npy array
    """
    kind: Literal["constant", "cosine", "logistic_front", "bump", "random_smooth", "random_phase", "file"]
    background: Union[float, List[float]] = 0.0
    background_imag: Union[float, List[float]] = 0.0
    amplitude: Union[float, List[float]] = 1.0
    mode: int = 1
    center: float = 0.0
    width: float = 1.0
    slope: float = 1.0
    low: float = 0.0
    high: float = 1.0
    modes: int = Field(default=4, ge=1)
    path: Optional[str] = None

    @model_validator(mode="after")
    def check_kind(self) -> "InitialConditionConfig":
        if self.kind == "file" and not self.path:
            raise ValueError("file initial condition needs a path")
        if self.kind == "random_smooth" and self.low > self.high:
            raise ValueError(f"random_smooth needs low <= high, got [{self.low}, {self.high}]")
        if self.kind == "bump" and self.width <= 0:
            raise ValueError("bump width must be positive")
        return self


class RegionConfig(BaseModel):
    """
    Invariant region audited after a run.

    kind "auto" picks the family of the model (fisher interval, cgl ball, fhn
    rectangle, population positive-mass ball, data interval otherwise).
    """
    kind: Literal["auto", "ball", "interval", "fisher", "fhn", "population"] = "auto"
    fatal: bool = False
    tolerance: Optional[float] = Field(default=None, gt=0)
    params: Dict[str, Any] = Field(default_factory=dict)


class AsymptoteConfig(BaseModel):
    z0: Optional[List[float]] = None
    band: float = Field(default=0.05, gt=0, lt=0.25)


class MonitorsConfig(BaseModel):
    sup_norm: bool = True
    region: Optional[RegionConfig] = None
    asymptote: Optional[AsymptoteConfig] = None
    keep_half_steps: bool = False


class FlowSettings(BaseModel):
    substeps_per_unit_time: int = Field(default=64, ge=1)
    blowup_threshold: float = Field(default=1e12, gt=0)


class RunConfig(BaseModel):
    grid: GridConfig
    kernels: List[KernelConfig] = Field(min_length=1)
    model: ModelConfig
    schedule: ScheduleConfig
    initial_condition: InitialConditionConfig
    monitors: MonitorsConfig = Field(default_factory=MonitorsConfig)
    flow: FlowSettings = Field(default_factory=FlowSettings)
    output_dir: Optional[str] = None
    seed: int = 0
    h_list: Optional[List[float]] = None
    base_dir: Optional[str] = Field(default=None, exclude=True)

    @field_validator("h_list")
    @classmethod
    def check_h_list(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and any(h <= 0 for h in value):
            raise ValueError("h_list entries must be positive")
        return value

    def kernel_specs(self) -> List[KernelSpec]:
        return [KernelSpec(sigma=k.sigma, beta=k.beta, dim=self.grid.dim) for k in self.kernels]

    def resolve_path(self, path: str) -> str:
        if os.path.isabs(path) or self.base_dir is None:
            return path
        return os.path.join(self.base_dir, path)


def load_run_config(path: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Read and validate a run document.

    Args:
        path: JSON file
        overrides: Top-level values replacing those of the document (seed, output_dir, h_list)

    Returns:
        RunConfig: Validated configuration; relative paths resolve against the document's directory
    """
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "r") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    document.update({k: v for k, v in (overrides or {}).items() if v is not None})
    document["base_dir"] = os.path.dirname(os.path.abspath(path))
    return parse_run_config(document)


def parse_run_config(document: Dict[str, Any]) -> RunConfig:
    try:
        config = RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"invalid run config: {e}") from e
    ic = config.initial_condition
    if ic.kind == "file" and not os.path.exists(config.resolve_path(ic.path)):
        raise ConfigError(f"initial condition file not found: {config.resolve_path(ic.path)}")
    logger.debug(f"loaded run config: model {config.model.variant}, grid {config.grid.points}")
    return config
