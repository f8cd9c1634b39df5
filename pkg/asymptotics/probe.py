"""
Spatial boundary limits of 1-D solutions.

On a constant background z0 with a compactly supported perturbation, the
values far from the perturbation follow the reaction ODE ż = F(z) from z0.
The probe compares the outer bands of each snapshot with that ODE solution.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from asymptotics.config import get_asymptote_config
from kernels.stable_density import stable_tail_mass
from reactions.flow import FlowConfig, nonlinear_flow
from reactions.models import ReactionModel
from utils.data_models import Field, GridSpec, KernelSpec
from utils.errors import DataError, ParameterError

logger = logging.getLogger(__name__)


def _band_size(grid: GridSpec, band: Optional[float]) -> int:
    config = get_asymptote_config()
    band = config["band"] if band is None else band
    if not 0 < band < config["max_band"]:
        raise ParameterError(f"band fraction must lie in (0, {config['max_band']}), got {band}")
    if grid.dim != 1:
        raise ParameterError(f"boundary limits are defined on 1-D grids only, got dimension {grid.dim}")
    return max(1, int(round(band * grid.points[0])))


def boundary_limits(field: Field, band: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Left and right boundary-limit estimates of a 1-D field.

    Args:
        field: 1-D field
        band: Fraction of grid points averaged at each end

    Returns:
        Tuple[np.ndarray, np.ndarray]: Mean state over the leftmost and rightmost bands
    """
    size = _band_size(field.grid, band)
    values = field.values
    return values[:size].mean(axis=0), values[-size:].mean(axis=0)


def perturbation_radius(u0: Field, z0: Any, band: Optional[float] = None) -> float:
    """
    Distance from the support of u0 - z0 to the nearest band point.

    Returns 0 when the perturbation reaches a band and inf when u0 ≡ z0.
    """
    size = _band_size(u0.grid, band)
    z0 = np.atleast_1d(np.asarray(z0))
    deviation = np.sqrt(np.sum(np.abs(u0.values - z0) ** 2, axis=-1))
    support = np.flatnonzero(deviation > get_asymptote_config()["support_atol"])
    if support.size == 0:
        return float("inf")
    x = u0.grid.axis(0)
    n = x.size
    if support.min() < size or support.max() >= n - size:
        return 0.0
    left_edge = x[size - 1]
    right_edge = x[n - size]
    return float(min(x[support].min() - left_edge, right_edge - x[support].max()))


def tail_mass_bound(spec: KernelSpec, t: float, radius: float, amplitude: float) -> float:
    """
    amplitude · ∫_{|y| > radius} G_{σ,β}(t, y) dy: the diffusive leakage of a
    perturbation of the given sup amplitude over the given distance by time t.
    """
    if t <= 0 or spec.sigma == 0 or np.isinf(radius) or amplitude == 0:
        return 0.0
    scale = (spec.sigma * t) ** (1 / (2 * spec.beta))
    return float(amplitude * stable_tail_mass(spec.beta, 1, radius / scale))


def _kernel_specs(traj: Any, spec: Optional[Any]) -> List[KernelSpec]:
    if spec is None:
        return [KernelSpec(**k) for k in traj.kernels]
    if isinstance(spec, KernelSpec):
        return [spec]
    return list(spec)


def track_asymptote(
    traj: Any,
    model: ReactionModel,
    z0: Any,
    cfg: Optional[FlowConfig] = None,
    spec: Optional[Any] = None,
    band: Optional[float] = None
) -> pd.DataFrame:
    """
    Band deviations of every snapshot from the ODE solution z(t) started at z0.

    Args:
        traj: 1-D trajectory whose u0 equals z0 outside a compact set
        model: Autonomous reaction model
        z0: Background state
        cfg: Flow settings of the ODE oracle
        spec: Kernel spec(s) for the tail-mass bound; taken from the trajectory when None
        band: Band fraction

    Returns:
        pd.DataFrame: time, ode_value_<j>, band_mean_dev, band_max_dev, tail_mass_bound
    """
    if not model.autonomous:
        raise ParameterError(f"{model.variant} model is not autonomous; boundary limits need F = F(z)")
    size = _band_size(traj.grid, band)
    z0 = np.atleast_1d(np.asarray(z0, dtype=np.complex128 if model.is_complex else np.float64))
    if z0.shape != (model.state_dim,):
        raise DataError(f"background state of shape {z0.shape} for a {model.state_dim}-component model")
    cfg = cfg or FlowConfig()
    specs = _kernel_specs(traj, spec)

    u0 = traj.snapshots[0]
    radius = perturbation_radius(u0, z0, band)
    amplitude = float(np.max(np.sqrt(np.sum(np.abs(u0.values - z0) ** 2, axis=-1))))
    logger.info(f"tracking boundary limits of {model.variant}: band {size} points, perturbation radius {radius:.6g}")

    rows: List[Dict[str, Any]] = []
    for t, snapshot in zip(traj.times, traj.snapshots):
        z_t = nonlinear_flow(model, 0.0, t, z0, factor=1, cfg=cfg)
        bands = np.concatenate([snapshot.values[:size], snapshot.values[-size:]])
        left, right = boundary_limits(snapshot, band)
        point_dev = np.sqrt(np.sum(np.abs(bands - z_t) ** 2, axis=-1))
        mean_dev = max(np.linalg.norm(left - z_t), np.linalg.norm(right - z_t))
        row: Dict[str, Any] = {"time": t}
        for j, value in enumerate(z_t):
            if model.is_complex:
                row[f"ode_value_{j}_re"] = float(value.real)
                row[f"ode_value_{j}_im"] = float(value.imag)
            else:
                row[f"ode_value_{j}"] = float(value)
        row["band_mean_dev"] = float(mean_dev)
        row["band_max_dev"] = float(point_dev.max())
        row["tail_mass_bound"] = max(tail_mass_bound(s, t, radius, amplitude) for s in specs)
        rows.append(row)

    series = pd.DataFrame(rows)
    logger.info(f"max band deviation {series['band_max_dev'].max():.3e}")
    return series


@dataclass
class AsymptoteProbe:
    """Background state and band of a boundary-limit study, with its deviation series once run."""
    z0: Sequence[float]
    band: float = field(default_factory=lambda: get_asymptote_config()["band"])
    series: Optional[pd.DataFrame] = None

    def __post_init__(self):
        config = get_asymptote_config()
        if not 0 < self.band < config["max_band"]:
            raise ParameterError(f"band fraction must lie in (0, {config['max_band']}), got {self.band}")

    def run(self, traj: Any, model: ReactionModel, cfg: Optional[FlowConfig] = None,
            spec: Optional[Any] = None) -> pd.DataFrame:
        self.series = track_asymptote(traj, model, self.z0, cfg=cfg, spec=spec, band=self.band)
        return self.series

    @property
    def max_deviation(self) -> float:
        if self.series is None:
            raise DataError("asymptote probe has not been run")
        return float(self.series["band_max_dev"].max())
