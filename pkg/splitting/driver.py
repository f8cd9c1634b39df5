"""
Lie–Trotter recursion

    V_{k+1} = S(h) U_k
    U_{k+1} = N(kh + h, kh + h/2, V_{k+1})

where N is the flow of the doubled field 2F. Monitors observe U_k at every t = kh.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from kernels.semigroup import apply_semigroup
from reactions.flow import FlowConfig, pointwise_flow
from reactions.models import ReactionModel
from splitting.schedule import SplitSchedule
from utils.data_models import Field, GridSpec, KernelSpec
from utils.errors import BlowUpError, DataError, ParameterError

logger = logging.getLogger(__name__)

SpecArg = Union[KernelSpec, Sequence[KernelSpec]]


@dataclass
class Trajectory:
    """Snapshots U_{h,k} at t = kh (k = 0..n), optional V_{h,k}, and monitor records."""
    grid: GridSpec
    schedule: SplitSchedule
    times: List[float] = field(default_factory=list)
    snapshots: List[Field] = field(default_factory=list)
    half_snapshots: List[Field] = field(default_factory=list)
    monitor_records: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    model: Dict[str, Any] = field(default_factory=dict)
    kernels: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def final(self) -> Field:
        return self.snapshots[-1]

    @property
    def complete(self) -> bool:
        return len(self.snapshots) == self.schedule.n + 1

    def monitor_frame(self, name: str) -> pd.DataFrame:
        return pd.DataFrame(self.monitor_records.get(name, []))


def _as_specs(spec: SpecArg, model: ReactionModel) -> List[KernelSpec]:
    specs = [spec] if isinstance(spec, KernelSpec) else list(spec)
    if len(specs) == 1:
        specs = specs * model.state_dim
    if len(specs) != model.state_dim:
        raise ParameterError(f"{len(specs)} kernel specs given for {model.state_dim} state components")
    return model.component_kernels(specs)


def lie_trotter_step(
    U_k: Field,
    k: int,
    sched: SplitSchedule,
    spec: SpecArg,
    model: ReactionModel,
    cfg: Optional[FlowConfig] = None,
    workers: Optional[int] = None
) -> Tuple[Field, Field]:
    """
    One splitting period: diffuse over h, then flow 2F over [kh + h/2, kh + h].

    Args:
        U_k: Field at t = kh
        k: Period index
        sched: Splitting schedule
        spec: Kernel spec, or one per state component
        model: Reaction model
        cfg: Flow settings
        workers: FFT worker threads

    Returns:
        Tuple[Field, Field]: (V_{k+1}, U_{k+1})
    """
    if not np.all(np.isfinite(U_k.values)):
        raise DataError(f"non-finite field entering step {k}")
    h = sched.h
    t_k = sched.time(k)
    V = apply_semigroup(U_k, _as_specs(spec, model), h, workers=workers)
    try:
        U = pointwise_flow(V, model, t_k + h / 2, t_k + h, factor=2, cfg=cfg)
    except BlowUpError as e:
        e.step = k
        raise
    return V, U


def simulate(
    u0: Field,
    model: ReactionModel,
    spec: SpecArg,
    sched: SplitSchedule,
    monitors: Optional[Sequence[Any]] = None,
    cfg: Optional[FlowConfig] = None,
    keep_half_steps: bool = False,
    progress: bool = False,
    workers: Optional[int] = None
) -> Trajectory:
    """
    Run n splitting periods from u0 and record monitors at every kh.

    Args:
        u0: Initial field
        model: Reaction model
        spec: Kernel spec, or one per state component
        sched: Splitting schedule
        monitors: Objects with .name and .observe(k, t, field) -> dict
        cfg: Flow settings
        keep_half_steps: Store V_{h,k} snapshots as well
        progress: Show a tqdm progress bar
        workers: FFT worker threads

    Returns:
        Trajectory: Snapshots and monitor series
    """
    if u0.state_dim != model.state_dim:
        raise DataError(f"initial field has {u0.state_dim} components, model expects {model.state_dim}")
    if model.is_complex and not u0.is_complex:
        u0 = Field(grid=u0.grid, values=u0.values.astype(np.complex128))
    specs = _as_specs(spec, model)
    cfg = cfg or FlowConfig()
    monitors = list(monitors or [])

    traj = Trajectory(
        grid=u0.grid,
        schedule=sched,
        model=model.describe(),
        kernels=[s.to_dict() for s in specs],
        monitor_records={m.name: [] for m in monitors},
    )

    def record(k: int, current: Field) -> None:
        t = sched.time(k)
        traj.times.append(t)
        traj.snapshots.append(current)
        for monitor in monitors:
            traj.monitor_records[monitor.name].append(monitor.observe(k, t, current))

    logger.info(
        f"simulating {model.variant} on grid {u0.grid.points}, h={sched.h:.6g}, n={sched.n}, T={sched.total_time:.6g}"
    )
    record(0, u0)
    U = u0
    for k in tqdm(range(sched.n), desc="lie-trotter", disable=not progress):
        try:
            V, U = lie_trotter_step(U, k, sched, specs, model, cfg, workers=workers)
        except BlowUpError as e:
            e.trajectory = traj
            logger.error(f"blow-up in step {k} at grid index {e.index}; returning partial trajectory")
            raise
        if keep_half_steps:
            traj.half_snapshots.append(V)
        record(k + 1, U)

    logger.info(f"simulation finished: sup norm {traj.final.sup_norm():.6g} at T={sched.total_time:.6g}")
    return traj
