import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from regions.families import RegionFamily
from utils.data_models import Field
from utils.errors import DataError

logger = logging.getLogger(__name__)


@dataclass
class SnapshotAudit:
    step: int
    time: float
    worst_margin: float
    worst_point_index: List[int]
    passed: bool


@dataclass
class AuditReport:
    """Per-snapshot worst margins of a trajectory against a region family."""
    region: Dict[str, Any]
    snapshots: List[SnapshotAudit] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.snapshots)

    @property
    def worst_margin(self) -> float:
        return min(s.worst_margin for s in self.snapshots)

    @property
    def first_failure(self) -> Optional[SnapshotAudit]:
        return next((s for s in self.snapshots if not s.passed), None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "region": self.region,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "snapshots": [
                {"step": s.step, "time": s.time, "worst_margin": s.worst_margin,
                 "worst_point_index": s.worst_point_index, "pass": s.passed}
                for s in self.snapshots
            ],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(s) for s in self.snapshots])


def audit_field(region: RegionFamily, step: int, t: float, snapshot: Field) -> SnapshotAudit:
    margins = region.margins(t, snapshot.values)
    if margins.shape != snapshot.grid.shape:
        raise DataError(f"region margins of shape {margins.shape} on a grid of shape {snapshot.grid.shape}")
    flat = int(np.argmin(margins))
    index = [int(i) for i in np.unravel_index(flat, margins.shape)]
    return SnapshotAudit(
        step=step,
        time=float(t),
        worst_margin=float(margins.reshape(-1)[flat]),
        worst_point_index=index,
        passed=bool(np.all(region.inside(t, snapshot.values))),
    )


def audit_trajectory(traj: Any, region: RegionFamily, threads: int = 1) -> AuditReport:
    """
    Check every snapshot U_{h,k} of a trajectory against K(kh).

    Monotonicity of the family is not required; autonomous invariant families
    such as the Fisher interval are audited as given.

    Args:
        traj: Trajectory with .times and .snapshots
        region: Region family
        threads: Snapshots audited concurrently (order of the report is fixed)

    Returns:
        AuditReport: Pass iff every margin is within tolerance at every snapshot
    """
    jobs = list(zip(range(len(traj.snapshots)), traj.times, traj.snapshots))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(lambda job: audit_field(region, *job), jobs))
    else:
        entries = [audit_field(region, *job) for job in jobs]

    report = AuditReport(region=region.describe(), snapshots=entries)
    failure = report.first_failure
    if failure is not None:
        logger.warning(
            f"{region.variant} region violated at step {failure.step} (t={failure.time:.6g}): "
            f"margin {failure.worst_margin:.3e} at {failure.worst_point_index}"
        )
    else:
        logger.info(f"{region.variant} region audit passed, worst margin {report.worst_margin:.3e}")
    return report
