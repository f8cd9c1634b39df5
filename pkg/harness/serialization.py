"""
On-disk artifacts of a run.

Snapshots are raw little-endian float64, row-major over the grid and then the
state components; complex states store (re, im) pairs in place of each value.
metadata.json names every file and records grid, model, kernels and schedule.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional, TextIO, Union

import numpy as np
import pandas as pd

from splitting.driver import Trajectory
from splitting.schedule import SplitSchedule
from utils.data_models import Field, GridSpec
from utils.errors import DataError

logger = logging.getLogger(__name__)

SNAPSHOT_DTYPE = "<f8"
FLOAT_FORMAT = "%.17g"
METADATA_FILE = "metadata.json"


def write_snapshot(path: str, field: Field) -> None:
    values = np.ascontiguousarray(field.values)
    if field.is_complex:
        data = values.astype("<c16").view(SNAPSHOT_DTYPE)
    else:
        data = values.astype(SNAPSHOT_DTYPE)
    data.tofile(path)


def read_snapshot(path: str, grid: GridSpec, state_dim: int, is_complex: bool = False) -> Field:
    """Read a snapshot written by write_snapshot back into a Field."""
    data = np.fromfile(path, dtype=SNAPSHOT_DTYPE)
    expected = grid.size * state_dim * (2 if is_complex else 1)
    if data.size != expected:
        raise DataError(f"snapshot {path} holds {data.size} values, expected {expected}")
    if is_complex:
        data = data.view("<c16")
    values = data.astype(np.complex128 if is_complex else np.float64).reshape(grid.shape + (state_dim,))
    return Field(grid=grid, values=values)


def write_json(path: str, document: Dict[str, Any]) -> None:
    with open(path, "w") as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write("\n")


def write_table(path: str, table: pd.DataFrame) -> None:
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_kernel_table(target: Union[str, TextIO], table: pd.DataFrame) -> None:
    """Write a kernel table followed by its "mass" footer row; target is a path or an open text stream."""
    if isinstance(target, str):
        with open(target, "w", newline="") as f:
            write_kernel_table(f, table)
        return
    table.to_csv(target, index=False, float_format=FLOAT_FORMAT)
    mass = table.attrs.get("mass")
    if mass is not None:
        target.write(",".join(["mass"] + [FLOAT_FORMAT % mass[column] for column in table.columns[1:]]) + "\n")


def write_trajectory(traj: Trajectory, out_dir: str, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Write snapshots, monitor CSVs and metadata.json.

    Args:
        traj: Trajectory (possibly partial after a blow-up)
        out_dir: Output directory, created if missing
        extra: Additional metadata entries (seed, run config)

    Returns:
        Dict[str, Any]: The metadata document
    """
    os.makedirs(out_dir, exist_ok=True)
    is_complex = bool(traj.snapshots and traj.snapshots[0].is_complex)
    state_dim = traj.snapshots[0].state_dim if traj.snapshots else 0

    snapshots: List[Dict[str, Any]] = []
    for k, (t, snapshot) in enumerate(zip(traj.times, traj.snapshots)):
        name = f"u_{k:06d}.bin"
        write_snapshot(os.path.join(out_dir, name), snapshot)
        snapshots.append({"step": k, "time": t, "file": name})

    half_snapshots: List[Dict[str, Any]] = []
    for k, snapshot in enumerate(traj.half_snapshots, start=1):
        name = f"v_{k:06d}.bin"
        write_snapshot(os.path.join(out_dir, name), snapshot)
        half_snapshots.append({"step": k, "file": name})

    monitors: Dict[str, str] = {}
    for name in traj.monitor_records:
        filename = f"monitor_{name}.csv"
        write_table(os.path.join(out_dir, filename), traj.monitor_frame(name))
        monitors[name] = filename

    metadata = {
        "grid": traj.grid.to_dict(),
        "schedule": traj.schedule.to_dict(),
        "model": traj.model,
        "kernels": traj.kernels,
        "state_dim": state_dim,
        "complex": is_complex,
        "dtype": SNAPSHOT_DTYPE,
        "layout": "row-major over grid, then state components" + (", (re, im) pairs" if is_complex else ""),
        "complete": traj.complete,
        "snapshots": snapshots,
        "half_snapshots": half_snapshots,
        "monitors": monitors,
    }
    metadata.update(extra or {})
    write_json(os.path.join(out_dir, METADATA_FILE), metadata)
    logger.info(f"wrote {len(snapshots)} snapshots to {out_dir}")
    return metadata


def read_trajectory(out_dir: str) -> Trajectory:
    """Rebuild a Trajectory (snapshots and monitor records) from a run directory."""
    path = os.path.join(out_dir, METADATA_FILE)
    if not os.path.exists(path):
        raise DataError(f"no {METADATA_FILE} in {out_dir}")
    with open(path, "r") as f:
        metadata = json.load(f)

    grid = GridSpec(extent=tuple(metadata["grid"]["extent"]), points=tuple(metadata["grid"]["points"]))
    schedule = SplitSchedule(h=metadata["schedule"]["h"], n=metadata["schedule"]["n"])
    state_dim, is_complex = metadata["state_dim"], metadata["complex"]

    traj = Trajectory(grid=grid, schedule=schedule, model=metadata["model"], kernels=metadata["kernels"])
    for entry in metadata["snapshots"]:
        traj.times.append(entry["time"])
        traj.snapshots.append(read_snapshot(os.path.join(out_dir, entry["file"]), grid, state_dim, is_complex))
    for entry in metadata.get("half_snapshots", []):
        traj.half_snapshots.append(
            read_snapshot(os.path.join(out_dir, entry["file"]), grid, state_dim, is_complex)
        )
    for name, filename in metadata.get("monitors", {}).items():
        frame = pd.read_csv(os.path.join(out_dir, filename))
        traj.monitor_records[name] = frame.to_dict(orient="records")
    return traj
