"""
Experiment drivers behind the command-line subcommands.

Each run_* function takes a validated RunConfig (or kernel-table arguments),
performs the experiment and writes its artifacts into the output directory.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from asymptotics.probe import track_asymptote
from harness.config import RegionConfig, RunConfig
from harness.initial_conditions import build_initial_condition
from harness.serialization import read_trajectory, write_json, write_kernel_table, write_table, write_trajectory
from kernels.stable_density import heat_kernel_radial, radial_density, sphere_area, stable_tail_mass
from reactions.factory import build_model
from reactions.flow import FlowConfig
from reactions.models import (
    FisherModel,
    FitzHughNagumoModel,
    GinzburgLandauModel,
    PopulationModel,
    ReactionModel,
)
from regions.audit import AuditReport, audit_trajectory
from regions.builders import ball_family, fhn_rectangle_family, fisher_interval_family, population_family
from regions.families import IntervalFamily, RegionFamily
from splitting.convergence import self_convergence
from splitting.driver import Trajectory, simulate
from splitting.monitors import BoundaryMonitor, RegionMonitor, SupNormMonitor
from splitting.schedule import SplitSchedule
from utils.data_models import Field, GridSpec, KernelSpec
from utils.errors import BlowUpError, ConfigError, ParameterError, RegionViolationError

logger = logging.getLogger(__name__)


@dataclass
class Problem:
    """Everything a run needs, resolved from a RunConfig."""
    grid: GridSpec
    specs: List[KernelSpec]
    model: ReactionModel
    u0: Field
    schedule: SplitSchedule
    flow: FlowConfig


@dataclass
class RunResult:
    trajectory: Trajectory
    out_dir: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    audit: Optional[AuditReport] = None
    asymptote: Optional[pd.DataFrame] = None


def build_problem(config: RunConfig, threads: int = 1) -> Problem:
    grid = config.grid.to_grid_spec()
    model = build_model(config.model.variant, config.model.params, base_dir=config.base_dir)
    specs = config.kernel_specs()
    if len(specs) not in (1, model.state_dim):
        raise ConfigError(f"{len(specs)} kernels given for a {model.state_dim}-component {model.variant} model")
    try:
        specs = model.component_kernels(specs * model.state_dim if len(specs) == 1 else specs)
    except ParameterError as e:
        raise ConfigError(f"invalid kernels for {model.variant}: {e}") from e
    u0 = build_initial_condition(config.initial_condition, grid, model, seed=config.seed,
                                 base_dir=config.base_dir)
    flow = FlowConfig(
        substeps_per_unit_time=config.flow.substeps_per_unit_time,
        blowup_threshold=config.flow.blowup_threshold,
        threads=threads,
    )
    return Problem(grid=grid, specs=specs, model=model, u0=u0, schedule=config.schedule.to_schedule(), flow=flow)


def build_region(region_cfg: RegionConfig, problem: Problem) -> RegionFamily:
    """
    Region family for an audit. Parameters not given in region_cfg.params are
    derived from the model and the initial datum.
    """
    model, u0 = problem.model, problem.u0
    params = region_cfg.params
    kind = region_cfg.kind
    if kind == "auto":
        kind = {
            FisherModel: "fisher",
            GinzburgLandauModel: "ball",
            FitzHughNagumoModel: "fhn",
            PopulationModel: "population",
        }.get(type(model), "ball" if model.is_complex else "interval")

    try:
        if kind == "fisher":
            if not isinstance(model, FisherModel):
                raise ConfigError("fisher region needs the fisher model")
            a0 = params.get("a0", float(np.clip(u0.values.min(), 0.0, 1.0)))
            b0 = params.get("b0", max(1.0, float(u0.values.max())))
            return fisher_interval_family(a0, b0, model.chi, tolerance=region_cfg.tolerance)
        if kind == "ball":
            lambda0 = params.get("lambda0", max(1.0, u0.sup_norm()))
            return ball_family(lambda0, params.get("a", 0.0), params.get("b", 0.0),
                               center=params.get("center", 0.0), tolerance=region_cfg.tolerance)
        if kind == "fhn":
            if not isinstance(model, FitzHughNagumoModel):
                raise ConfigError("fhn region needs the fhn model")
            region, certificate = fhn_rectangle_family(model.a, model.e, model.b, tolerance=region_cfg.tolerance)
            logger.info(f"fhn rectangle certificate: {certificate.to_dict()}")
            return region
        if kind == "population":
            if not isinstance(model, PopulationModel):
                raise ConfigError("population region needs the population model")
            u0_mass = params.get("u0_mass", float(np.max(model.mass(u0.values))))
            return population_family(model, u0_mass, tolerance=region_cfg.tolerance)
        lower = params.get("lower", float(u0.values.min()))
        upper = params.get("upper", float(u0.values.max()))
        return IntervalFamily(lower, upper, tolerance=region_cfg.tolerance)
    except ParameterError as e:
        raise ConfigError(f"invalid {kind} region: {e}") from e


def _run_metadata(config: RunConfig) -> Dict[str, Any]:
    return {"seed": config.seed, "config": config.model_dump(mode="json", exclude={"output_dir", "base_dir"})}


def _simulate(config: RunConfig, problem: Problem, out_dir: Optional[str], threads: int,
              progress: bool) -> Tuple[Trajectory, Dict[str, Any], Optional[RegionFamily]]:
    monitors_cfg = config.monitors
    monitors: List[Any] = []
    if monitors_cfg.sup_norm:
        monitors.append(SupNormMonitor())
    region = None
    if monitors_cfg.region is not None:
        region = build_region(monitors_cfg.region, problem)
        monitors.append(RegionMonitor(region))
    if monitors_cfg.asymptote is not None:
        monitors.append(BoundaryMonitor(monitors_cfg.asymptote.band))

    try:
        traj = simulate(
            problem.u0, problem.model, problem.specs, problem.schedule,
            monitors=monitors, cfg=problem.flow, keep_half_steps=monitors_cfg.keep_half_steps,
            progress=progress, workers=threads,
        )
    except BlowUpError as e:
        if out_dir is not None and e.trajectory is not None:
            write_trajectory(e.trajectory, out_dir, extra={**_run_metadata(config), "blow_up": {
                "step": e.step, "index": list(e.index) if e.index is not None else None,
                "last_finite_time": e.last_finite_time,
            }})
        raise

    metadata: Dict[str, Any] = {}
    if out_dir is not None:
        metadata = write_trajectory(traj, out_dir, extra=_run_metadata(config))
    return traj, metadata, region


def _audit(traj: Trajectory, region: RegionFamily, out_dir: Optional[str], threads: int,
           fatal: bool) -> AuditReport:
    report = audit_trajectory(traj, region, threads=threads)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_json(os.path.join(out_dir, "audit.json"), report.to_dict())
    if fatal and not report.passed:
        failure = report.first_failure
        raise RegionViolationError(
            f"trajectory left the {region.variant} region at step {failure.step} "
            f"(margin {failure.worst_margin:.3e})",
            report=report,
        )
    return report


def _asymptote(config: RunConfig, problem: Problem, traj: Trajectory, out_dir: Optional[str]) -> pd.DataFrame:
    asymptote_cfg = config.monitors.asymptote
    z0 = asymptote_cfg.z0 if asymptote_cfg.z0 is not None else config.initial_condition.background
    try:
        series = track_asymptote(traj, problem.model, z0, cfg=problem.flow, spec=problem.specs,
                                 band=asymptote_cfg.band)
    except ParameterError as e:
        raise ConfigError(f"asymptote probe: {e}") from e
    if out_dir is not None:
        write_table(os.path.join(out_dir, "asymptote.csv"), series)
    return series


def run_simulate(config: RunConfig, out_dir: Optional[str] = None, threads: int = 1,
                 progress: bool = False) -> RunResult:
    """
    Simulate the configured problem and write its artifacts.

    Configured region and asymptote monitors are evaluated after the run;
    a failed audit raises RegionViolationError when the region is fatal.
    """
    out_dir = out_dir or config.output_dir
    problem = build_problem(config, threads)
    traj, metadata, region = _simulate(config, problem, out_dir, threads, progress)
    result = RunResult(trajectory=traj, out_dir=out_dir, metadata=metadata)
    if config.monitors.asymptote is not None:
        result.asymptote = _asymptote(config, problem, traj, out_dir)
    if region is not None:
        result.audit = _audit(traj, region, out_dir, threads, config.monitors.region.fatal)
    return result


def run_audit(config: RunConfig, out_dir: Optional[str] = None, threads: int = 1,
              trajectory_dir: Optional[str] = None, progress: bool = False) -> AuditReport:
    """
    Audit a trajectory against the configured (or automatic) region family.
    A violation is always fatal here.

    Args:
        config: Run configuration
        out_dir: Where audit.json (and a fresh trajectory) go
        threads: Worker threads
        trajectory_dir: Read an existing run from this directory instead of simulating
        progress: Show a progress bar while simulating
    """
    out_dir = out_dir or config.output_dir
    problem = build_problem(config, threads)
    region_cfg = config.monitors.region or RegionConfig()
    region = build_region(region_cfg, problem)
    if trajectory_dir is not None:
        traj = read_trajectory(trajectory_dir)
    else:
        traj, _, _ = _simulate(config, problem, out_dir, threads, progress)
    return _audit(traj, region, out_dir, threads, fatal=True)


def run_asymptote(config: RunConfig, out_dir: Optional[str] = None, threads: int = 1,
                  progress: bool = False) -> pd.DataFrame:
    out_dir = out_dir or config.output_dir
    if config.monitors.asymptote is None:
        raise ConfigError("asymptote run needs monitors.asymptote in the config")
    problem = build_problem(config, threads)
    if not problem.model.autonomous:
        raise ConfigError(f"asymptote probe needs an autonomous model, got {problem.model.variant}")
    traj, _, _ = _simulate(config, problem, out_dir, threads, progress)
    return _asymptote(config, problem, traj, out_dir)


def run_converge(config: RunConfig, h_list: Optional[Sequence[float]] = None, out_dir: Optional[str] = None,
                 threads: int = 1) -> pd.DataFrame:
    """
    Self-convergence table at T of the configured schedule, written to convergence.csv.

    Periods default to config.h_list, then to (h, h/2, h/4) of the schedule.
    """
    out_dir = out_dir or config.output_dir
    problem = build_problem(config, threads=1)
    h_values = list(h_list or config.h_list or [])
    if not h_values:
        h = problem.schedule.h
        h_values = [h, h / 2, h / 4]
    try:
        table = self_convergence(problem.u0, problem.model, problem.specs, problem.schedule.total_time,
                                 h_values, cfg=problem.flow, threads=threads)
    except ParameterError as e:
        raise ConfigError(f"invalid convergence study: {e}") from e
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_table(os.path.join(out_dir, "convergence.csv"), table)
    return table


def run_kernel_table(beta: float, sigma: float, dim: int, t: float, x_range: Tuple[float, float],
                     samples: int, out_path: Optional[str] = None) -> pd.DataFrame:
    """
    Tabulate g_β and G_{σ,β}(t, ·) on `samples` equispaced points.

    In d = 1 the points are signed coordinates; in d >= 2 they are radii >= 0.
    table.attrs["mass"] holds the trapezoid mass of each column over the table
    range plus the exact tail beyond it; write_kernel_table emits it as the
    footer row (x = "mass").
    """
    if samples < 2:
        raise ParameterError(f"kernel table needs at least two samples, got {samples}")
    x_min, x_max = map(float, x_range)
    if not x_min < x_max:
        raise ParameterError(f"empty kernel table range [{x_min}, {x_max}]")
    if dim > 1 and x_min < 0:
        raise ParameterError("radial kernel tables need nonnegative radii")
    spec = KernelSpec(sigma=sigma, beta=beta, dim=dim)
    x = np.linspace(x_min, x_max, samples)
    g = radial_density(beta, dim, np.abs(x))
    G = heat_kernel_radial(spec, t, np.abs(x))
    scale = (sigma * t) ** (1 / (2 * beta))

    def below(edge: float, unit: float) -> float:
        # P(X < edge) for the symmetric 1-D law of scale unit
        half_tail = stable_tail_mass(beta, 1, abs(edge) / unit) / 2
        return half_tail if edge <= 0 else 1 - half_tail

    def mass(values: np.ndarray, unit: float) -> float:
        if dim == 1:
            inner = trapezoid(values, x)
            return float(inner + below(x_min, unit) + below(-x_max, unit))
        inner = trapezoid(sphere_area(dim) * x ** (dim - 1) * values, x)
        return float(inner + stable_tail_mass(beta, dim, x_max / unit))

    table = pd.DataFrame({"x": x, "g_beta": g, "G": G})
    table.attrs["mass"] = {"g_beta": mass(g, 1.0), "G": mass(G, scale)}
    logger.info(f"kernel table beta={beta} d={dim}: mass g={table.attrs['mass']['g_beta']:.12f}, "
                f"G={table.attrs['mass']['G']:.12f}")
    if out_path is not None:
        directory = os.path.dirname(out_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        write_kernel_table(out_path, table)
    return table
