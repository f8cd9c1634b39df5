"""
Fixed-step RK4 integration of ż = factor · F(t, z), pointwise over fields.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from reactions.config import get_flow_config
from reactions.models import ReactionModel, evaluate_F
from utils.data_models import Field
from utils.errors import BlowUpError, DataError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowConfig:
    """
    RK4 resolution and safeguards of the nonlinear flow.

    The step count follows elapsed time, ceil(elapsed · substeps_per_unit_time).
    The doubled flow over [t + h/2, t + h] therefore takes half the steps of the
    plain flow over [t, t + h], each twice as long in flow time, and the two agree
    only to the RK4 error of that coarser step. Keep substeps_per_unit_time · h
    large enough for the accuracy the splitting period needs.
    """
    substeps_per_unit_time: int = field(default_factory=lambda: get_flow_config()["substeps_per_unit_time"])
    atol: float = field(default_factory=lambda: get_flow_config()["closed_form_atol"])
    blowup_threshold: float = field(default_factory=lambda: get_flow_config()["blowup_threshold"])
    threads: int = field(default_factory=lambda: get_flow_config()["threads"])

    def __post_init__(self):
        if int(self.substeps_per_unit_time) != self.substeps_per_unit_time or self.substeps_per_unit_time < 1:
            raise ParameterError(
                f"substeps_per_unit_time must be a positive integer, got {self.substeps_per_unit_time}"
            )
        if self.threads < 1:
            raise ParameterError(f"threads must be positive, got {self.threads}")

    def step_count(self, elapsed: float) -> int:
        slack = get_flow_config()["step_count_slack"]
        return max(1, math.ceil(elapsed * self.substeps_per_unit_time - slack))


def _check_bounded(state: np.ndarray, threshold: float) -> Optional[int]:
    magnitude = np.abs(state)
    bad = ~np.isfinite(magnitude) | (magnitude > threshold)
    if np.any(bad):
        return int(np.flatnonzero(bad.reshape(-1))[0])
    return None


def _rk4(model: ReactionModel, t0: float, t1: float, z0: np.ndarray, factor: float,
         cfg: FlowConfig) -> np.ndarray:
    """RK4 on a stack of states; raises BlowUpError with the flat offending entry."""
    n = cfg.step_count(t1 - t0)
    dt = (t1 - t0) / n
    z = z0
    t = t0
    for i in range(n):
        k1 = model.evaluate(t, z)
        k2 = model.evaluate(t + dt / 2, z + (dt / 2 * factor) * k1)
        k3 = model.evaluate(t + dt / 2, z + (dt / 2 * factor) * k2)
        k4 = model.evaluate(t + dt, z + (dt * factor) * k3)
        z_next = z + (dt * factor / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        bad = _check_bounded(z_next, cfg.blowup_threshold)
        if bad is not None:
            raise BlowUpError(
                f"nonlinear flow blew up after t={t:.6g}",
                last_finite_time=t,
                index=np.unravel_index(bad, z_next.shape),
            )
        z = z_next
        t = t0 + (i + 1) * dt
    return z


def _validate_flow(t0: float, t1: float, factor: float) -> None:
    if not t1 >= t0:
        raise ParameterError(f"flow end time {t1} precedes start time {t0}")
    if factor not in (1, 2):
        raise ParameterError(f"flow factor must be 1 or 2, got {factor}")


def nonlinear_flow(model: ReactionModel, t0: float, t1: float, z0: Any, factor: int = 1,
                   cfg: Optional[FlowConfig] = None) -> np.ndarray:
    """
    Integrate ż = factor · F(t, z) from z(t0) = z0 to t1 with classical RK4.

    Args:
        model: Reaction model
        t0: Start time
        t1: End time, t1 >= t0
        z0: Initial state vector
        factor: 1 for the flow of F, 2 for the doubled flow
        cfg: Flow settings

    Returns:
        np.ndarray: z(t1)
    """
    cfg = cfg or FlowConfig()
    _validate_flow(t0, t1, factor)
    state = np.array(z0, dtype=np.complex128 if model.is_complex else np.float64)
    if model.state_dim == 1 and state.ndim == 0:
        state = state.reshape(1)
    if not np.all(np.isfinite(state)):
        raise DataError("initial state contains non-finite values")
    evaluate_F(model, t0, state)  # dimension check
    if t1 == t0:
        return state
    try:
        return _rk4(model, t0, t1, state, factor, cfg)
    except BlowUpError as e:
        logger.error(f"{model.variant} flow blew up on [{t0}, {t1}]: last finite time {e.last_finite_time}")
        e.index = None
        raise


def pointwise_flow(field: Field, model: ReactionModel, t0: float, t1: float, factor: int = 1,
                   cfg: Optional[FlowConfig] = None) -> Field:
    """
    Apply the nonlinear flow at every grid point independently (superposition action).

    Args:
        field: Field of states
        model: Reaction model
        t0: Start time
        t1: End time
        factor: 1 or 2
        cfg: Flow settings; cfg.threads > 1 splits the grid across threads

    Returns:
        Field: Flowed field
    """
    cfg = cfg or FlowConfig()
    _validate_flow(t0, t1, factor)
    if field.state_dim != model.state_dim:
        raise DataError(
            f"field has {field.state_dim} components, model {model.variant} expects {model.state_dim}"
        )
    dtype = np.complex128 if model.is_complex else np.float64
    flat = field.values.reshape(-1, field.state_dim).astype(dtype)
    if t1 == t0:
        return Field(grid=field.grid, values=flat.reshape(field.values.shape), metadata=dict(field.metadata))

    chunks = np.array_split(np.arange(flat.shape[0]), min(cfg.threads, flat.shape[0]))
    out = np.empty_like(flat)

    def run(rows: np.ndarray) -> None:
        try:
            out[rows] = _rk4(model, t0, t1, flat[rows], factor, cfg)
        except BlowUpError as e:
            point = int(rows[e.index[0]])
            e.index = tuple(int(i) for i in np.unravel_index(point, field.grid.shape))
            raise

    try:
        if len(chunks) == 1:
            run(chunks[0])
        else:
            with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
                for future in [pool.submit(run, rows) for rows in chunks]:
                    future.result()
    except BlowUpError as e:
        logger.error(f"pointwise flow blew up at grid index {e.index}, last finite time {e.last_finite_time}")
        raise

    return Field(grid=field.grid, values=out.reshape(field.values.shape), metadata=dict(field.metadata))
