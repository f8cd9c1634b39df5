import logging
import os
from typing import Any, Optional

import numpy as np

from harness.config import InitialConditionConfig
from harness.serialization import read_snapshot
from reactions.models import ReactionModel
from utils.data_models import Field, GridSpec
from utils.errors import ConfigError, DataError

logger = logging.getLogger(__name__)


def _per_component(value: Any, state_dim: int, name: str) -> np.ndarray:
    array = np.atleast_1d(np.asarray(value, dtype=float))
    if array.size == 1:
        return np.full(state_dim, float(array[0]))
    if array.size != state_dim:
        raise ConfigError(f"{name} has {array.size} entries for {state_dim} state components")
    return array


def smooth_bump(r: np.ndarray) -> np.ndarray:
    """exp(1 - 1/(1 - r²)) on |r| < 1, zero elsewhere; peak value 1 at r = 0."""
    out = np.zeros_like(r, dtype=float)
    inside = np.abs(r) < 1
    out[inside] = np.exp(1 - 1 / (1 - r[inside] ** 2))
    return out


def random_smooth_profile(grid: GridSpec, rng: np.random.Generator, modes: int) -> np.ndarray:
    """
    Real periodic field built from Fourier modes |k_i| <= modes with random
    amplitudes and phases, rescaled onto [0, 1].
    """
    coords = grid.coordinates()
    profile = np.zeros(grid.shape)
    for axis, x in enumerate(coords):
        L = grid.extent[axis]
        for k in range(1, modes + 1):
            amplitude = rng.normal() / k
            phase = rng.uniform(0, 2 * np.pi)
            profile += amplitude * np.cos(2 * np.pi * k * x / L + phase)
    span = profile.max() - profile.min()
    if span == 0:
        return np.zeros(grid.shape)
    return (profile - profile.min()) / span


def build_initial_condition(cfg: InitialConditionConfig, grid: GridSpec, model: ReactionModel,
                            seed: int = 0, base_dir: Optional[str] = None) -> Field:
    """
    Sample the configured initial datum on the grid.

    Args:
        cfg: Initial condition descriptor
        grid: Grid
        model: Reaction model (fixes the state dimension and real/complex values)
        seed: Seed of the numpy Generator used by the random kinds
        base_dir: Directory that a relative file path refers to

    Returns:
        Field: u0
    """
    m = model.state_dim
    rng = np.random.default_rng(seed)
    background = _per_component(cfg.background, m, "background")
    if model.is_complex:
        background = background + 1j * _per_component(cfg.background_imag, m, "background_imag")
    amplitude = _per_component(cfg.amplitude, m, "amplitude")
    coords = grid.coordinates()

    if cfg.kind == "constant":
        shape = np.ones(grid.shape)
        values = background * shape[..., None]
    elif cfg.kind == "cosine":
        shape = np.ones(grid.shape)
        for axis, x in enumerate(coords):
            shape = shape * np.cos(2 * np.pi * cfg.mode * x / grid.extent[axis])
        values = background + amplitude * shape[..., None]
    elif cfg.kind == "logistic_front":
        front = 1 / (1 + np.exp(cfg.slope * (coords[0] - cfg.center)))
        values = np.repeat(front[..., None], m, axis=-1)
    elif cfg.kind == "bump":
        r = np.sqrt(sum((x - cfg.center) ** 2 for x in coords)) / cfg.width
        values = background + amplitude * smooth_bump(r)[..., None]
    elif cfg.kind == "random_smooth":
        components = [cfg.low + (cfg.high - cfg.low) * random_smooth_profile(grid, rng, cfg.modes)
                      for _ in range(m)]
        values = np.stack(components, axis=-1)
    elif cfg.kind == "random_phase":
        if not model.is_complex:
            raise ConfigError(f"random_phase needs a complex model, got {model.variant}")
        phase = 2 * np.pi * random_smooth_profile(grid, rng, cfg.modes)
        values = amplitude * np.exp(1j * phase)[..., None]
    elif cfg.kind == "file":
        path = cfg.path if base_dir is None or os.path.isabs(cfg.path) else os.path.join(base_dir, cfg.path)
        if path.endswith(".npy"):
            values = np.load(path)
        else:
            values = read_snapshot(path, grid, m, model.is_complex).values
    else:
        raise ConfigError(f"unknown initial condition kind {cfg.kind!r}")

    if model.is_complex:
        values = np.asarray(values, dtype=np.complex128)
    try:
        u0 = Field(grid=grid, values=values)
    except DataError as e:
        raise ConfigError(f"initial condition {cfg.kind}: {e}") from e
    if u0.state_dim != m:
        raise ConfigError(f"initial condition has {u0.state_dim} components, model expects {m}")
    logger.info(f"initial condition {cfg.kind}: sup norm {u0.sup_norm():.6g}")
    return u0
