import importlib
import logging
import os
from typing import Any, Callable, Dict, Optional

import numpy as np
import pandas as pd

from reactions.models import (
    CustomModel,
    FisherModel,
    FitzHughNagumoModel,
    GinzburgLandauModel,
    PopulationModel,
    ReactionModel,
)
from utils.errors import ConfigError, ParameterError

logger = logging.getLogger(__name__)


def _zero_field(rate: float = 0.0) -> Callable[[float, np.ndarray], np.ndarray]:
    return lambda t, z: np.zeros_like(z)


def _linear_field(rate: float = 1.0) -> Callable[[float, np.ndarray], np.ndarray]:
    return lambda t, z: -rate * z


# Named custom vector fields usable from run documents
CUSTOM_FIELDS: Dict[str, Callable[..., Callable[[float, np.ndarray], np.ndarray]]] = {
    "zero": _zero_field,
    "linear": _linear_field,
}


def load_callable(path: str) -> Callable:
    """
    Import an attribute given as "package.module:attribute".

    Args:
        path: Import path

    Returns:
        Callable: The imported object
    """
    module_name, _, attribute = path.partition(":")
    if not module_name or not attribute:
        raise ConfigError(f"custom callable must look like 'module:attribute', got {path!r}")
    try:
        module = importlib.import_module(module_name)
        return getattr(module, attribute)
    except (ImportError, AttributeError) as e:
        raise ConfigError(f"cannot import custom callable {path!r}: {e}") from e


def load_kernel_table(source: Any, base_dir: Optional[str] = None) -> np.ndarray:
    """
    Resolve a population kernel given inline (nested lists / numbers) or as a CSV path.

    CSV files hold one row per trait node (k: one column; M, C: one column per node)
    and no header. A time-dependent table stacks the per-time blocks vertically.
    """
    if isinstance(source, str):
        path = source if base_dir is None or os.path.isabs(source) else os.path.join(base_dir, source)
        if not os.path.exists(path):
            raise ConfigError(f"kernel table not found: {path}")
        return pd.read_csv(path, header=None).to_numpy(dtype=float)
    return np.asarray(source, dtype=float)


def _population_from_params(params: Dict[str, Any], base_dir: Optional[str]) -> PopulationModel:
    times = params.get("times")
    n_times = 1 if times is None else len(times)
    n_nodes = params.get("trait_nodes")

    growth = load_kernel_table(params.get("growth", 1.0), base_dir)
    mutation = load_kernel_table(params.get("mutation", 0.0), base_dir)
    competition = load_kernel_table(params.get("competition", 1.0), base_dir)

    if "nodes" in params or "weights" in params:
        nodes = np.asarray(params["nodes"], dtype=float)
        weights = np.asarray(params.get("weights", np.full(nodes.size, 1.0 / nodes.size)), dtype=float)
        m = nodes.size
    else:
        model = PopulationModel.uniform(1.0, 0.0, 1.0, n_nodes=n_nodes)
        nodes, weights, m = model.nodes, model.weights, model.state_dim

    def shaped(table: np.ndarray, per_time: tuple) -> np.ndarray:
        if table.ndim == 0:
            return np.full(per_time, float(table))
        if n_times > 1 and table.shape != (n_times,) + per_time:
            return table.reshape((n_times,) + per_time)
        if table.shape == (m, 1) or table.shape == (1, m):
            return table.reshape(m)
        return table

    return PopulationModel(
        nodes=nodes,
        weights=weights,
        growth=shaped(growth, (m,)),
        mutation=shaped(mutation, (m, m)),
        competition=shaped(competition, (m, m)),
        times=times,
    )


def build_model(variant: str, params: Optional[Dict[str, Any]] = None,
                base_dir: Optional[str] = None) -> ReactionModel:
    """
    Create a reaction model from its variant tag and parameters.

    Args:
        variant: fisher | cgl | fhn | population | custom
        params: Variant parameters
        base_dir: Directory that relative kernel-table paths refer to

    Returns:
        ReactionModel: The model instance
    """
    params = dict(params or {})
    try:
        if variant == "fisher":
            return FisherModel(chi=params.get("chi", 1.0))
        if variant == "cgl":
            f_real = params.get("f_real")
            f_imag = params.get("f_imag")
            return GinzburgLandauModel(
                a=params.get("a", 0.0),
                b=params.get("b", 0.0),
                f_real=load_callable(f_real) if isinstance(f_real, str) else f_real,
                f_imag=load_callable(f_imag) if isinstance(f_imag, str) else f_imag,
            )
        if variant == "fhn":
            return FitzHughNagumoModel(
                a=params.get("a", 0.5),
                e=params.get("e", 1.0),
                b=params.get("b", 1.0),
                sigma_u=params.get("sigma_u"),
                sigma_v=params.get("sigma_v"),
            )
        if variant == "population":
            return _population_from_params(params, base_dir)
        if variant == "custom":
            name = params.get("name", "zero")
            if name in CUSTOM_FIELDS:
                func = CUSTOM_FIELDS[name](**params.get("options", {}))
            else:
                func = load_callable(name)
            return CustomModel(
                func,
                state_dim=params.get("state_dim", 1),
                is_complex=params.get("complex", False),
                autonomous=params.get("autonomous", True),
                name=name,
            )
    except ParameterError as e:
        raise ConfigError(f"invalid {variant} parameters: {e}") from e
    raise ConfigError(f"unknown model variant {variant!r}")
