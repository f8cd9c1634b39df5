import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from reactions.flow import FlowConfig
from reactions.models import ReactionModel
from splitting.driver import SpecArg, simulate
from splitting.schedule import SplitSchedule
from utils.data_models import Field
from utils.errors import ParameterError

logger = logging.getLogger(__name__)

REFERENCE_REFINEMENT = 4


def _final_values(u0: Field, model: ReactionModel, spec: SpecArg, total_time: float, h: float,
                  cfg: Optional[FlowConfig], workers: Optional[int]) -> np.ndarray:
    sched = SplitSchedule.from_total_time(total_time, h)
    return simulate(u0, model, spec, sched, cfg=cfg, workers=workers).final.values


def self_convergence(
    u0: Field,
    model: ReactionModel,
    spec: SpecArg,
    total_time: float,
    h_list: Sequence[float],
    cfg: Optional[FlowConfig] = None,
    threads: int = 1,
    workers: Optional[int] = None
) -> pd.DataFrame:
    """
    Self-convergence study of the splitting at time T against a run with
    h_ref = min(h_list) / 4.

    Columns:
        h: Splitting period
        sup_error: max over the grid of |U_h(T) - U_ref(T)|
        order_estimate: log₂-type ratio of successive errors, log(e_{i-1}/e_i)/log(h_{i-1}/h_i)
        difference_order: same ratio applied to successive error differences, which
            cancels the common reference error (needs three periods)

    Args:
        u0: Initial field
        model: Reaction model
        spec: Kernel spec(s)
        total_time: Final time T
        h_list: Decreasing periods, at least three, each dividing T
        cfg: Flow settings
        threads: Runs executed concurrently (results do not depend on it)
        workers: FFT worker threads

    Returns:
        pd.DataFrame: Convergence table
    """
    h_values = [float(h) for h in h_list]
    if len(h_values) < 3:
        raise ParameterError(f"self-convergence needs at least three periods, got {len(h_values)}")
    if any(b >= a for a, b in zip(h_values, h_values[1:])):
        raise ParameterError(f"periods must be strictly decreasing, got {h_values}")
    for h in h_values:
        SplitSchedule.from_total_time(total_time, h)

    h_ref = min(h_values) / REFERENCE_REFINEMENT
    runs = h_values + [h_ref]
    logger.info(f"self-convergence of {model.variant}: h={h_values}, reference h={h_ref:.6g}, T={total_time}")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            finals = list(pool.map(
                lambda h: _final_values(u0, model, spec, total_time, h, cfg, workers), runs
            ))
    else:
        finals = [_final_values(u0, model, spec, total_time, h, cfg, workers) for h in runs]

    reference = finals[-1]
    errors = [float(np.max(np.abs(values - reference))) for values in finals[:-1]]

    orders = [np.nan]
    for i in range(1, len(errors)):
        if errors[i] > 0 and errors[i - 1] > 0:
            orders.append(float(np.log(errors[i - 1] / errors[i]) / np.log(h_values[i - 1] / h_values[i])))
        else:
            orders.append(np.nan)

    difference_orders = [np.nan, np.nan]
    for i in range(2, len(errors)):
        d_prev = errors[i - 2] - errors[i - 1]
        d_next = errors[i - 1] - errors[i]
        if d_prev > 0 and d_next > 0:
            difference_orders.append(float(np.log(d_prev / d_next) / np.log(h_values[i - 1] / h_values[i])))
        else:
            difference_orders.append(np.nan)

    table = pd.DataFrame({
        "h": h_values,
        "sup_error": errors,
        "order_estimate": orders,
        "difference_order": difference_orders[:len(errors)],
    })
    logger.info(f"convergence table:\n{table.to_string(index=False)}")
    return table
