"""
Run documents, initial data, artifacts on disk and the experiment drivers behind the CLI.
"""

from .config import RunConfig, load_run_config, parse_run_config
from .initial_conditions import build_initial_condition
from .serialization import read_snapshot, read_trajectory, write_snapshot, write_trajectory
from .runner import (
    build_problem,
    build_region,
    run_simulate,
    run_converge,
    run_kernel_table,
    run_audit,
    run_asymptote,
)

__all__ = [
    'RunConfig', 'load_run_config', 'parse_run_config', 'build_initial_condition',
    'read_snapshot', 'read_trajectory', 'write_snapshot', 'write_trajectory',
    'build_problem', 'build_region', 'run_simulate', 'run_converge', 'run_kernel_table',
    'run_audit', 'run_asymptote',
]
