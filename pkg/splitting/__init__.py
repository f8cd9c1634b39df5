"""
Lie–Trotter splitting driver: α_h/τ_h schedule, splitting steps, full simulations
and self-convergence studies.
"""

from .schedule import SplitSchedule, alpha_h, tau_h, propagator_multiplier
from .driver import Trajectory, lie_trotter_step, simulate
from .convergence import self_convergence

__all__ = [
    'SplitSchedule', 'alpha_h', 'tau_h', 'propagator_multiplier',
    'Trajectory', 'lie_trotter_step', 'simulate', 'self_convergence',
]
