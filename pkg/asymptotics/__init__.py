"""
Boundary limits of 1-D solutions and their comparison with the reaction ODE.
"""

from .probe import AsymptoteProbe, boundary_limits, perturbation_radius, tail_mass_bound, track_asymptote

__all__ = ['AsymptoteProbe', 'boundary_limits', 'perturbation_radius', 'tail_mass_bound', 'track_asymptote']
