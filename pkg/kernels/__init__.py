"""
Fractional heat kernels: stable densities g_β, scaled kernels G_{σ,β} and the
spectral semigroup S(t) on periodic grids.
"""

from .stable_density import (
    stable_density,
    radial_density,
    heat_kernel,
    heat_kernel_radial,
    stable_mass,
    stable_tail_mass,
)
from .semigroup import SpectralMultiplier, semigroup_multiplier, apply_semigroup

__all__ = [
    'stable_density', 'radial_density', 'heat_kernel', 'heat_kernel_radial',
    'stable_mass', 'stable_tail_mass',
    'SpectralMultiplier', 'semigroup_multiplier', 'apply_semigroup',
]
