from typing import Dict, Any

# Default quadrature settings for the stable density and its masses
DEFAULT_KERNEL_CONFIG = {
    # Inner (Fourier inversion) quadrature
    "epsabs": 1e-14,
    "epsrel": 1e-12,
    "quad_limit": 1000,
    "cutoff_level": 1e-16,  # integrate while e^{-r^{2β}} >= cutoff_level
    "accuracy_tolerance": 1e-9,  # larger error estimates raise AccuracyError

    # Mass and tail evaluation
    "mass_radius_1d": 100.0,
    "mass_radius_nd": 60.0,
    "tail_series_terms": 3,
    "tail_asymptotic_radius": 20.0,  # above this radius the tail series replaces quadrature

    # Spectral application
    "imag_residue_warning": 1e-12,
    "fft_workers": 1,
    "multiplier_cache_size": 256,  # multipliers kept per process, least recently used evicted
}


def get_kernel_config() -> Dict[str, Any]:
    """
    Get the kernel configuration.

    Returns:
        Dict[str, Any]: Kernel configuration
    """
    return DEFAULT_KERNEL_CONFIG.copy()


def update_kernel_config(new_config: Dict[str, Any]) -> Dict[str, Any]:
    """
    Merge new values into a copy of the kernel configuration.

    Args:
        new_config: New configuration values to update

    Returns:
        Dict[str, Any]: Updated kernel configuration
    """
    config = get_kernel_config()
    config.update(new_config)
    return config
