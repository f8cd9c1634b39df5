from typing import Dict, Any

# Default settings for boundary-limit estimation
DEFAULT_ASYMPTOTE_CONFIG = {
    "band": 0.05,  # fraction of grid points averaged at each end
    "max_band": 0.25,  # exclusive upper limit of the band fraction
    "support_atol": 0.0,  # |u0 - z0| above this counts as perturbation support
}


def get_asymptote_config() -> Dict[str, Any]:
    """
    Get the asymptote probe configuration.

    Returns:
        Dict[str, Any]: Asymptote configuration
    """
    return DEFAULT_ASYMPTOTE_CONFIG.copy()
