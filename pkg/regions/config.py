from typing import Dict, Any

# Default settings for invariant-region checks
DEFAULT_REGION_CONFIG = {
    "tolerance": 1e-6,  # absolute slack on membership margins
    "nonnegativity_slack": 1e-9,  # allowed undershoot of z_j >= 0
    "simpson_nodes": 1025,  # nodes of the composite Simpson rule for ball radii
    "certificate_samples": 201,  # boundary samples per rectangle face
}


def get_region_config() -> Dict[str, Any]:
    """
    Get the region configuration.

    Returns:
        Dict[str, Any]: Region configuration
    """
    return DEFAULT_REGION_CONFIG.copy()
