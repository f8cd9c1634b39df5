from typing import Dict, Any

# Default settings for the pointwise nonlinear flow
DEFAULT_FLOW_CONFIG = {
    "substeps_per_unit_time": 64,  # RK4 steps per unit of elapsed time
    "closed_form_atol": 1e-8,  # tolerance used by closed-form cross-checks
    "blowup_threshold": 1e12,  # any |component| above this aborts the flow
    "step_count_slack": 1e-9,  # absorbs round-off before ceil() on the step count
    "threads": 1,
}

# Default trait discretization for the population model
DEFAULT_POPULATION_CONFIG = {
    "trait_nodes": 32,
    "trait_interval": [0.0, 1.0],
}


def get_flow_config() -> Dict[str, Any]:
    """
    Get the flow configuration.

    Returns:
        Dict[str, Any]: Flow configuration
    """
    return DEFAULT_FLOW_CONFIG.copy()


def update_flow_config(new_config: Dict[str, Any]) -> Dict[str, Any]:
    """
    Merge new values into a copy of the flow configuration.

    Args:
        new_config: New configuration values to update

    Returns:
        Dict[str, Any]: Updated flow configuration
    """
    config = get_flow_config()
    config.update(new_config)
    return config


def get_population_config() -> Dict[str, Any]:
    return DEFAULT_POPULATION_CONFIG.copy()
