"""
Reaction vector fields of the model suite and their pointwise nonlinear flows.
"""

from .models import (
    ReactionModel,
    FisherModel,
    GinzburgLandauModel,
    FitzHughNagumoModel,
    PopulationModel,
    CustomModel,
    evaluate_F,
)
from .factory import build_model
from .flow import FlowConfig, nonlinear_flow, pointwise_flow

__all__ = [
    'ReactionModel', 'FisherModel', 'GinzburgLandauModel', 'FitzHughNagumoModel',
    'PopulationModel', 'CustomModel', 'evaluate_F', 'build_model',
    'FlowConfig', 'nonlinear_flow', 'pointwise_flow',
]
