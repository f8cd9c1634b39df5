"""
Constructors for the invariant-region families of the model suite.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy.integrate import simpson

from reactions.models import FitzHughNagumoModel, PopulationModel
from regions.config import get_region_config
from regions.families import BallFamily, IntervalFamily, PositiveMassBallFamily, RectangleFamily
from utils.errors import ParameterError

logger = logging.getLogger(__name__)

RateArg = Union[float, Callable[[np.ndarray], np.ndarray]]


def _sample(fn: RateArg, nodes: np.ndarray, name: str) -> np.ndarray:
    if callable(fn):
        values = np.broadcast_to(np.asarray(fn(nodes), dtype=float), nodes.shape)
    else:
        values = np.full(nodes.shape, float(fn))
    if not np.all(np.isfinite(values)):
        raise ParameterError(f"{name}(t) has non-finite samples")
    if np.any(values < 0):
        raise ParameterError(f"{name}(t) must be nonnegative, min sample {values.min():.6g}")
    return values


def ball_family_lambda(lambda0: float, a_fn: RateArg = 0.0, b_fn: RateArg = 0.0, t: float = 0.0,
                       nodes: Optional[int] = None) -> float:
    """
    Radius λ(t) = (λ0 + ∫_0^t a) · exp(∫_0^t b) of the ball family for
    |F(t, z)| <= a(t) + b(t)|z|.

    Both integrals use composite Simpson on `nodes` equispaced points of [0, t]
    (default from the region config, odd).

    Args:
        lambda0: Initial radius (>= 0)
        a_fn: Constant or vectorized callable a(t) >= 0
        b_fn: Constant or vectorized callable b(t) >= 0
        t: Time (>= 0)
        nodes: Simpson node count

    Returns:
        float: λ(t)
    """
    if lambda0 < 0:
        raise ParameterError(f"initial radius must be nonnegative, got {lambda0}")
    if t < 0:
        raise ParameterError(f"time must be nonnegative, got {t}")
    nodes = nodes or get_region_config()["simpson_nodes"]
    if nodes < 3 or nodes % 2 == 0:
        raise ParameterError(f"Simpson node count must be odd and >= 3, got {nodes}")
    grid = np.linspace(0.0, t, nodes)
    a_values = _sample(a_fn, grid, "a")
    b_values = _sample(b_fn, grid, "b")
    if t == 0:
        return float(lambda0)
    a_integral = float(simpson(a_values, x=grid))
    b_integral = float(simpson(b_values, x=grid))
    return float((lambda0 + a_integral) * np.exp(b_integral))


def ball_family(lambda0: float, a_fn: RateArg = 0.0, b_fn: RateArg = 0.0, center: Any = 0.0,
                tolerance: Optional[float] = None) -> BallFamily:
    """Increasing ball family centred at `center` with radius ball_family_lambda."""
    # validate the rates once up front
    ball_family_lambda(lambda0, a_fn, b_fn, 1.0)
    return BallFamily(
        radius=lambda t: ball_family_lambda(lambda0, a_fn, b_fn, t),
        center=center,
        tolerance=tolerance,
        increasing=True,
    )


def fisher_envelopes(a0: float, b0: float, chi: float, t: Any) -> Tuple[Any, Any]:
    """
    Logistic envelopes a(t), b(t) of the Fisher reaction χ z (1 - z).

    Both solve ż = χ z (1 - z) from a0 ∈ [0, 1] and b0 >= 1; a(t) increases to 1
    (a ≡ 0 when a0 = 0) and b(t) decreases to 1.

    Returns:
        Tuple: (a(t), b(t)) as floats for scalar t, arrays otherwise
    """
    if not chi > 0:
        raise ParameterError(f"fisher growth rate chi must be positive, got {chi}")
    if not 0 <= a0 <= 1:
        raise ParameterError(f"lower envelope start a0 must lie in [0, 1], got {a0}")
    if not b0 >= 1:
        raise ParameterError(f"upper envelope start b0 must be >= 1, got {b0}")
    decay = np.exp(-chi * np.asarray(t, dtype=float))
    lower = a0 / (a0 + (1 - a0) * decay)
    upper = b0 / (b0 + (1 - b0) * decay)
    if np.ndim(lower) == 0:
        return float(lower), float(upper)
    return lower, upper


def fisher_interval_family(a0: float, b0: float, chi: float,
                           tolerance: Optional[float] = None) -> IntervalFamily:
    fisher_envelopes(a0, b0, chi, 0.0)
    return IntervalFamily(
        lower=lambda t: fisher_envelopes(a0, b0, chi, t)[0],
        upper=lambda t: fisher_envelopes(a0, b0, chi, t)[1],
        tolerance=tolerance,
    )


@dataclass
class RectangleCertificate:
    """
    Outward normal components of the FHN field on the four rectangle faces.

    A face value is the maximum over sampled boundary points of the field
    component pointing out of the rectangle; all must be negative.
    """
    R1: float
    R2: float
    faces: Dict[str, float] = field(default_factory=dict)

    @property
    def worst_margin(self) -> float:
        return max(self.faces.values())

    @property
    def valid(self) -> bool:
        return self.worst_margin < 0

    def to_dict(self) -> Dict[str, Any]:
        return {"R1": self.R1, "R2": self.R2, "faces": dict(self.faces),
                "worst_margin": self.worst_margin, "valid": self.valid}


def _check_fhn(a: float, e: float, b: float) -> None:
    if not 0 < a < 1:
        raise ParameterError(f"fhn parameter a must lie in (0, 1), got {a}")
    if not e > 0:
        raise ParameterError(f"fhn parameter e must be positive, got {e}")
    if not b >= 0:
        raise ParameterError(f"fhn parameter b must be nonnegative, got {b}")


def fhn_certificate(a: float, e: float, b: float, R1: float, R2: float,
                    samples: Optional[int] = None) -> RectangleCertificate:
    """Sample the four faces of [-R1, R1] x [-R2, R2] and record the outward field components."""
    _check_fhn(a, e, b)
    samples = samples or get_region_config()["certificate_samples"]
    model = FitzHughNagumoModel(a=a, e=e, b=b)
    u_side = np.linspace(-R1, R1, samples)
    v_side = np.linspace(-R2, R2, samples)

    def field_on(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return model.evaluate(0.0, np.stack([u, v], axis=-1))

    right = field_on(np.full(samples, R1), v_side)[:, 0]
    left = -field_on(np.full(samples, -R1), v_side)[:, 0]
    top = field_on(u_side, np.full(samples, R2))[:, 1]
    bottom = -field_on(u_side, np.full(samples, -R2))[:, 1]
    return RectangleCertificate(
        R1=float(R1),
        R2=float(R2),
        faces={
            "u=+R1": float(right.max()),
            "u=-R1": float(left.max()),
            "v=+R2": float(top.max()),
            "v=-R2": float(bottom.max()),
        },
    )


def fhn_rectangle(a: float, e: float, b: float) -> Tuple[float, float, RectangleCertificate]:
    """
    Invariant rectangle of the FHN kinetics.

    R1 = max(4, √(2b)) + 1 and R2 is the midpoint of the admissible interval
    (b R1, R1³/2).

    Returns:
        Tuple[float, float, RectangleCertificate]: (R1, R2, certificate)
    """
    _check_fhn(a, e, b)
    R1 = max(4.0, float(np.sqrt(2 * b))) + 1.0
    low, high = b * R1, R1 ** 3 / 2
    assert low < high, f"empty admissible interval ({low}, {high}) for R2"
    R2 = (low + high) / 2
    certificate = fhn_certificate(a, e, b, R1, R2)
    if not certificate.valid:
        logger.warning(f"fhn rectangle certificate failed: {certificate.faces}")
    return R1, R2, certificate


def fhn_rectangle_family(a: float, e: float, b: float,
                         tolerance: Optional[float] = None) -> Tuple[RectangleFamily, RectangleCertificate]:
    R1, R2, certificate = fhn_rectangle(a, e, b)
    return RectangleFamily((R1, R2), tolerance=tolerance), certificate


def population_lambda(model: PopulationModel, u0_mass: float, t: float) -> float:
    """
    λ(t) = max(u0_mass, k₊(t)/c₋(t)) over the trait nodes and the kernel rows
    active on [0, t].
    """
    if not isinstance(model, PopulationModel):
        raise ParameterError(f"population_lambda needs a population model, got {type(model).__name__}")
    if np.any(model.competition <= 0):
        raise ParameterError("competition kernel C must be positive")
    if u0_mass < 0:
        raise ParameterError(f"initial mass must be nonnegative, got {u0_mass}")
    k_plus, c_minus = model.growth_bounds(t)
    return float(max(u0_mass, k_plus / c_minus))


def population_family(model: PopulationModel, u0_mass: float,
                      tolerance: Optional[float] = None) -> PositiveMassBallFamily:
    population_lambda(model, u0_mass, 0.0)
    return PositiveMassBallFamily(
        weights=model.weights,
        radius=lambda t: population_lambda(model, u0_mass, t),
        tolerance=tolerance,
        increasing=True,
    )
