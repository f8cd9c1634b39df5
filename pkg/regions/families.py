"""
Time-indexed closed convex sets K(t) with numerical membership.

Every family reports a signed margin per state (negative outside) and a
membership test with an absolute tolerance on that margin.
"""

from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from regions.config import get_region_config
from utils.errors import DataError, ParameterError

RadiusArg = Union[float, Callable[[float], float]]


def _as_function(value: RadiusArg) -> Callable[[float], float]:
    if callable(value):
        return value
    constant = float(value)
    return lambda t: constant


class RegionFamily(ABC):
    """
    Base class for region families K(t).

    increasing means K(t') ⊆ K(t) whenever t' <= t.
    """

    variant = "base"

    def __init__(self, tolerance: Optional[float] = None, increasing: bool = False):
        self.tolerance = get_region_config()["tolerance"] if tolerance is None else float(tolerance)
        self.increasing = increasing

    @abstractmethod
    def margins(self, t: float, z: np.ndarray) -> np.ndarray:
        """
        Signed membership margins.

        Args:
            t: Time
            z: States of shape (..., state_dim)

        Returns:
            np.ndarray: Margins of shape z.shape[:-1], negative outside K(t)
        """
        pass

    def inside(self, t: float, z: np.ndarray) -> np.ndarray:
        return self.margins(t, z) >= -self.tolerance

    def describe(self) -> Dict[str, Any]:
        return {"variant": self.variant, "tolerance": self.tolerance, "increasing": self.increasing}


class BallFamily(RegionFamily):
    """Closed balls |z - center| <= λ(t) (Euclidean / complex modulus)."""

    variant = "ball"

    def __init__(self, radius: RadiusArg, center: Any = 0.0, tolerance: Optional[float] = None,
                 increasing: bool = False):
        super().__init__(tolerance, increasing)
        self.radius = _as_function(radius)
        self.center = np.atleast_1d(np.asarray(center))

    def margins(self, t: float, z: np.ndarray) -> np.ndarray:
        radius = float(self.radius(t))
        if radius < 0:
            raise ParameterError(f"ball radius must be nonnegative, got {radius} at t={t}")
        distance = np.sqrt(np.sum(np.abs(np.asarray(z) - self.center) ** 2, axis=-1))
        return radius - distance

    def describe(self) -> Dict[str, Any]:
        info = super().describe()
        info["center"] = [complex(c).real if np.isreal(c) else str(c) for c in self.center]
        return info


class IntervalFamily(RegionFamily):
    """Componentwise intervals a(t) <= z_j <= b(t)."""

    variant = "interval"

    def __init__(self, lower: RadiusArg, upper: RadiusArg, tolerance: Optional[float] = None,
                 increasing: bool = False):
        super().__init__(tolerance, increasing)
        self.lower = _as_function(lower)
        self.upper = _as_function(upper)

    def bounds(self, t: float) -> Tuple[float, float]:
        a, b = float(self.lower(t)), float(self.upper(t))
        if a > b:
            raise ParameterError(f"interval family has a(t) = {a} > b(t) = {b} at t={t}")
        return a, b

    def margins(self, t: float, z: np.ndarray) -> np.ndarray:
        a, b = self.bounds(t)
        z = np.asarray(z)
        if np.iscomplexobj(z):
            raise DataError("interval families take real states")
        return np.min(np.minimum(z - a, b - z), axis=-1)


class RectangleFamily(RegionFamily):
    """Constant product of symmetric intervals |z_j| <= R_j."""

    variant = "rectangle"

    def __init__(self, bounds: Sequence[float], tolerance: Optional[float] = None):
        super().__init__(tolerance, increasing=True)
        self.bounds = np.asarray(bounds, dtype=float)
        if np.any(self.bounds <= 0):
            raise ParameterError(f"rectangle half-widths must be positive, got {self.bounds}")

    def margins(self, t: float, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z)
        if z.shape[-1] != self.bounds.size:
            raise DataError(f"state of dimension {z.shape[-1]} against a {self.bounds.size}-d rectangle")
        return np.min(self.bounds - np.abs(z), axis=-1)

    def describe(self) -> Dict[str, Any]:
        info = super().describe()
        info["bounds"] = self.bounds.tolist()
        return info


class PositiveMassBallFamily(RegionFamily):
    """
    {z : z_j >= 0, Σ_j w_j z_j <= λ(t)} on a weighted trait discretization.

    The margin is min(λ(t) - Σ_j w_j |z_j|, min_j z_j); membership allows the
    mass part the region tolerance and the sign part the nonnegativity slack.
    """

    variant = "positive-mass-ball"

    def __init__(self, weights: Sequence[float], radius: RadiusArg, tolerance: Optional[float] = None,
                 nonnegativity_slack: Optional[float] = None, increasing: bool = True):
        super().__init__(tolerance, increasing)
        self.weights = np.asarray(weights, dtype=float)
        self.radius = _as_function(radius)
        config = get_region_config()
        self.nonnegativity_slack = (
            config["nonnegativity_slack"] if nonnegativity_slack is None else float(nonnegativity_slack)
        )

    def _parts(self, t: float, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        z = np.asarray(z)
        if z.shape[-1] != self.weights.size:
            raise DataError(f"state of dimension {z.shape[-1]} against {self.weights.size} trait weights")
        mass_margin = float(self.radius(t)) - np.sum(np.abs(z) * self.weights, axis=-1)
        sign_margin = np.min(np.real(z), axis=-1)
        return mass_margin, sign_margin

    def margins(self, t: float, z: np.ndarray) -> np.ndarray:
        mass_margin, sign_margin = self._parts(t, z)
        return np.minimum(mass_margin, sign_margin)

    def inside(self, t: float, z: np.ndarray) -> np.ndarray:
        mass_margin, sign_margin = self._parts(t, z)
        return (mass_margin >= -self.tolerance) & (sign_margin >= -self.nonnegativity_slack)


def contains(region: RegionFamily, t: float, z: Any) -> Tuple[bool, float]:
    """
    Membership of a single state vector in K(t).

    Args:
        region: Region family
        t: Time
        z: State vector (scalar allowed for one-component states)

    Returns:
        Tuple[bool, float]: (inside within tolerance, signed margin)
    """
    state = np.atleast_1d(np.asarray(z))
    margin = float(region.margins(t, state))
    return bool(region.inside(t, state)), margin
