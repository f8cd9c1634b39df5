from abc import ABC, abstractmethod
from dataclasses import replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from reactions.config import get_population_config
from utils.data_models import KernelSpec
from utils.errors import DataError, ParameterError


class ReactionModel(ABC):
    """
    Base class for reaction vector fields F(t, z) acting on state vectors.

    States are arrays whose last axis holds the state_dim components; every
    leading axis (grid points) is treated independently.
    """

    variant = "base"

    def __init__(self, state_dim: int, is_complex: bool = False, autonomous: bool = True):
        self.state_dim = int(state_dim)
        self.is_complex = bool(is_complex)
        self.autonomous = bool(autonomous)
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def evaluate(self, t: float, z: np.ndarray) -> np.ndarray:
        """
        Evaluate F(t, z).

        Args:
            t: Time
            z: State array of shape (..., state_dim)

        Returns:
            np.ndarray: F(t, z) with the shape of z
        """
        pass

    def parameters(self) -> Dict[str, Any]:
        """JSON-ready model parameters for run metadata."""
        return {}

    def component_kernels(self, specs: List[KernelSpec]) -> List[KernelSpec]:
        """Per-component kernels actually used for this model (one per state component)."""
        return specs

    def describe(self) -> Dict[str, Any]:
        return {
            "variant": self.variant,
            "state_dim": self.state_dim,
            "complex": self.is_complex,
            "autonomous": self.autonomous,
            "parameters": self.parameters(),
        }


class FisherModel(ReactionModel):
    """Fisher-KPP logistic reaction χ z (1 - z)."""

    variant = "fisher"

    def __init__(self, chi: float = 1.0):
        if not chi > 0:
            raise ParameterError(f"fisher growth rate chi must be positive, got {chi}")
        super().__init__(state_dim=1)
        self.chi = float(chi)

    def evaluate(self, t: float, z: np.ndarray) -> np.ndarray:
        return self.chi * z * (1 - z)

    def parameters(self) -> Dict[str, Any]:
        return {"chi": self.chi}


class GinzburgLandauModel(ReactionModel):
    """
    Complex Ginzburg-Landau reaction F(u) = f_R(|u|²) u + i f_I(|u|²) u.

    Without explicit callables, f_R(η) = 1 - η and f_I(η) = a - b η, which gives
    F(u) = (1 + i a) u - (1 + i b) |u|² u.
    """

    variant = "cgl"

    def __init__(
        self,
        a: float = 0.0,
        b: float = 0.0,
        f_real: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        f_imag: Optional[Callable[[np.ndarray], np.ndarray]] = None
    ):
        super().__init__(state_dim=1, is_complex=True)
        self.a = float(a)
        self.b = float(b)
        self.f_real = f_real or (lambda eta: 1 - eta)
        self.f_imag = f_imag or (lambda eta: self.a - self.b * eta)
        self.custom_nonlinearity = f_real is not None or f_imag is not None

    def evaluate(self, t: float, z: np.ndarray) -> np.ndarray:
        eta = np.abs(z) ** 2
        return self.f_real(eta) * z + 1j * self.f_imag(eta) * z

    def parameters(self) -> Dict[str, Any]:
        return {"a": self.a, "b": self.b, "custom_nonlinearity": self.custom_nonlinearity}


class FitzHughNagumoModel(ReactionModel):
    """
    FitzHugh-Nagumo kinetics F(u, v) = ((a - u)(u - 1)u - v, e(bu - v)).

    sigma_u and sigma_v, when given, replace the diffusion coefficient of the
    u and v kernels; β always comes from the kernels.
    """

    variant = "fhn"

    def __init__(self, a: float = 0.5, e: float = 1.0, b: float = 1.0,
                 sigma_u: Optional[float] = None, sigma_v: Optional[float] = None):
        if not (0 < a < 1):
            raise ParameterError(f"fhn parameter a must lie in (0, 1), got {a}")
        if not e > 0:
            raise ParameterError(f"fhn parameter e must be positive, got {e}")
        if not b >= 0:
            raise ParameterError(f"fhn parameter b must be nonnegative, got {b}")
        if any(s is not None and not s >= 0 for s in (sigma_u, sigma_v)):
            raise ParameterError("fhn diffusion coefficients must be nonnegative")
        super().__init__(state_dim=2)
        self.a = float(a)
        self.e = float(e)
        self.b = float(b)
        self.sigma_u = None if sigma_u is None else float(sigma_u)
        self.sigma_v = None if sigma_v is None else float(sigma_v)

    def evaluate(self, t: float, z: np.ndarray) -> np.ndarray:
        u = z[..., 0]
        v = z[..., 1]
        out = np.empty_like(z)
        out[..., 0] = (self.a - u) * (u - 1) * u - v
        out[..., 1] = self.e * (self.b * u - v)
        return out

    @property
    def diffusion(self) -> Tuple[Optional[float], Optional[float]]:
        return self.sigma_u, self.sigma_v

    def component_kernels(self, specs: List[KernelSpec]) -> List[KernelSpec]:
        return [spec if sigma is None else replace(spec, sigma=sigma)
                for spec, sigma in zip(specs, self.diffusion)]

    def parameters(self) -> Dict[str, Any]:
        return {"a": self.a, "e": self.e, "b": self.b,
                "sigma_u": self.sigma_u, "sigma_v": self.sigma_v}


class PopulationModel(ReactionModel):
    """
    Trait-structured population with selection k, mutation M and competition C
    on a discretized trait space (nodes θ_j, probability weights w_j):

        F_i = k_i z_i + Σ_j M_ij w_j z_j - (Σ_j C_ij w_j z_j) z_i

    Kernels are either constant or piecewise constant in time: with sample times
    t_0 < t_1 < ..., the table row with the largest t_s <= t is active.
    """

    variant = "population"

    def __init__(
        self,
        nodes: Sequence[float],
        weights: Sequence[float],
        growth: np.ndarray,
        mutation: np.ndarray,
        competition: np.ndarray,
        times: Optional[Sequence[float]] = None
    ):
        nodes = np.asarray(nodes, dtype=float)
        weights = np.asarray(weights, dtype=float)
        m = nodes.size
        if weights.shape != (m,):
            raise ParameterError(f"{weights.size} weights given for {m} trait nodes")
        if np.any(weights <= 0):
            raise ParameterError("trait weights must be positive")
        if abs(weights.sum() - 1) > 1e-12:
            raise ParameterError(f"trait weights must sum to 1, got {weights.sum()}")

        self.times = np.zeros(1) if times is None else np.asarray(times, dtype=float)
        n_times = self.times.size
        if np.any(np.diff(self.times) <= 0):
            raise ParameterError("population sample times must be strictly increasing")

        self.growth = self._as_table(growth, (m,), n_times, "k")
        self.mutation = self._as_table(mutation, (m, m), n_times, "M")
        self.competition = self._as_table(competition, (m, m), n_times, "C")
        if np.any(self.mutation < 0):
            raise ParameterError("mutation kernel M must be nonnegative")
        if np.any(self.competition <= 0):
            raise ParameterError("competition kernel C must be positive")

        super().__init__(state_dim=m, autonomous=(n_times == 1))
        self.nodes = nodes
        self.weights = weights

    @staticmethod
    def _as_table(values: Any, shape: Tuple[int, ...], n_times: int, name: str) -> np.ndarray:
        table = np.asarray(values, dtype=float)
        if table.ndim == 0:
            table = np.full(shape, float(table))
        if table.shape == shape:
            table = np.broadcast_to(table, (n_times,) + shape).copy()
        if table.shape != (n_times,) + shape:
            raise ParameterError(
                f"kernel {name} has shape {table.shape}, expected {shape} or {(n_times,) + shape}"
            )
        if not np.all(np.isfinite(table)):
            raise ParameterError(f"kernel {name} contains non-finite entries")
        return table

    @classmethod
    def uniform(cls, growth: Any, mutation: Any, competition: Any,
                n_nodes: Optional[int] = None, times: Optional[Sequence[float]] = None) -> "PopulationModel":
        """
        Build a model on uniform midpoint nodes of the configured trait interval.

        growth, mutation and competition may be arrays or callables of the nodes
        (k(θ), M(θ, ϑ), C(θ, ϑ)).
        """
        config = get_population_config()
        n_nodes = n_nodes or config["trait_nodes"]
        lo, hi = config["trait_interval"]
        nodes = lo + (np.arange(n_nodes) + 0.5) * (hi - lo) / n_nodes
        weights = np.full(n_nodes, 1.0 / n_nodes)
        theta, vartheta = np.meshgrid(nodes, nodes, indexing="ij")

        def resolve(kernel, *args):
            if callable(kernel):
                return np.broadcast_to(np.asarray(kernel(*args), dtype=float), args[0].shape)
            return kernel

        return cls(
            nodes=nodes,
            weights=weights,
            growth=resolve(growth, nodes),
            mutation=resolve(mutation, theta, vartheta),
            competition=resolve(competition, theta, vartheta),
            times=times,
        )

    def _row(self, t: float) -> int:
        return int(np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, self.times.size - 1))

    def evaluate(self, t: float, z: np.ndarray) -> np.ndarray:
        s = self._row(t)
        weighted = z * self.weights
        # einsum keeps a fixed summation order per output entry, whatever the batch size
        mutation = np.einsum("...j,ij->...i", weighted, self.mutation[s])
        competition = np.einsum("...j,ij->...i", weighted, self.competition[s])
        return self.growth[s] * z + mutation - competition * z

    def mass(self, z: np.ndarray) -> np.ndarray:
        """|z|_Z = Σ_j w_j |z_j| (discrete L¹(Θ, μ) norm)."""
        return np.sum(np.abs(z) * self.weights, axis=-1)

    def growth_bounds(self, t: float) -> Tuple[float, float]:
        """
        (k₊(t), c₋(t)): max of k(t', θ) + Σ_ϑ w_ϑ M(t', ϑ, θ) and min of C over
        the table rows active on [0, t] and all trait nodes.
        """
        last = self._row(t)
        rows = slice(0, last + 1)
        mutation_in = np.einsum("j,sji->si", self.weights, self.mutation[rows])
        k_plus = float(np.max(self.growth[rows] + mutation_in))
        c_minus = float(np.min(self.competition[rows]))
        return k_plus, c_minus

    def parameters(self) -> Dict[str, Any]:
        return {
            "trait_nodes": self.state_dim,
            "times": self.times.tolist(),
            "growth_range": [float(self.growth.min()), float(self.growth.max())],
            "mutation_range": [float(self.mutation.min()), float(self.mutation.max())],
            "competition_range": [float(self.competition.min()), float(self.competition.max())],
        }


class CustomModel(ReactionModel):
    """Wraps a user vector field func(t, z) -> F(t, z) with the same shape as z."""

    variant = "custom"

    def __init__(self, func: Callable[[float, np.ndarray], np.ndarray], state_dim: int = 1,
                 is_complex: bool = False, autonomous: bool = True, name: str = "custom"):
        super().__init__(state_dim=state_dim, is_complex=is_complex, autonomous=autonomous)
        self.func = func
        self.name = name

    def evaluate(self, t: float, z: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(t, z))

    def parameters(self) -> Dict[str, Any]:
        return {"name": self.name}


def evaluate_F(model: ReactionModel, t: float, z: Any) -> np.ndarray:
    """
    Evaluate the model's vector field at a state vector (or a stack of them).

    Args:
        model: Reaction model
        t: Time
        z: State of shape (state_dim,) or (..., state_dim); a scalar for 1-component models

    Returns:
        np.ndarray: F(t, z)
    """
    state = np.asarray(z)
    if model.state_dim == 1 and state.ndim == 0:
        state = state.reshape(1)
    if state.shape[-1:] != (model.state_dim,):
        raise DataError(
            f"state of shape {state.shape} does not match state dimension {model.state_dim}"
        )
    if not model.is_complex and np.iscomplexobj(state):
        raise DataError(f"{model.variant} model takes real states")
    if model.is_complex:
        state = state.astype(np.complex128)
    else:
        state = state.astype(np.float64)
    return model.evaluate(t, state)
