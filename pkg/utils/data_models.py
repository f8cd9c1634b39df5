from dataclasses import dataclass, field
from typing import Dict, Any, Tuple, Sequence, Union

import numpy as np

from utils.errors import DataError, ParameterError


@dataclass(frozen=True)
class KernelSpec:
    """Diffusion parameters of the fractional semigroup: σ, β and the spatial dimension."""
    sigma: float
    beta: float
    dim: int = 1

    def __post_init__(self):
        # sigma = 0 is allowed: it degenerates S(t) to the identity
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ParameterError(f"sigma must be a nonnegative finite number, got {self.sigma}")
        if not (0 < self.beta <= 1):
            raise ParameterError(f"beta must lie in (0, 1], got {self.beta}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ParameterError(f"dim must be a positive integer, got {self.dim}")

    def to_dict(self) -> Dict[str, Any]:
        return {"sigma": self.sigma, "beta": self.beta, "dim": self.dim}


@dataclass(frozen=True)
class GridSpec:
    """
    Origin-centered periodic box with side extent[i] and points[i] samples per axis.

    Samples sit at x_j = -L/2 + j*L/N, j = 0..N-1.
    """
    extent: Tuple[float, ...]
    points: Tuple[int, ...]

    def __post_init__(self):
        extent = tuple(float(e) for e in np.atleast_1d(self.extent))
        points = tuple(int(p) for p in np.atleast_1d(self.points))
        if len(extent) != len(points):
            raise ParameterError(f"extent and points disagree on dimension: {extent} vs {points}")
        if any(e <= 0 for e in extent):
            raise ParameterError(f"extent must be positive on every axis, got {extent}")
        if any(p <= 0 or p % 2 for p in points):
            raise ParameterError(f"points must be positive and even on every axis, got {points}")
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "points", points)

    @classmethod
    def uniform(cls, extent: float, points: int, dim: int = 1) -> "GridSpec":
        return cls(extent=(extent,) * dim, points=(points,) * dim)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(e / n for e, n in zip(self.extent, self.points))

    def axis(self, i: int) -> np.ndarray:
        """Sample coordinates along axis i."""
        n = self.points[i]
        return -self.extent[i] / 2 + np.arange(n) * (self.extent[i] / n)

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Coordinate arrays of the full grid (ij indexing)."""
        return tuple(np.meshgrid(*[self.axis(i) for i in range(self.dim)], indexing="ij"))

    def wavenumbers(self, i: int) -> np.ndarray:
        """Angular wavenumbers 2πk/L of axis i in FFT order."""
        n = self.points[i]
        return 2 * np.pi * np.fft.fftfreq(n, d=self.extent[i] / n)

    def to_dict(self) -> Dict[str, Any]:
        return {"extent": list(self.extent), "points": list(self.points)}


@dataclass
class Field:
    """
    Samples of u on a periodic grid. values has shape grid.shape + (state_dim,).
    """
    grid: GridSpec
    values: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape[:-1] != self.grid.shape:
            if values.shape == self.grid.shape:
                values = values[..., np.newaxis]
            else:
                raise DataError(
                    f"field of shape {values.shape} does not match grid shape {self.grid.shape}"
                )
        if not np.all(np.isfinite(values)):
            raise DataError("field contains non-finite values")
        if not np.iscomplexobj(values):
            values = values.astype(np.float64, copy=False)
        else:
            values = values.astype(np.complex128, copy=False)
        self.values = values

    @property
    def state_dim(self) -> int:
        return self.values.shape[-1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def sup_norm(self) -> float:
        """max over grid points of the Euclidean norm of the state vector."""
        return float(np.max(np.sqrt(np.sum(np.abs(self.values) ** 2, axis=-1))))

    def component(self, j: int) -> np.ndarray:
        return self.values[..., j]

    def copy(self) -> "Field":
        return Field(grid=self.grid, values=self.values.copy(), metadata=dict(self.metadata))

    @classmethod
    def constant(cls, grid: GridSpec, value: Union[float, complex, Sequence[float]]) -> "Field":
        state = np.atleast_1d(np.asarray(value))
        values = np.broadcast_to(state, grid.shape + state.shape).copy()
        return cls(grid=grid, values=values)
