"""
Spectral realization of the contraction semigroup S(t)u = G_{σ,β}(·, t) * u on a periodic grid.
"""

import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.fft

from kernels.config import get_kernel_config
from utils.data_models import Field, GridSpec, KernelSpec
from utils.errors import DataError, ParameterError

logger = logging.getLogger(__name__)

SpecArg = Union[KernelSpec, Sequence[KernelSpec]]


@dataclass(frozen=True)
class SpectralMultiplier:
    """
    Per-mode factors exp(-t σ|ξ|^{2β}), held as the symbol σ|ξ|^{2β} and the time t.

    Two multipliers over the same symbol compose by adding their times, so
    compose(m(t), m(t')) and m(t + t') are the same representation.
    """
    symbol: np.ndarray
    t: float

    @property
    def factors(self) -> np.ndarray:
        if self.t == 0:
            return np.ones_like(self.symbol)
        return np.exp(-self.t * self.symbol)

    def compose(self, other: "SpectralMultiplier") -> "SpectralMultiplier":
        if self.symbol is not other.symbol and not np.array_equal(self.symbol, other.symbol):
            raise ParameterError("cannot compose multipliers built on different symbols")
        return SpectralMultiplier(symbol=self.symbol, t=self.t + other.t)


class MultiplierCache:
    """
    Cache of symbols and multipliers keyed by (σ, β, grid, t).

    Symbols are kept for every (σ, β, grid); multipliers are evicted least
    recently used once more than max_multipliers of them are held.
    """

    def __init__(self, max_multipliers: Optional[int] = None):
        self.max_multipliers = max_multipliers or get_kernel_config()["multiplier_cache_size"]
        self._symbols: Dict[Tuple, np.ndarray] = {}
        self._multipliers: "OrderedDict[Tuple, SpectralMultiplier]" = OrderedDict()
        self._lock = threading.Lock()

    def symbol(self, spec: KernelSpec, grid: GridSpec) -> np.ndarray:
        key = (spec.sigma, spec.beta, grid.extent, grid.points)
        cached = self._symbols.get(key)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._symbols.get(key)
            if cached is None:
                cached = _build_symbol(spec, grid)
                self._symbols[key] = cached
        return cached

    def multiplier(self, spec: KernelSpec, grid: GridSpec, t: float) -> SpectralMultiplier:
        key = (spec.sigma, spec.beta, grid.extent, grid.points, float(t))
        symbol = self.symbol(spec, grid)
        with self._lock:
            cached = self._multipliers.get(key)
            if cached is None:
                cached = SpectralMultiplier(symbol=symbol, t=float(t))
                self._multipliers[key] = cached
                while len(self._multipliers) > self.max_multipliers:
                    self._multipliers.popitem(last=False)
            else:
                self._multipliers.move_to_end(key)
        return cached

    def __len__(self) -> int:
        return len(self._multipliers)

    def clear(self) -> None:
        with self._lock:
            self._symbols.clear()
            self._multipliers.clear()


_cache = MultiplierCache()


def _build_symbol(spec: KernelSpec, grid: GridSpec) -> np.ndarray:
    if spec.dim != grid.dim:
        raise ParameterError(f"kernel dimension {spec.dim} does not match grid dimension {grid.dim}")
    axes = np.meshgrid(*[grid.wavenumbers(i) for i in range(grid.dim)], indexing="ij")
    xi_squared = sum(axis ** 2 for axis in axes)
    symbol = spec.sigma * xi_squared ** spec.beta
    symbol.setflags(write=False)
    return symbol


def semigroup_multiplier(spec: KernelSpec, grid: GridSpec, t: float) -> SpectralMultiplier:
    """
    Fourier multiplier of S(t) on the grid.

    Args:
        spec: Kernel parameters
        grid: Periodic grid
        t: Time, t >= 0

    Returns:
        SpectralMultiplier: exp(-σ t |ξ|^{2β}) per mode (all ones for t = 0)
    """
    if not t >= 0:
        raise ParameterError(f"semigroup time must be nonnegative, got {t}")
    return _cache.multiplier(spec, grid, t)


def _component_specs(spec: SpecArg, state_dim: int) -> Sequence[KernelSpec]:
    if isinstance(spec, KernelSpec):
        return [spec] * state_dim
    specs = list(spec)
    if len(specs) == 1:
        return specs * state_dim
    if len(specs) != state_dim:
        raise ParameterError(f"{len(specs)} kernel specs given for {state_dim} state components")
    return specs


def apply_multipliers(field: Field, multipliers: Sequence[SpectralMultiplier],
                      workers: Optional[int] = None) -> Field:
    """Apply one multiplier per state component in Fourier space."""
    config = get_kernel_config()
    workers = workers or config["fft_workers"]
    axes = tuple(range(field.grid.dim))
    values = field.values
    out = np.empty_like(values)

    # Components sharing a multiplier are transformed together
    groups: Dict[int, list] = {}
    for j, multiplier in enumerate(multipliers):
        groups.setdefault(id(multiplier), []).append(j)

    for indices in groups.values():
        multiplier = multipliers[indices[0]]
        if multiplier.t == 0:
            out[..., indices] = values[..., indices]
            continue
        block = values[..., indices]
        spectrum = scipy.fft.fftn(block, axes=axes, workers=workers)
        spectrum *= multiplier.factors[..., np.newaxis]
        result = scipy.fft.ifftn(spectrum, axes=axes, workers=workers)
        if field.is_complex:
            out[..., indices] = result
        else:
            residue = float(np.max(np.abs(result.imag))) if result.size else 0.0
            if residue > config["imag_residue_warning"] * max(1.0, float(np.max(np.abs(block)))):
                logger.warning(f"discarding imaginary residue {residue:.3e} from a real field")
            out[..., indices] = result.real
    return Field(grid=field.grid, values=out, metadata=dict(field.metadata))


def apply_semigroup(field: Field, spec: SpecArg, t: float, workers: Optional[int] = None) -> Field:
    """
    Apply S(t) componentwise: forward transform, multiply, inverse transform.

    Args:
        field: Field to diffuse
        spec: One kernel spec, or one per state component (product-space form)
        t: Time, t >= 0
        workers: FFT worker threads (speed only)

    Returns:
        Field: S(t) field, real whenever the input is real
    """
    if not t >= 0:
        raise ParameterError(f"semigroup time must be nonnegative, got {t}")
    if not np.all(np.isfinite(field.values)):
        raise DataError("cannot diffuse a field with non-finite values")
    specs = _component_specs(spec, field.state_dim)
    if t == 0 or all(s.sigma == 0 for s in specs):
        return field.copy()
    multipliers = [semigroup_multiplier(s, field.grid, t) for s in specs]
    return apply_multipliers(field, multipliers, workers=workers)


def clear_multiplier_cache() -> None:
    _cache.clear()
