"""
On/off schedule of the split linear term.

α_h(t) = 2 on the first half of every period [kh, kh + h) and 0 on the second half;
τ_h(t, t') = ∫_{t'}^{t} α_h is the intrinsic time seen by the linear semigroup, so the
two-parameter propagator is S_h(t, t') = S(τ_h(t, t')).
"""

import math
from dataclasses import dataclass
from typing import Dict, Any

from kernels.semigroup import SpectralMultiplier, semigroup_multiplier
from utils.data_models import GridSpec, KernelSpec
from utils.errors import ParameterError


def _check_period(h: float) -> None:
    if not h > 0:
        raise ParameterError(f"splitting period h must be positive, got {h}")


def alpha_h(h: float, t: float) -> int:
    """2 if frac(t/h) lies in [0, 1/2), else 0."""
    _check_period(h)
    s = t / h
    return 2 if s - math.floor(s) < 0.5 else 0


def _active_time(h: float, t: float) -> float:
    # ∫_0^t α_h; continuous and piecewise linear in t
    s = t / h
    k = math.floor(s)
    return h * k + 2 * h * min(s - k, 0.5)


def tau_h(h: float, t: float, t_prime: float) -> float:
    """
    Closed-form τ_h(t, t') = ∫_{t'}^{t} α_h(s) ds.

    Args:
        h: Splitting period
        t: Upper time
        t_prime: Lower time, t_prime <= t

    Returns:
        float: Intrinsic elapsed time of the linear term
    """
    _check_period(h)
    if t_prime > t:
        raise ParameterError(f"tau_h needs t' <= t, got t'={t_prime} > t={t}")
    if t == t_prime:
        return 0.0
    return max(0.0, _active_time(h, t) - _active_time(h, t_prime))


def propagator_multiplier(spec: KernelSpec, grid: GridSpec, h: float, t: float,
                          t_prime: float) -> SpectralMultiplier:
    """Spectral form of the propagator S_h(t, t') = S(τ_h(t, t'))."""
    return semigroup_multiplier(spec, grid, tau_h(h, t, t_prime))


@dataclass(frozen=True)
class SplitSchedule:
    """Splitting period h and number of periods n; T = n h is derived."""
    h: float
    n: int

    def __post_init__(self):
        _check_period(self.h)
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"number of periods must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def total_time(self) -> float:
        return self.n * self.h

    def time(self, k: int) -> float:
        return k * self.h

    @classmethod
    def from_total_time(cls, total_time: float, h: float, rtol: float = 1e-9) -> "SplitSchedule":
        """Schedule covering total_time with period h; h must divide total_time."""
        _check_period(h)
        n = round(total_time / h)
        if n < 1 or abs(n * h - total_time) > rtol * max(1.0, abs(total_time)):
            raise ParameterError(f"h = {h} does not divide T = {total_time}")
        return cls(h=h, n=n)

    def to_dict(self) -> Dict[str, Any]:
        return {"h": self.h, "n": self.n, "total_time": self.total_time}
