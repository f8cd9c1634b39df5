"""
Rotation-invariant stable densities g_β and the scaled kernels G_{σ,β}.

Transform convention: ĝ(ξ) = ∫ g(x) e^{-i x·ξ} dx, so that ĝ_β(ξ) = exp(-|ξ|^{2β})
and g_β(x) = (2π)^{-d} ∫ exp(-|ξ|^{2β}) e^{i x·ξ} dξ.

β = 1 (Gaussian) and β = 1/2 (Poisson kernel) are evaluated in closed form; every
other β goes through a radial inverse-transform quadrature truncated where
exp(-r^{2β}) drops below the configured cutoff level.
"""

import logging
import warnings
from functools import lru_cache
from typing import Optional, Union, Sequence

import numpy as np
from scipy import integrate, special

from kernels.config import get_kernel_config
from utils.data_models import KernelSpec
from utils.errors import AccuracyError, ParameterError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _check_beta(beta: float) -> None:
    if not (0 < beta <= 1):
        raise ParameterError(f"beta must lie in (0, 1], got {beta}")


def _check_dim(dim: int) -> None:
    if int(dim) != dim or dim < 1:
        raise ParameterError(f"dim must be a positive integer, got {dim}")


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere S^{d-1} (2 for d = 1)."""
    return 2 * np.pi ** (dim / 2) / special.gamma(dim / 2)


def density_at_origin(beta: float, dim: int) -> float:
    """g_β(0) = |S^{d-1}| Γ(d/2β) / (2β (2π)^d)."""
    return sphere_area(dim) * special.gamma(dim / (2 * beta)) / (2 * beta * (2 * np.pi) ** dim)


def _cutoff_radius(beta: float, cutoff_level: float) -> float:
    return (-np.log(cutoff_level)) ** (1 / (2 * beta))


@lru_cache(maxsize=65536)
def _radial_density(beta: float, dim: int, r: float) -> float:
    if beta == 1.0:
        return float((4 * np.pi) ** (-dim / 2) * np.exp(-r * r / 4))
    if beta == 0.5:
        return float(
            special.gamma((dim + 1) / 2) / np.pi ** ((dim + 1) / 2) * (1 + r * r) ** (-(dim + 1) / 2)
        )
    if r == 0.0:
        return float(density_at_origin(beta, dim))

    config = get_kernel_config()
    alpha = 2 * beta
    r_max = _cutoff_radius(beta, config["cutoff_level"])
    options = dict(epsabs=config["epsabs"], epsrel=config["epsrel"], limit=config["quad_limit"])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if dim == 1:
            value, error = integrate.quad(
                lambda s: np.exp(-s ** alpha), 0.0, r_max, weight="cos", wvar=r, **options
            )
            value, error = value / np.pi, error / np.pi
        elif dim == 3:
            value, error = integrate.quad(
                lambda s: np.exp(-s ** alpha) * s, 0.0, r_max, weight="sin", wvar=r, **options
            )
            scale = 1 / (2 * np.pi ** 2 * r)
            value, error = value * scale, error * scale
        else:
            order = dim / 2 - 1
            value, error = integrate.quad(
                lambda s: np.exp(-s ** alpha) * special.jv(order, s * r) * s ** (dim / 2),
                0.0, r_max, **options
            )
            scale = (2 * np.pi) ** (-dim / 2) * r ** (1 - dim / 2)
            value, error = value * scale, error * scale

    if not np.isfinite(value) or error > config["accuracy_tolerance"]:
        raise AccuracyError(
            f"density quadrature did not converge for beta={beta}, dim={dim}, r={r}", error
        )
    return float(value)


def radial_density(beta: float, dim: int, r: ArrayLike) -> np.ndarray:
    """
    Evaluate g_β at radii r (vectorized over r).

    Args:
        beta: Fractional order in (0, 1]
        dim: Spatial dimension d
        r: Radius or array of radii |x|

    Returns:
        np.ndarray: Density values with the shape of r
    """
    _check_beta(beta)
    _check_dim(dim)
    radii = np.abs(np.asarray(r, dtype=float))
    if not np.all(np.isfinite(radii)):
        raise ParameterError("density evaluation points must be finite")
    flat = [_radial_density(float(beta), int(dim), float(v)) for v in radii.ravel()]
    return np.asarray(flat, dtype=float).reshape(radii.shape)


def stable_density(beta: float, dim: int, x: ArrayLike) -> float:
    """
    Evaluate the rotation-invariant stable density g_β at a point x of R^d.

    Args:
        beta: Fractional order in (0, 1]
        dim: Spatial dimension d
        x: Point (scalar allowed when d = 1)

    Returns:
        float: g_β(x) >= 0
    """
    point = np.atleast_1d(np.asarray(x, dtype=float))
    if point.size != dim:
        raise ParameterError(f"point of size {point.size} does not live in dimension {dim}")
    return float(radial_density(beta, dim, np.linalg.norm(point)))


def heat_kernel(spec: KernelSpec, t: float, x: ArrayLike) -> float:
    """
    G_{σ,β}(t, x) = (σt)^{-d/2β} g_β((σt)^{-1/2β} x).

    Args:
        spec: Kernel parameters
        t: Time, strictly positive
        x: Point of R^d

    Returns:
        float: Kernel value
    """
    if not t > 0:
        raise ParameterError(f"heat kernel needs t > 0, got {t}")
    if spec.sigma <= 0:
        raise ParameterError("heat kernel needs sigma > 0")
    scale = (spec.sigma * t) ** (1 / (2 * spec.beta))
    point = np.atleast_1d(np.asarray(x, dtype=float))
    return stable_density(spec.beta, spec.dim, point / scale) / scale ** spec.dim


def heat_kernel_radial(spec: KernelSpec, t: float, r: ArrayLike) -> np.ndarray:
    """Vectorized G_{σ,β}(t, ·) at radii r."""
    if not t > 0:
        raise ParameterError(f"heat kernel needs t > 0, got {t}")
    if spec.sigma <= 0:
        raise ParameterError("heat kernel needs sigma > 0")
    scale = (spec.sigma * t) ** (1 / (2 * spec.beta))
    return radial_density(spec.beta, spec.dim, np.asarray(r, dtype=float) / scale) / scale ** spec.dim


def tail_series(beta: float, dim: int, radius: float, terms: Optional[int] = None) -> float:
    """
    Mass of g_β outside the ball of the given radius from the algebraic tail expansion
    g_β(x) ~ Σ_k c_k |x|^{-2βk-d}. Accurate for large radii only; zero for β = 1.
    """
    if beta == 1.0:
        return 0.0
    if terms is None:
        terms = get_kernel_config()["tail_series_terms"]
    alpha = 2 * beta
    total = 0.0
    for k in range(1, terms + 1):
        c_k = (
            (-1) ** (k + 1) * 2 ** (alpha * k)
            * special.gamma(alpha * k / 2 + 1) * special.gamma((alpha * k + dim) / 2)
            * np.sin(np.pi * alpha * k / 2)
            / (np.pi ** (dim / 2 + 1) * special.factorial(k))
        )
        total += c_k * radius ** (-alpha * k) / (alpha * k)
    return float(sphere_area(dim) * total)


def _ball_mass_quadrature(beta: float, dim: int, radius: float) -> float:
    config = get_kernel_config()
    area = sphere_area(dim)

    def integrand(r: float) -> float:
        return area * r ** (dim - 1) * _radial_density(float(beta), int(dim), float(r))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(integrand, 0.0, radius, epsabs=1e-12, epsrel=1e-12, limit=200)
    if error > 1e3 * config["accuracy_tolerance"]:
        raise AccuracyError(f"mass quadrature did not converge on radius {radius}", error)
    return float(value)


def stable_tail_mass(beta: float, dim: int, radius: float) -> float:
    """
    ∫_{|x| > radius} g_β(x) dx.

    Closed forms for β = 1 (any d) and β = 1/2 (d = 1); the tail series above the
    configured asymptotic radius; ball quadrature below it.
    """
    _check_beta(beta)
    _check_dim(dim)
    if radius <= 0:
        return 1.0
    if beta == 1.0:
        return float(special.gammaincc(dim / 2, radius * radius / 4))
    if beta == 0.5 and dim == 1:
        return float(1 - 2 / np.pi * np.arctan(radius))
    if radius >= get_kernel_config()["tail_asymptotic_radius"]:
        return tail_series(beta, dim, radius)
    return max(0.0, 1.0 - _ball_mass_quadrature(beta, dim, radius))


def stable_mass(beta: float, dim: int, radius: Optional[float] = None) -> float:
    """
    Numerical ∫_{R^d} g_β: ball quadrature of the density up to the given radius plus
    its tail beyond it (series, or the incomplete gamma function for β = 1).

    Args:
        beta: Fractional order in (0, 1]
        dim: Spatial dimension d
        radius: Quadrature radius. Configured default when None.

    Returns:
        float: Total mass, 1 up to quadrature error
    """
    _check_beta(beta)
    _check_dim(dim)
    config = get_kernel_config()
    if radius is None:
        radius = config["mass_radius_1d"] if dim == 1 else config["mass_radius_nd"]
    inner = _ball_mass_quadrature(beta, dim, radius)
    if beta == 1.0:
        tail = float(special.gammaincc(dim / 2, radius * radius / 4))
    else:
        tail = tail_series(beta, dim, radius)
    logger.debug(f"stable mass beta={beta} dim={dim}: inner={inner:.15g} tail={tail:.3e}")
    return inner + tail
