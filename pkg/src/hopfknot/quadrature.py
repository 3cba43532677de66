"""Deterministic quadrature over all of space.

Integrals are done in spherical coordinates on a tensor product of
Gauss-Legendre rules: one in the compactified radial variable u with
r = s u / (1 - u) mapping (0, 1) onto (0, inf), one in cos(theta), and one
in the azimuth. The knot densities decay like R^-8, which the rational
radial map captures with ordinary Gauss nodes.

All reductions use fixed-order pairwise (cascade) summation, so a result
depends only on the grid, never on evaluation order or thread count. The
error estimate comes from repeating the integral with half the radial
resolution.

Integrand conventions: scalar densities are called as density(x, y, z)
with flat coordinate arrays and must return a matching flat array; vector
densities return shape (n, 3).
"""

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Tensor-product grid resolution and radial map scale."""
    radial_nodes: int = 96
    angular_nodes_theta: int = 48
    angular_nodes_phi: int = 96
    radial_map_scale: float = 1.0

    def __post_init__(self):
        for name in ("radial_nodes", "angular_nodes_theta", "angular_nodes_phi"):
            if getattr(self, name) < 4:
                raise ValueError(f"{name} must be at least 4")
        if not self.radial_map_scale > 0.0:
            raise ValueError("radial_map_scale must be positive")


@dataclass(frozen=True)
class IntegralEstimate:
    """Integral value (scalar or length-3 vector) with an error estimate."""
    value: object
    error_estimate: float


def pairwise_sum(values):
    """Cascade summation in a fixed order.

    The array is padded with zeros to a power of two and halved repeatedly,
    adding even and odd entries. Deterministic by construction and more
    accurate than naive left-to-right accumulation.
    """
    a = np.asarray(values, dtype=np.float64).ravel()
    if a.size == 0:
        return 0.0
    n = 1
    while n < a.size:
        n *= 2
    if n != a.size:
        a = np.concatenate([a, np.zeros(n - a.size)])
    while a.size > 1:
        a = a[::2] + a[1::2]
    return float(a[0])


@lru_cache(maxsize=8)
def _r3_grid(spec):
    """Flat sample coordinates and weights for the compactified grid."""
    xu, wu = np.polynomial.legendre.leggauss(spec.radial_nodes)
    u = 0.5 * (xu + 1.0)
    wu = 0.5 * wu
    s = spec.radial_map_scale
    r = s * u / (1.0 - u)
    jac = s / (1.0 - u) ** 2
    wr = wu * r * r * jac

    ct, wt = np.polynomial.legendre.leggauss(spec.angular_nodes_theta)
    st = np.sqrt(1.0 - ct * ct)

    xp, wp = np.polynomial.legendre.leggauss(spec.angular_nodes_phi)
    ph = np.pi * (xp + 1.0)
    wp = np.pi * wp

    rr, cc, pp = np.meshgrid(r, ct, ph, indexing="ij")
    ss = np.sqrt(1.0 - cc * cc)
    x = (rr * ss * np.cos(pp)).ravel()
    y = (rr * ss * np.sin(pp)).ravel()
    z = (rr * cc).ravel()
    w = (wr[:, None, None] * wt[None, :, None] * wp[None, None, :]).ravel()
    del st
    return x, y, z, w


@lru_cache(maxsize=8)
def _ball_grid(radius, spec):
    """Flat offsets and weights for a ball of the given radius."""
    xr, wr = np.polynomial.legendre.leggauss(spec.radial_nodes)
    r = radius * 0.5 * (xr + 1.0)
    wq = wr * (radius * 0.5) * r * r

    ct, wt = np.polynomial.legendre.leggauss(spec.angular_nodes_theta)
    xp, wp = np.polynomial.legendre.leggauss(spec.angular_nodes_phi)
    ph = np.pi * (xp + 1.0)
    wp = np.pi * wp

    rr, cc, pp = np.meshgrid(r, ct, ph, indexing="ij")
    ss = np.sqrt(1.0 - cc * cc)
    x = (rr * ss * np.cos(pp)).ravel()
    y = (rr * ss * np.sin(pp)).ravel()
    z = (rr * cc).ravel()
    w = (wq[:, None, None] * wt[None, :, None] * wp[None, None, :]).ravel()
    return x, y, z, w


def _halved(spec):
    return replace(spec, radial_nodes=max(4, spec.radial_nodes // 2))


def _check_samples(vals):
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmin(np.isfinite(np.asarray(vals)).ravel()))
        raise ValueError(
            f"integrand evaluated non-finite at flat sample index {bad}")


def _scalar_pass(density, grid):
    x, y, z, w = grid
    vals = np.asarray(density(x, y, z), dtype=np.float64)
    if vals.shape != x.shape:
        raise ValueError("scalar density must return one value per sample")
    _check_samples(vals)
    return pairwise_sum(w * vals)


def _vector_pass(density, grid):
    x, y, z, w = grid
    vals = np.asarray(density(x, y, z), dtype=np.float64)
    if vals.shape != x.shape + (3,):
        raise ValueError("vector density must return shape (n, 3)")
    _check_samples(vals)
    return np.array([pairwise_sum(w * vals[:, k]) for k in range(3)])


def integrate_r3(density, spec=GridSpec()):
    """Integral of a scalar density over all of space."""
    full = _scalar_pass(density, _r3_grid(spec))
    half = _scalar_pass(density, _r3_grid(_halved(spec)))
    return IntegralEstimate(value=full, error_estimate=abs(full - half))


def integrate_r3_vec(density, spec=GridSpec()):
    """Componentwise integral of a vector density over all of space."""
    full = _vector_pass(density, _r3_grid(spec))
    half = _vector_pass(density, _r3_grid(_halved(spec)))
    return IntegralEstimate(value=full,
                            error_estimate=float(np.max(np.abs(full - half))))


def integrate_ball(density, radius, center=(0.0, 0.0, 0.0), spec=GridSpec()):
    """Integral of a scalar density over a ball.

    The radial rule lives on [0, radius] directly (no compactification), so
    the ball boundary is resolved exactly rather than through an indicator
    jump.
    """
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    cx, cy, cz = (float(c) for c in center)

    def offset_pass(grid):
        x, y, z, w = grid
        vals = np.asarray(density(x + cx, y + cy, z + cz), dtype=np.float64)
        if vals.shape != x.shape:
            raise ValueError("scalar density must return one value per sample")
        _check_samples(vals)
        return pairwise_sum(w * vals)

    full = offset_pass(_ball_grid(float(radius), spec))
    half = offset_pass(_ball_grid(float(radius), _halved(spec)))
    return IntegralEstimate(value=full, error_estimate=abs(full - half))
