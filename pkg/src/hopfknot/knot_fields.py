"""Closed-form evaluation of the knotted radiation field.

Everything is dimensionless: positions are measured in units of the knot
scale, time in knot scales over the speed of light, and the magnetic and
electric vectors carry the scaling that makes their closed forms have unit
prefactor. In these units the field is an exact vacuum radiation solution
with E.B = 0 and |E| = |B| everywhere, total energy 2, and both helicities
1/2.

Positions are array-like with a trailing axis of length 3; all functions
broadcast, so a single point (3,) and a batch (n, 3) are both fine. Time
may be a scalar or any shape broadcastable to the position batch.

The level curves of the two complex scalar maps returned by hopf_maps_t0
and time_maps are the magnetic and electric field lines. Each map blows up
on one fiber; evaluation there raises MapPoleError instead of returning
infinities.
"""

from dataclasses import dataclass

import numpy as np

POLE_EPS = 1e-12
DEFAULT_FD_STEP = 1e-4


class MapPoleError(ValueError):
    """Raised when a scalar map is evaluated on or too near its pole fiber."""


@dataclass(frozen=True)
class AuxQuantities:
    """The three scalar building blocks of the time-dependent field."""
    a_aux: np.ndarray
    p_aux: np.ndarray
    q_aux: np.ndarray


@dataclass(frozen=True)
class FieldSample:
    """Magnetic and electric vectors at an event, shape (..., 3) each."""
    b: np.ndarray
    e: np.ndarray


def _split(r):
    r = np.asarray(r, dtype=np.float64)
    if r.shape[-1:] != (3,):
        raise ValueError("positions must have a trailing axis of length 3")
    return r[..., 0], r[..., 1], r[..., 2]


def aux_quantities(r, t):
    """Scalars (a, p, q) entering the field closed form.

    a = (R^2 - T^2 + 1)/2, p = T(T^2 - 3a^2), q = a(a^2 - 3T^2). The
    denominator a^2 + T^2 of the field is strictly positive for every real
    event, so the closed form is total.
    """
    x, y, z = _split(r)
    t = np.asarray(t, dtype=np.float64)
    r2 = x * x + y * y + z * z
    a = 0.5 * (r2 - t * t + 1.0)
    p = t * (t * t - 3.0 * a * a)
    q = a * (a * a - 3.0 * t * t)
    return AuxQuantities(a_aux=a, p_aux=p, q_aux=q)


def h_vectors(r, t):
    """The two orthogonal basis vectors of the field, shape (..., 3).

    They satisfy h1.h2 = 0 and |h1| = |h2| pointwise, which is what makes
    the field null. The combination w = y + t carries all time dependence
    of the basis.
    """
    x, y, z = _split(r)
    t = np.asarray(t, dtype=np.float64)
    w = y + t
    h1 = np.stack([w - x * z,
                   -x - w * z,
                   0.5 * (-1.0 - z * z + x * x + w * w)], axis=-1)
    h2 = np.stack([0.5 * (1.0 + x * x - z * z - w * w),
                   x * w - z,
                   w + x * z], axis=-1)
    return h1, h2


def field_components(x, y, z, t):
    """Field evaluation on separate coordinate arrays.

    Returns (bx, by, bz, ex, ey, ez). This is the flat-array workhorse the
    quadrature diagnostics run on; field_at wraps it in the (..., 3)
    convention.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    r2 = x * x + y * y + z * z
    aa = 0.5 * (r2 - t * t + 1.0)
    p = t * (t * t - 3.0 * aa * aa)
    q = aa * (aa * aa - 3.0 * t * t)
    w = y + t
    h10 = w - x * z
    h11 = -x - w * z
    h12 = 0.5 * (-1.0 - z * z + x * x + w * w)
    h20 = 0.5 * (1.0 + x * x - z * z - w * w)
    h21 = x * w - z
    h22 = w + x * z
    dd = aa * aa + t * t
    inv = 1.0 / (dd * dd * dd)
    return ((q * h10 + p * h20) * inv,
            (q * h11 + p * h21) * inv,
            (q * h12 + p * h22) * inv,
            (q * h20 - p * h10) * inv,
            (q * h21 - p * h11) * inv,
            (q * h22 - p * h12) * inv)


def field_at(r, t):
    """Magnetic and electric vectors at an event (or batch of events)."""
    x, y, z = _split(r)
    bx, by, bz, ex, ey, ez = field_components(x, y, z, t)
    return FieldSample(b=np.stack([bx, by, bz], axis=-1),
                       e=np.stack([ex, ey, ez], axis=-1))


def cauchy_fields(r):
    """Initial-time field from its own closed form.

    Implemented independently of field_at so that agreement of the two at
    t = 0 is a meaningful consistency check rather than a tautology.
    """
    x, y, z = _split(r)
    r2 = x * x + y * y + z * z
    d = 1.0 + r2
    f = 8.0 / (d * d * d)
    b = np.stack([f * (y - x * z),
                  f * (-x - y * z),
                  f * 0.5 * (-1.0 - z * z + x * x + y * y)], axis=-1)
    e = np.stack([f * 0.5 * (1.0 + x * x - y * y - z * z),
                  f * (-z + x * y),
                  f * (y + x * z)], axis=-1)
    return FieldSample(b=b, e=e)


def potentials_t0(r):
    """Initial-time vector potentials (magnetic, electric).

    curl of the first is the initial magnetic field, curl of the second the
    initial electric field; their dot products with those fields integrate
    to the two helicities.
    """
    x, y, z = _split(r)
    r2 = x * x + y * y + z * z
    d = 1.0 + r2
    f = 2.0 / (d * d)
    ones = np.ones_like(x)
    a_pot = np.stack([f * y, -f * x, -f * ones], axis=-1)
    c_pot = np.stack([f * ones, -f * z, f * y], axis=-1)
    return a_pot, c_pot


def _check_poles(den, r, label, eps=POLE_EPS):
    mod = np.abs(den)
    if np.any(mod < eps):
        idx = np.unravel_index(int(np.argmin(mod)), np.shape(mod)) if np.ndim(mod) else ()
        where = np.asarray(r, dtype=np.float64)[idx] if np.ndim(mod) else r
        raise MapPoleError(
            f"{label} map denominator vanishes (|den| < {eps:g}) at {where}")


def hopf_maps_t0(r):
    """The two initial-time complex scalar maps (phi0, theta0).

    phi0 = 2(x + iy) / (2z + i(R^2 - 1)) and theta0 is the same expression
    with coordinates cycled (x, y, z) -> (y, z, x). Level curves of phi0
    are the initial magnetic lines, of theta0 the electric ones.
    """
    x, y, z = _split(r)
    r2 = x * x + y * y + z * z
    den_phi = 2.0 * z + 1j * (r2 - 1.0)
    den_theta = 2.0 * x + 1j * (r2 - 1.0)
    _check_poles(den_phi, r, "magnetic")
    _check_poles(den_theta, r, "electric")
    phi0 = 2.0 * (x + 1j * y) / den_phi
    theta0 = 2.0 * (y + 1j * z) / den_theta
    return phi0, theta0


def _time_map_parts(r, t):
    x, y, z = _split(r)
    t = np.asarray(t, dtype=np.float64)
    r2 = x * x + y * y + z * z
    a = 0.5 * (r2 - t * t + 1.0)
    num_phi = (a * x - t * z) + 1j * (a * y + t * (a - 1.0))
    den_phi = (a * z + t * x) + 1j * (a * (a - 1.0) - t * y)
    num_theta = (a * y + t * (a - 1.0)) + 1j * (a * z + t * x)
    den_theta = (a * x - t * z) + 1j * (a * (a - 1.0) - t * y)
    return num_phi, den_phi, num_theta, den_theta


def time_maps(r, t):
    """Time-dependent scalar maps (phi, theta); reduce to hopf_maps_t0 at t=0."""
    num_phi, den_phi, num_theta, den_theta = _time_map_parts(r, t)
    _check_poles(den_phi, r, "magnetic")
    _check_poles(den_theta, r, "electric")
    return num_phi / den_phi, num_theta / den_theta


def fields_from_maps(r, t, fd_step=DEFAULT_FD_STEP):
    """Field reconstructed from gradients of the scalar maps.

    The magnetic vector is the pullback -grad(Re phi) x grad(Im phi) /
    (1 + |phi|^2)^2 and the electric one is +grad(Re theta) x grad(Im
    theta) / (1 + |theta|^2)^2, with gradients taken by second order
    central differences of step fd_step. Agreement with field_at is then
    limited by the fd_step^2 truncation error.

    Raises MapPoleError when any stencil point sits too close to a map
    pole (denominator modulus below 10 fd_step), and ValueError on
    non-finite intermediates.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape[-1:] != (3,):
        raise ValueError("positions must have a trailing axis of length 3")
    h = float(fd_step)
    if h <= 0.0:
        raise ValueError("fd_step must be positive")

    # stencil of 7 evaluation points: center plus +-h along each axis
    offsets = np.zeros((7, 3))
    for ax in range(3):
        offsets[1 + 2 * ax, ax] = h
        offsets[2 + 2 * ax, ax] = -h
    pts = r[..., None, :] + offsets

    t = np.asarray(t, dtype=np.float64)
    t_st = t[..., None] if t.ndim > 0 else t
    num_phi, den_phi, num_theta, den_theta = _time_map_parts(pts, t_st)
    guard = 10.0 * h
    _check_poles(den_phi, pts, "magnetic", eps=guard)
    _check_poles(den_theta, pts, "electric", eps=guard)
    phi = num_phi / den_phi
    theta = num_theta / den_theta

    def pullback(m, sign):
        gr = np.stack([(m[..., 1 + 2 * ax].real - m[..., 2 + 2 * ax].real) / (2.0 * h)
                       for ax in range(3)], axis=-1)
        gi = np.stack([(m[..., 1 + 2 * ax].imag - m[..., 2 + 2 * ax].imag) / (2.0 * h)
                       for ax in range(3)], axis=-1)
        mod2 = np.abs(m[..., 0]) ** 2
        return sign * np.cross(gr, gi) / (1.0 + mod2)[..., None] ** 2

    b = pullback(phi, -1.0)
    e = pullback(theta, +1.0)
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(e))):
        raise ValueError("non-finite intermediate in map reconstruction")
    return FieldSample(b=b, e=e)
