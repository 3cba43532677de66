"""Global diagnostics of the knot: energy, momentum, helicity, geometry.

All quantities are dimensionless in the unit system of knot_fields. The
analytically known landmarks, used by the test suite as oracles, are:
total energy 2 at every time, both helicities 1/2, total momentum along
the positive y axis, peak energy density 16/pi^2 at the origin at time
zero falling to 1/pi^2 on the unit sphere, and a unit mean quadratic
radius at time zero.
"""

from dataclasses import dataclass

import numpy as np

from . import knot_fields
from .quadrature import GridSpec, IntegralEstimate, integrate_r3, \
    integrate_r3_vec, integrate_ball

PI2 = np.pi * np.pi


@dataclass(frozen=True)
class EnergyReport:
    """Energy diagnostics at one time.

    second_moment_eigenvalues is supplementary: the sorted eigenvalues of
    the second-moment tensor of the energy distribution about max_position,
    a quantitative stand-in for "how non-spherical is it".
    """
    time: float
    total_energy: float
    max_position: np.ndarray
    max_density: float
    mean_quadratic_radius: float
    fraction_within_unit_ball: float
    second_moment_eigenvalues: np.ndarray


def energy_density(r, t):
    """Energy density from its closed form.

    Equals (|e|^2 + |b|^2) / (2 pi^2) for the field of field_at; the test
    suite checks that identity to near machine precision.
    """
    x, y, z = np.asarray(r, dtype=np.float64)[..., 0], \
        np.asarray(r, dtype=np.float64)[..., 1], \
        np.asarray(r, dtype=np.float64)[..., 2]
    return _density_flat(x, y, z, t)


def _density_flat(x, y, z, t):
    t = np.asarray(t, dtype=np.float64)
    r2 = x * x + y * y + z * z
    a = 0.5 * (r2 - t * t + 1.0)
    w = y + t
    dd = a * a + t * t
    num = 1.0 + x * x + w * w + z * z
    return num * num / (dd * dd * dd) / (4.0 * PI2)


def total_energy(t, spec=GridSpec()):
    """Total field energy at time t; equal to 2 for every t."""
    return integrate_r3(lambda x, y, z: _density_flat(x, y, z, t), spec)


def poynting_total(t, spec=GridSpec()):
    """Total momentum integral (1/pi^2) int e x b d^3R.

    Points along +y and is conserved. Note the analytic value is (0, 1, 0):
    together with total energy 2 this is the usual statement that the knot
    transports its energy at half the speed of light.
    """
    def density(x, y, z):
        bx, by, bz, ex, ey, ez = knot_fields.field_components(x, y, z, t)
        sx = ey * bz - ez * by
        sy = ez * bx - ex * bz
        sz = ex * by - ey * bx
        return np.stack([sx, sy, sz], axis=-1) / PI2

    return integrate_r3_vec(density, spec)


def helicities_t0(spec=GridSpec()):
    """Magnetic and electric helicities at time zero, each equal to 1/2."""
    def h_m(x, y, z):
        r = np.stack([x, y, z], axis=-1)
        a_pot, _ = knot_fields.potentials_t0(r)
        b = knot_fields.cauchy_fields(r).b
        return np.sum(a_pot * b, axis=-1) / (2.0 * PI2)

    def h_e(x, y, z):
        r = np.stack([x, y, z], axis=-1)
        _, c_pot = knot_fields.potentials_t0(r)
        e = knot_fields.cauchy_fields(r).e
        return np.sum(c_pot * e, axis=-1) / (2.0 * PI2)

    return integrate_r3(h_m, spec).value, integrate_r3(h_e, spec).value


def _golden_max(f, lo, hi, xtol=1e-10):
    """Golden-section maximizer for a unimodal function on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = f(c)
    fd = f(d)
    while (b - a) > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def energy_max_position(t):
    """Position of the energy density maximum at time t in [0, 2].

    By the x -> -x and z -> -z symmetries of the density the maximum sits
    on the y axis, so a golden-section search along it suffices. A full 3D
    search cross-checks this in the test suite.
    """
    t = float(t)
    if not 0.0 <= t <= 2.0:
        raise ValueError("maximum search is validated for t in [0, 2] only")
    ystar = _golden_max(lambda yy: float(_density_flat(0.0, yy, 0.0, t)),
                        -1.0, t + 2.0)
    return np.array([0.0, ystar, 0.0])


def mean_quadratic_radius(t, spec=GridSpec(), center=None):
    """RMS distance of the energy distribution from its maximum.

    center overrides the maximum position when given (useful for the t = 0
    consistency check, where the maximum is at the origin anyway).
    """
    if center is None:
        center = energy_max_position(t)
    cx, cy, cz = (float(c) for c in center)

    def weighted(x, y, z):
        d2 = (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2
        return d2 * _density_flat(x, y, z, t)

    num = integrate_r3(weighted, spec).value
    den = integrate_r3(lambda x, y, z: _density_flat(x, y, z, t), spec).value
    return float(np.sqrt(num / den))


def energy_fraction_within(radius, center=(0.0, 0.0, 0.0), t=0.0,
                           spec=GridSpec()):
    """Fraction of the total energy inside a ball.

    The numerator is integrated on a Gauss grid fitted to the ball, so the
    boundary is treated exactly instead of through an indicator jump; the
    denominator uses the standard all-space grid.
    """
    num = integrate_ball(lambda x, y, z: _density_flat(x, y, z, t),
                         radius, center, spec).value
    den = integrate_r3(lambda x, y, z: _density_flat(x, y, z, t), spec).value
    return float(num / den)


def second_moment_eigenvalues(t, spec=GridSpec(), center=None):
    """Sorted eigenvalues of the normalized second-moment tensor."""
    if center is None:
        center = energy_max_position(t)
    cx, cy, cz = (float(c) for c in center)

    def moment(i, j):
        def density(x, y, z):
            d = (x - cx, y - cy, z - cz)
            return d[i] * d[j] * _density_flat(x, y, z, t)
        return integrate_r3(density, spec).value

    den = integrate_r3(lambda x, y, z: _density_flat(x, y, z, t), spec).value
    m = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            m[i, j] = m[j, i] = moment(i, j) / den
    return np.sort(np.linalg.eigvalsh(m))


def energy_report(t, spec=GridSpec()):
    """Assemble the full energy diagnostics record at one time."""
    t = float(t)
    pos = energy_max_position(t)
    return EnergyReport(
        time=t,
        total_energy=float(total_energy(t, spec).value),
        max_position=pos,
        max_density=float(_density_flat(pos[0], pos[1], pos[2], t)),
        mean_quadratic_radius=mean_quadratic_radius(t, spec, center=pos),
        fraction_within_unit_ball=energy_fraction_within(1.0, (0.0, 0.0, 0.0),
                                                         t, spec),
        second_moment_eigenvalues=second_moment_eigenvalues(t, spec,
                                                            center=pos),
    )


def grid_export(t, bounds, resolution):
    """Regular lattice of (position, density, field) rows.

    bounds is ((x0, x1), (y0, y1), (z0, z1)) and resolution the number of
    samples per axis (at least 2 each). Rows are ordered row-major with z
    fastest; columns are X, Y, Z, U, Bx, By, Bz, Ex, Ey, Ez. Intended for
    external isosurface plotting.
    """
    (x0, x1), (y0, y1), (z0, z1) = bounds
    nx, ny, nz = (int(n) for n in resolution)
    if min(nx, ny, nz) < 2:
        raise ValueError("resolution must be at least 2 per axis")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    zs = np.linspace(z0, z1, nz)
    gx, gy, gz = np.meshgrid(xs, ys, zs, indexing="ij")
    gx, gy, gz = gx.ravel(), gy.ravel(), gz.ravel()
    u = _density_flat(gx, gy, gz, t)
    bx, by, bz, ex, ey, ez = knot_fields.field_components(gx, gy, gz, t)
    return np.column_stack([gx, gy, gz, u, bx, by, bz, ex, ey, ez])
