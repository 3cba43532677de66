"""Property-check harness: identities the field must satisfy, checked blind.

Each check draws seeded events (PCG64 generator, the seed fully determines
the report), evaluates a residual that would expose a specific class of
implementation error, and returns a CheckReport. The residuals are
normalized by the local field scale |e| + |b| + 1e-30 so a check means the
same thing in the knot core and out in the tails.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import diagnostics
from . import knot_fields
from .quadrature import GridSpec

SCALE_FLOOR = 1e-30
EVENT_BOX = 3.0
EVENT_TMAX = 3.0
DEFAULT_SWEEP_TIMES = (0.0, 0.5, 1.0, 1.5)


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool


def _report(name, samples, max_residual, tolerance):
    max_residual = float(max_residual)
    return CheckReport(check_name=name, samples=int(samples),
                       max_residual=max_residual, tolerance=float(tolerance),
                       passed=bool(max_residual <= tolerance))


def _draw_events(rng, n):
    xyz = rng.uniform(-EVENT_BOX, EVENT_BOX, size=(n, 3))
    t = rng.uniform(0.0, EVENT_TMAX, size=n)
    return xyz[:, 0], xyz[:, 1], xyz[:, 2], t


def _scale(bx, by, bz, ex, ey, ez):
    eb = np.sqrt(bx * bx + by * by + bz * bz)
    ee = np.sqrt(ex * ex + ey * ey + ez * ez)
    return ee + eb + SCALE_FLOOR


def check_null_field(n_samples=10000, seed=0):
    """|e.b| and ||e|^2 - |b|^2|, normalized by scale^2, at random events.

    Both vanish identically for a null field, so anything beyond rounding
    noise here means the two closed forms have drifted apart.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    x, y, z, t = _draw_events(rng, n_samples)
    bx, by, bz, ex, ey, ez = knot_fields.field_components(x, y, z, t)
    s2 = _scale(bx, by, bz, ex, ey, ez) ** 2
    dot = np.abs(ex * bx + ey * by + ez * bz)
    diff = np.abs((ex * ex + ey * ey + ez * ez)
                  - (bx * bx + by * by + bz * bz))
    resid = max(np.max(dot / s2), np.max(diff / s2))
    return _report("null_field", n_samples, resid, 1e-12)


def check_maxwell(n_samples=100, fd_step=1e-4, seed=0):
    """Central-difference residuals of the four vacuum Maxwell equations.

    Checks div b, div e, curl e + db/dT and curl b - de/dT at seeded
    events. Second-order differences, so the residual drops about fourfold
    when fd_step is halved; that scaling is itself asserted in the tests.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    x, y, z, t = _draw_events(rng, n_samples)
    h = float(fd_step)

    def fc(xx, yy, zz, tt):
        return np.stack(knot_fields.field_components(xx, yy, zz, tt))

    dx = (fc(x + h, y, z, t) - fc(x - h, y, z, t)) / (2.0 * h)
    dy = (fc(x, y + h, z, t) - fc(x, y - h, z, t)) / (2.0 * h)
    dz = (fc(x, y, z + h, t) - fc(x, y, z - h, t)) / (2.0 * h)
    dt = (fc(x, y, z, t + h) - fc(x, y, z, t - h)) / (2.0 * h)

    div_b = dx[0] + dy[1] + dz[2]
    div_e = dx[3] + dy[4] + dz[5]
    faraday = np.stack([dy[5] - dz[4] + dt[0],
                        dz[3] - dx[5] + dt[1],
                        dx[4] - dy[3] + dt[2]])
    ampere = np.stack([dy[2] - dz[1] - dt[3],
                       dz[0] - dx[2] - dt[4],
                       dx[1] - dy[0] - dt[5]])

    s = _scale(*fc(x, y, z, t))
    resid = max(np.max(np.abs(div_b) / s), np.max(np.abs(div_e) / s),
                np.max(np.abs(faraday) / s), np.max(np.abs(ampere) / s))
    return _report("maxwell_residuals", n_samples, resid, 1e-6)


def _clear_of_map_poles(x, y, z, t, margin=1e-2):
    r = np.stack([x, y, z], axis=-1)
    a = knot_fields.aux_quantities(r, t).a_aux
    den_phi = np.hypot(a * z + t * x, a * (a - 1.0) - t * y)
    den_theta = np.hypot(a * x - t * z, a * (a - 1.0) - t * y)
    return (den_phi > margin) & (den_theta > margin)


def check_representations(n_samples=100, seed=0):
    """Cross-checks of the three independent routes to the same field.

    Three sub-residuals, each divided by its own tolerance so the report
    carries a single worst ratio (tolerance 1.0):

      closed form vs map pullback at random events   -> 1e-6 of scale
      closed form vs initial-data form at T=0        -> 4 ulp
      finite-difference curls of the potentials      -> 1e-5 of scale

    Events whose map denominators sit within 1e-2 of a pole are redrawn;
    the pullback route needs a finite-difference stencil to fit.
    """
    rng = np.random.Generator(np.random.PCG64(seed))

    xs = []
    for _ in range(100):
        x, y, z, t = _draw_events(rng, 2 * n_samples)
        keep = _clear_of_map_poles(x, y, z, t)
        xs.append(np.stack([x[keep], y[keep], z[keep], t[keep]], axis=-1))
        if sum(a.shape[0] for a in xs) >= n_samples:
            break
    ev = np.concatenate(xs)[:n_samples]
    if ev.shape[0] < n_samples:
        raise RuntimeError("pole rejection failed to fill the sample")
    r = ev[:, :3]
    t = ev[:, 3]

    exact = knot_fields.field_at(r, t)
    from_maps = knot_fields.fields_from_maps(r, t)
    s = np.linalg.norm(exact.e, axis=-1) + np.linalg.norm(exact.b, axis=-1) \
        + SCALE_FLOOR
    r_maps = max(np.max(np.abs(exact.b - from_maps.b) / s[:, None]),
                 np.max(np.abs(exact.e - from_maps.e) / s[:, None]))

    r0 = rng.uniform(-EVENT_BOX, EVENT_BOX, size=(n_samples, 3))
    closed0 = knot_fields.field_at(r0, 0.0)
    cauchy = knot_fields.cauchy_fields(r0)
    # ulps of the local field scale, not of each component: components
    # cross zero, where the two groupings cancel differently and a
    # per-component ulp count would be meaningless
    ulp0 = 4.0 * np.spacing(np.linalg.norm(closed0.b, axis=-1)
                            + np.linalg.norm(closed0.e, axis=-1))[:, None]
    r_cauchy = max(np.max(np.abs(closed0.b - cauchy.b) / ulp0),
                   np.max(np.abs(closed0.e - cauchy.e) / ulp0))

    h = 1e-4
    def curl_of(pot_index, pts):
        def pot(q):
            return knot_fields.potentials_t0(q)[pot_index]
        out = np.empty_like(pts)
        for j in range(3):
            dp = np.zeros(3)
            dp[j] = h
            dproj = (pot(pts + dp) - pot(pts - dp)) / (2.0 * h)
            if j == 0:
                dfdx = dproj
            elif j == 1:
                dfdy = dproj
            else:
                dfdz = dproj
        out[:, 0] = dfdy[:, 2] - dfdz[:, 1]
        out[:, 1] = dfdz[:, 0] - dfdx[:, 2]
        out[:, 2] = dfdx[:, 1] - dfdy[:, 0]
        return out

    s0 = np.linalg.norm(cauchy.e, axis=-1) + np.linalg.norm(cauchy.b, axis=-1) \
        + SCALE_FLOOR
    r_pot = max(
        np.max(np.abs(curl_of(0, r0) - cauchy.b) / s0[:, None]),
        np.max(np.abs(curl_of(1, r0) - cauchy.e) / s0[:, None]))

    ratio = max(r_maps / 1e-6, r_cauchy / 1.0, r_pot / 1e-5)
    return _report("representations", n_samples, ratio, 1.0)


def conservation_sweep(times=DEFAULT_SWEEP_TIMES, spec=GridSpec()):
    """Energy and momentum integrals across a time sweep.

    Two reports: the spread (max minus min) of total energy, tolerance
    1e-5, and the largest componentwise spread of the momentum integral,
    tolerance 1e-4. Conservation is checked through spreads so the sweep
    stays agnostic about the analytic values themselves.
    """
    times = tuple(float(t) for t in times)
    if len(times) == 0:
        raise ValueError("need at least one time")
    energies = np.array([diagnostics.total_energy(t, spec).value
                         for t in times])
    momenta = np.array([diagnostics.poynting_total(t, spec).value
                        for t in times])
    e_spread = float(energies.max() - energies.min())
    p_spread = float(np.max(momenta.max(axis=0) - momenta.min(axis=0)))
    return [_report("energy_conservation", len(times), e_spread, 1e-5),
            _report("momentum_conservation", len(times), p_spread, 1e-4)]


def run_all(seed=0, spec=GridSpec(), threads=1):
    """Run the whole harness; report order is fixed regardless of threads."""
    jobs = [
        lambda: [check_null_field(10000, seed)],
        lambda: [check_maxwell(100, 1e-4, seed)],
        lambda: [check_representations(100, seed)],
        lambda: conservation_sweep(DEFAULT_SWEEP_TIMES, spec),
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda f: f(), jobs))
    else:
        parts = [f() for f in jobs]
    return [rep for part in parts for rep in part]


def report_rows(reports):
    """CheckReports as JSON-ready dicts, fixed key order, 9 digit floats."""
    rows = []
    for rep in reports:
        rows.append({
            "check_name": rep.check_name,
            "samples": rep.samples,
            "max_residual": float("%.9g" % rep.max_residual),
            "tolerance": rep.tolerance,
            "passed": rep.passed,
        })
    return rows
