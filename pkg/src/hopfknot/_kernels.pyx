# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: field evaluation, the embedded 5(4) stepper for
particles and field lines, and the pairwise linking sum.

This module and _kernels_py.py are arithmetic twins: identical expressions
evaluated in identical order, so a given input produces bit-identical
output on either backend (the extension is compiled with fp-contract off).
Any change here must be mirrored there.

Status codes shared by the steppers:
    0  completed
    1  superluminal state accepted (should be unreachable, kept as a guard)
    2  step size underflow
    3  step cap exceeded
Tracer statuses:
    0  closed curve found
    1  max arclength reached without closure
    2  zero field at the start point
    3  step size underflow
"""

import numpy as np
from libc.math cimport sqrt, pow, fabs

# Dormand-Prince 5(4) tableau, error weights, and dense-output weights.
cdef double C2 = 0.2
cdef double C3 = 0.3
cdef double C4 = 0.8
cdef double C5 = 8.0 / 9.0
cdef double A21 = 0.2
cdef double A31 = 3.0 / 40.0
cdef double A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0
cdef double A42 = -56.0 / 15.0
cdef double A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0
cdef double A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0
cdef double A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0
cdef double A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double A71 = 35.0 / 384.0
cdef double A73 = 500.0 / 1113.0
cdef double A74 = 125.0 / 192.0
cdef double A75 = -2187.0 / 6784.0
cdef double A76 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0
cdef double E3 = -71.0 / 16695.0
cdef double E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0
cdef double E6 = 22.0 / 525.0
cdef double E7 = -1.0 / 40.0
cdef double D1 = -12715105075.0 / 11282082432.0
cdef double D3 = 87487479700.0 / 32700410799.0
cdef double D4 = -10690763975.0 / 1880347072.0
cdef double D5 = 701980252875.0 / 199316789632.0
cdef double D6 = -1453857185.0 / 822651844.0
cdef double D7 = 69997945.0 / 29380423.0

cdef double FOUR_PI = 12.566370614359172


cdef inline void _field(double x, double y, double z, double t,
                        double* b, double* e) nogil:
    cdef double r2, aa, p, q, w, h10, h11, h12, h20, h21, h22, dd, inv
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
    b[0] = (q * h10 + p * h20) * inv
    b[1] = (q * h11 + p * h21) * inv
    b[2] = (q * h12 + p * h22) * inv
    e[0] = (q * h20 - p * h10) * inv
    e[1] = (q * h21 - p * h11) * inv
    e[2] = (q * h22 - p * h12) * inv


def field_eval(double x, double y, double z, double t):
    """Scalar field evaluation; returns (bx, by, bz, ex, ey, ez)."""
    cdef double b[3]
    cdef double e[3]
    _field(x, y, z, t, b, e)
    return (b[0], b[1], b[2], e[0], e[1], e[2])


cdef inline int _particle_rhs(double t, double* y, double g, double* f) nogil:
    cdef double b[3]
    cdef double e[3]
    cdef double vx, vy, vz, v2, gam, ve, cx, cy, cz
    vx = y[3]
    vy = y[4]
    vz = y[5]
    v2 = vx * vx + vy * vy + vz * vz
    if v2 >= 1.0:
        return -1
    _field(y[0], y[1], y[2], t, b, e)
    gam = sqrt(1.0 - v2)
    ve = vx * e[0] + vy * e[1] + vz * e[2]
    cx = vy * b[2] - vz * b[1]
    cy = vz * b[0] - vx * b[2]
    cz = vx * b[1] - vy * b[0]
    f[0] = vx
    f[1] = vy
    f[2] = vz
    f[3] = -g * gam * (e[0] + cx - vx * ve)
    f[4] = -g * gam * (e[1] + cy - vy * ve)
    f[5] = -g * gam * (e[2] + cz - vz * ve)
    return 0


cdef inline int _line_rhs(double t_fixed, double* y, int which, double* f) nogil:
    cdef double b[3]
    cdef double e[3]
    cdef double n2, inv
    _field(y[0], y[1], y[2], t_fixed, b, e)
    if which == 0:
        f[0] = b[0]
        f[1] = b[1]
        f[2] = b[2]
    else:
        f[0] = e[0]
        f[1] = e[1]
        f[2] = e[2]
    n2 = f[0] * f[0] + f[1] * f[1] + f[2] * f[2]
    if n2 < 1e-280:
        return -1
    inv = 1.0 / sqrt(n2)
    f[0] = f[0] * inv
    f[1] = f[1] * inv
    f[2] = f[2] * inv
    return 0


cdef inline double _step_factor_accept(double err, double err_old) nogil:
    cdef double fac
    if err <= 1e-30:
        return 10.0
    fac = 0.9 * pow(err, -0.14) * pow(err_old, 0.08)
    if fac > 10.0:
        fac = 10.0
    if fac < 0.2:
        fac = 0.2
    return fac


cdef inline double _step_factor_reject(double err) nogil:
    cdef double fac
    fac = 0.9 * pow(err, -0.2)
    if fac > 1.0:
        fac = 1.0
    if fac < 0.2:
        fac = 0.2
    return fac


cdef int _dopri_core(int dim, int sys, double par_g, int which,
                     double* y, double t0, double t1,
                     double rtol, double atol, double h0, double max_step,
                     double[::1] t_out, double[:, ::1] y_out, int per_step,
                     double[::1] t_rec, int cap,
                     # tracer extras (ignored when sys == 0 or detect == 0)
                     int detect, double* start, double* nrm,
                     double smin, double close_tol,
                     long* nstep_out, long* nrej_out, double* t_reached,
                     double* s_close_out, double* gap_out) nogil:
    """Shared embedded 5(4) loop with dense output.

    sys 0: particle in the knot field (dim 6, parameter par_g).
    sys 1: unit-tangent field line at frozen time par_g (dim 3, which picks
           the magnetic or electric field); detect enables closure search
           against the plane through start with normal nrm.
    Records: per_step != 0 stores every accepted point into t_rec/y_out up
    to cap rows; otherwise stores dense evaluations at the t_out points.
    Returns a status code; counters and closure data via out-pointers.
    """
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double k5[6]
    cdef double k6[6]
    cdef double k7[6]
    cdef double ys[6]
    cdef double ynew[6]
    cdef double rc1[6]
    cdef double rc2[6]
    cdef double rc3[6]
    cdef double rc4[6]
    cdef double rc5[6]
    cdef double yint[6]
    cdef double dir_, h, t, err, err_old, sc, er, fac, t_new, ydiff, bspl
    cdef double p_prev, p_new, th, th1, lo, hi, mid, pv, gap2, s_star
    cdef long nstep = 0, nrej = 0
    cdef int i, bad, last, n_out, out_i, n_rec, it
    cdef int need_dense

    dir_ = 1.0 if t1 >= t0 else -1.0
    t = t0
    h = h0 * dir_
    if fabs(h) > max_step:
        h = max_step * dir_
    if fabs(h) > fabs(t1 - t0):
        h = t1 - t0
    err_old = 1e-4
    n_out = t_out.shape[0]
    out_i = 0
    n_rec = 0

    if sys == 0:
        bad = _particle_rhs(t, y, par_g, k1)
    else:
        bad = _line_rhs(par_g, y, which, k1)
    if bad != 0:
        return 1

    # initial records
    if per_step != 0:
        if n_rec < cap:
            t_rec[n_rec] = t
            for i in range(dim):
                y_out[n_rec, i] = y[i]
            n_rec += 1
    else:
        while out_i < n_out and t_out[out_i] == t0:
            t_rec[out_i] = t0
            for i in range(dim):
                y_out[out_i, i] = y[i]
            out_i += 1

    p_prev = 0.0
    s_close_out[0] = -1.0
    gap_out[0] = -1.0

    while (t - t1) * dir_ < 0.0:
        if nstep + nrej > 100000000:
            nstep_out[0] = nstep
            nrej_out[0] = nrej
            t_reached[0] = t
            return 3
        last = 0
        if (t + h - t1) * dir_ > 0.0:
            h = t1 - t
            last = 1

        for i in range(dim):
            ys[i] = y[i] + h * (A21 * k1[i])
        if sys == 0:
            bad = _particle_rhs(t + C2 * h, ys, par_g, k2)
        else:
            bad = _line_rhs(par_g, ys, which, k2)
        if bad == 0:
            for i in range(dim):
                ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
            if sys == 0:
                bad = _particle_rhs(t + C3 * h, ys, par_g, k3)
            else:
                bad = _line_rhs(par_g, ys, which, k3)
        if bad == 0:
            for i in range(dim):
                ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            if sys == 0:
                bad = _particle_rhs(t + C4 * h, ys, par_g, k4)
            else:
                bad = _line_rhs(par_g, ys, which, k4)
        if bad == 0:
            for i in range(dim):
                ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                    + A54 * k4[i])
            if sys == 0:
                bad = _particle_rhs(t + C5 * h, ys, par_g, k5)
            else:
                bad = _line_rhs(par_g, ys, which, k5)
        if bad == 0:
            for i in range(dim):
                ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                    + A64 * k4[i] + A65 * k5[i])
            if sys == 0:
                bad = _particle_rhs(t + h, ys, par_g, k6)
            else:
                bad = _line_rhs(par_g, ys, which, k6)
        if bad == 0:
            for i in range(dim):
                ynew[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i]
                                      + A75 * k5[i] + A76 * k6[i])
            if sys == 0:
                bad = _particle_rhs(t + h, ynew, par_g, k7)
            else:
                bad = _line_rhs(par_g, ynew, which, k7)

        if bad != 0:
            # a trial stage left the admissible region; shrink and retry
            nrej += 1
            h = 0.5 * h
            if fabs(h) < 1e-14 * (1.0 if fabs(t) < 1.0 else fabs(t)):
                nstep_out[0] = nstep
                nrej_out[0] = nrej
                t_reached[0] = t
                return 2
            continue

        err = 0.0
        for i in range(dim):
            er = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                      + E6 * k6[i] + E7 * k7[i])
            sc = fabs(y[i])
            if fabs(ynew[i]) > sc:
                sc = fabs(ynew[i])
            sc = atol + rtol * sc
            er = er / sc
            err += er * er
        err = sqrt(err / dim)

        if err <= 1.0:
            t_new = t1 if last != 0 else t + h
            need_dense = 0
            if per_step == 0 and out_i < n_out and (t_out[out_i] - t_new) * dir_ <= 0.0:
                need_dense = 1
            if detect != 0:
                need_dense = 1
            if need_dense != 0:
                for i in range(dim):
                    ydiff = ynew[i] - y[i]
                    bspl = h * k1[i] - ydiff
                    rc1[i] = y[i]
                    rc2[i] = ydiff
                    rc3[i] = bspl
                    rc4[i] = ydiff - h * k7[i] - bspl
                    rc5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i]
                                  + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            if per_step == 0:
                while out_i < n_out and (t_out[out_i] - t_new) * dir_ <= 0.0:
                    th = (t_out[out_i] - t) / h
                    th1 = 1.0 - th
                    for i in range(dim):
                        yint[i] = rc1[i] + th * (rc2[i] + th1 * (rc3[i]
                                  + th * (rc4[i] + th1 * rc5[i])))
                    t_rec[out_i] = t_out[out_i]
                    for i in range(dim):
                        y_out[out_i, i] = yint[i]
                    out_i += 1
            else:
                if n_rec < cap:
                    t_rec[n_rec] = t_new
                    for i in range(dim):
                        y_out[n_rec, i] = ynew[i]
                    n_rec += 1
                else:
                    nstep_out[0] = nstep
                    nrej_out[0] = nrej
                    t_reached[0] = t_new
                    return 3

            if detect != 0:
                p_new = (ynew[0] - start[0]) * nrm[0] + (ynew[1] - start[1]) * nrm[1] \
                        + (ynew[2] - start[2]) * nrm[2]
                if p_prev < 0.0 and p_new >= 0.0 and t_new > smin:
                    # bisect the dense interpolant for the plane crossing
                    lo = 0.0
                    hi = 1.0
                    for it in range(60):
                        mid = 0.5 * (lo + hi)
                        th = mid
                        th1 = 1.0 - th
                        pv = 0.0
                        for i in range(dim):
                            yint[i] = rc1[i] + th * (rc2[i] + th1 * (rc3[i]
                                      + th * (rc4[i] + th1 * rc5[i])))
                        pv = (yint[0] - start[0]) * nrm[0] + (yint[1] - start[1]) * nrm[1] \
                             + (yint[2] - start[2]) * nrm[2]
                        if pv < 0.0:
                            lo = mid
                        else:
                            hi = mid
                    th = hi
                    th1 = 1.0 - th
                    for i in range(dim):
                        yint[i] = rc1[i] + th * (rc2[i] + th1 * (rc3[i]
                                  + th * (rc4[i] + th1 * rc5[i])))
                    gap2 = (yint[0] - start[0]) * (yint[0] - start[0]) \
                           + (yint[1] - start[1]) * (yint[1] - start[1]) \
                           + (yint[2] - start[2]) * (yint[2] - start[2])
                    s_star = t + th * h
                    if sqrt(gap2) < close_tol and s_star > smin:
                        s_close_out[0] = s_star
                        gap_out[0] = sqrt(gap2)
                        nstep_out[0] = nstep + 1
                        nrej_out[0] = nrej
                        t_reached[0] = s_star
                        return 0
                p_prev = p_new

            t = t_new
            for i in range(dim):
                y[i] = ynew[i]
                k1[i] = k7[i]
            nstep += 1
            fac = _step_factor_accept(err, err_old)
            h = h * fac
            if fabs(h) > max_step:
                h = max_step * dir_
            err_old = err if err > 1e-4 else 1e-4
        else:
            nrej += 1
            fac = _step_factor_reject(err)
            h = h * fac
            if fabs(h) < 1e-14 * (1.0 if fabs(t) < 1.0 else fabs(t)):
                nstep_out[0] = nstep
                nrej_out[0] = nrej
                t_reached[0] = t
                return 2

    nstep_out[0] = nstep
    nrej_out[0] = nrej
    t_reached[0] = t
    if per_step != 0:
        # communicate the record count through s_close_out (unused otherwise)
        s_close_out[0] = n_rec
    return 0


def particle_push(y0_in, double t0, double t1, double g,
                  double rtol, double atol, double h0, double max_step,
                  t_out_in, int per_step, int cap):
    """Integrate one particle from t0 to t1.

    Returns (t_rec, y_rec, steps_taken, steps_rejected, status, t_reached).
    per_step nonzero records every accepted step (bounded by cap); otherwise
    the trajectory is sampled by dense output at the points of t_out_in,
    which must be monotone in the direction of integration.
    """
    cdef double[::1] y0 = np.ascontiguousarray(y0_in, dtype=np.float64)
    cdef double[::1] t_out = np.ascontiguousarray(t_out_in, dtype=np.float64)
    cdef double y[6]
    cdef double start[3]
    cdef double nrm[3]
    cdef long nstep = 0, nrej = 0
    cdef double t_reached = t0, s_close = -1.0, gap = -1.0
    cdef int status, i, nalloc
    if y0.shape[0] != 6:
        raise ValueError("state must have 6 components")
    for i in range(6):
        y[i] = y0[i]
    nalloc = cap if per_step != 0 else t_out.shape[0]
    t_rec_arr = np.empty(nalloc, dtype=np.float64)
    y_rec_arr = np.empty((nalloc, 6), dtype=np.float64)
    cdef double[::1] t_rec = t_rec_arr
    cdef double[:, ::1] y_rec = y_rec_arr
    with nogil:
        status = _dopri_core(6, 0, g, 0, y, t0, t1, rtol, atol, h0, max_step,
                             t_out, y_rec, per_step, t_rec, nalloc,
                             0, start, nrm, 0.0, 0.0,
                             &nstep, &nrej, &t_reached, &s_close, &gap)
    if per_step != 0 and status == 0:
        n = int(s_close)
        t_rec_arr = t_rec_arr[:n].copy()
        y_rec_arr = y_rec_arr[:n].copy()
    return t_rec_arr, y_rec_arr, nstep, nrej, status, t_reached


def trace_line(start_in, double t, int which, double rtol, double atol,
               double h0, double max_s, double smin, double close_tol,
               int n_points):
    """Trace one field line at frozen time t from start_in.

    Phase one runs closure detection (plane section through the start,
    crossing in the direction of the initial tangent, accepted when the
    curve re-enters the close_tol ball); phase two retraces and samples
    n_points positions by dense output. Returns (points, s_end, gap,
    closed, status).
    """
    cdef double[::1] s0 = np.ascontiguousarray(start_in, dtype=np.float64)
    cdef double y[3]
    cdef double start[3]
    cdef double nrm[3]
    cdef double f0[3]
    cdef long nstep = 0, nrej = 0
    cdef double s_reached = 0.0, s_close = -1.0, gap = -1.0
    cdef double s_end, gap_out, dx, dy, dz
    cdef int status, i, closed
    if s0.shape[0] != 3:
        raise ValueError("start must have 3 components")
    for i in range(3):
        y[i] = s0[i]
        start[i] = s0[i]
    if _line_rhs(t, start, which, f0) != 0:
        empty = np.empty((0, 3), dtype=np.float64)
        return empty, 0.0, -1.0, 0, 2
    for i in range(3):
        nrm[i] = f0[i]

    cdef double[::1] no_out = np.empty(0, dtype=np.float64)
    cdef double[:, ::1] no_y = np.empty((0, 3), dtype=np.float64)
    cdef double[::1] no_t = np.empty(0, dtype=np.float64)
    with nogil:
        status = _dopri_core(3, 1, t, which, y, 0.0, max_s, rtol, atol, h0,
                             max_s, no_out, no_y, 0, no_t, 0,
                             1, start, nrm, smin, close_tol,
                             &nstep, &nrej, &s_reached, &s_close, &gap)
    if status == 2 or status == 3:
        empty = np.empty((0, 3), dtype=np.float64)
        return empty, s_reached, -1.0, 0, 3

    if s_close > 0.0:
        closed = 1
        s_end = s_close
        gap_out = gap
    else:
        closed = 0
        s_end = s_reached

    # phase two: resample the curve uniformly in arclength
    s_out_arr = np.empty(n_points, dtype=np.float64)
    cdef double[::1] s_out = s_out_arr
    if closed != 0:
        for i in range(n_points):
            s_out[i] = s_end * i / n_points
    else:
        for i in range(n_points):
            s_out[i] = s_end * i / (n_points - 1)
    pts_arr = np.empty((n_points, 3), dtype=np.float64)
    cdef double[:, ::1] pts = pts_arr
    cdef double[::1] t_rec = np.empty(n_points, dtype=np.float64)
    for i in range(3):
        y[i] = s0[i]
    with nogil:
        status = _dopri_core(3, 1, t, which, y, 0.0, s_end, rtol, atol, h0,
                             max_s, s_out, pts, 0, t_rec, n_points,
                             0, start, nrm, 0.0, 0.0,
                             &nstep, &nrej, &s_reached, &s_close, &gap)
    if status != 0:
        empty = np.empty((0, 3), dtype=np.float64)
        return empty, s_reached, -1.0, 0, 3
    if closed == 0:
        dx = pts[n_points - 1, 0] - start[0]
        dy = pts[n_points - 1, 1] - start[1]
        dz = pts[n_points - 1, 2] - start[2]
        gap_out = sqrt(dx * dx + dy * dy + dz * dz)
        return pts_arr, s_end, gap_out, 0, 1
    return pts_arr, s_end, gap_out, 1, 0


def linking_sum(p1_in, p2_in):
    """Midpoint-rule Gauss double sum over two closed polylines.

    Vertices are cyclic (last connects back to first). Returns the raw
    linking value and the minimum vertex-to-vertex distance between the
    curves.
    """
    cdef double[:, ::1] p1 = np.ascontiguousarray(p1_in, dtype=np.float64)
    cdef double[:, ::1] p2 = np.ascontiguousarray(p2_in, dtype=np.float64)
    cdef int n1 = p1.shape[0]
    cdef int n2 = p2.shape[0]
    cdef int i, j, i2, j2
    cdef double total = 0.0, mind2 = 1e300
    cdef double m1x, m1y, m1z, d1x, d1y, d1z
    cdef double rx, ry, rz, r2, vx, vy, vz, v2, cxx, cyy, czz, triple
    if p1.shape[1] != 3 or p2.shape[1] != 3:
        raise ValueError("polylines must be (n, 3) arrays")
    m2_arr = np.empty((n2, 3), dtype=np.float64)
    d2_arr = np.empty((n2, 3), dtype=np.float64)
    cdef double[:, ::1] m2 = m2_arr
    cdef double[:, ::1] d2 = d2_arr
    for j in range(n2):
        j2 = j + 1 if j + 1 < n2 else 0
        m2[j, 0] = 0.5 * (p2[j, 0] + p2[j2, 0])
        m2[j, 1] = 0.5 * (p2[j, 1] + p2[j2, 1])
        m2[j, 2] = 0.5 * (p2[j, 2] + p2[j2, 2])
        d2[j, 0] = p2[j2, 0] - p2[j, 0]
        d2[j, 1] = p2[j2, 1] - p2[j, 1]
        d2[j, 2] = p2[j2, 2] - p2[j, 2]
    with nogil:
        for i in range(n1):
            i2 = i + 1 if i + 1 < n1 else 0
            m1x = 0.5 * (p1[i, 0] + p1[i2, 0])
            m1y = 0.5 * (p1[i, 1] + p1[i2, 1])
            m1z = 0.5 * (p1[i, 2] + p1[i2, 2])
            d1x = p1[i2, 0] - p1[i, 0]
            d1y = p1[i2, 1] - p1[i, 1]
            d1z = p1[i2, 2] - p1[i, 2]
            for j in range(n2):
                vx = p1[i, 0] - p2[j, 0]
                vy = p1[i, 1] - p2[j, 1]
                vz = p1[i, 2] - p2[j, 2]
                v2 = vx * vx + vy * vy + vz * vz
                if v2 < mind2:
                    mind2 = v2
                rx = m1x - m2[j, 0]
                ry = m1y - m2[j, 1]
                rz = m1z - m2[j, 2]
                r2 = rx * rx + ry * ry + rz * rz
                cxx = d1y * d2[j, 2] - d1z * d2[j, 1]
                cyy = d1z * d2[j, 0] - d1x * d2[j, 2]
                czz = d1x * d2[j, 1] - d1y * d2[j, 0]
                triple = cxx * rx + cyy * ry + czz * rz
                total += triple / (r2 * sqrt(r2))
    return total / FOUR_PI, sqrt(mind2)
