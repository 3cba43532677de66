"""Pure Python twin of the compiled kernels in _kernels.pyx.

Every expression here mirrors the Cython source line for line, in the same
evaluation order, so both backends produce bit-identical floating point
results (the extension is built with fp-contract off to keep that true).
Slow but dependency-free; selected automatically when the extension is
missing, or explicitly via HOPFKNOT_BACKEND=python.
"""

from math import sqrt, pow as _pow, fabs

import numpy as np

C2 = 0.2
C3 = 0.3
C4 = 0.8
C5 = 8.0 / 9.0
A21 = 0.2
A31 = 3.0 / 40.0
A32 = 9.0 / 40.0
A41 = 44.0 / 45.0
A42 = -56.0 / 15.0
A43 = 32.0 / 9.0
A51 = 19372.0 / 6561.0
A52 = -25360.0 / 2187.0
A53 = 64448.0 / 6561.0
A54 = -212.0 / 729.0
A61 = 9017.0 / 3168.0
A62 = -355.0 / 33.0
A63 = 46732.0 / 5247.0
A64 = 49.0 / 176.0
A65 = -5103.0 / 18656.0
A71 = 35.0 / 384.0
A73 = 500.0 / 1113.0
A74 = 125.0 / 192.0
A75 = -2187.0 / 6784.0
A76 = 11.0 / 84.0
E1 = 71.0 / 57600.0
E3 = -71.0 / 16695.0
E4 = 71.0 / 1920.0
E5 = -17253.0 / 339200.0
E6 = 22.0 / 525.0
E7 = -1.0 / 40.0
D1 = -12715105075.0 / 11282082432.0
D3 = 87487479700.0 / 32700410799.0
D4 = -10690763975.0 / 1880347072.0
D5 = 701980252875.0 / 199316789632.0
D6 = -1453857185.0 / 822651844.0
D7 = 69997945.0 / 29380423.0

FOUR_PI = 12.566370614359172


def _field(x, y, z, t):
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
    b = ((q * h10 + p * h20) * inv,
         (q * h11 + p * h21) * inv,
         (q * h12 + p * h22) * inv)
    e = ((q * h20 - p * h10) * inv,
         (q * h21 - p * h11) * inv,
         (q * h22 - p * h12) * inv)
    return b, e


def field_eval(x, y, z, t):
    """Scalar field evaluation; returns (bx, by, bz, ex, ey, ez)."""
    b, e = _field(float(x), float(y), float(z), float(t))
    return (b[0], b[1], b[2], e[0], e[1], e[2])


def _particle_rhs(t, y, g, f):
    vx = y[3]
    vy = y[4]
    vz = y[5]
    v2 = vx * vx + vy * vy + vz * vz
    if v2 >= 1.0:
        return -1
    b, e = _field(y[0], y[1], y[2], t)
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


def _line_rhs(t_fixed, y, which, f):
    b, e = _field(y[0], y[1], y[2], t_fixed)
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


def _step_factor_accept(err, err_old):
    if err <= 1e-30:
        return 10.0
    fac = 0.9 * _pow(err, -0.14) * _pow(err_old, 0.08)
    if fac > 10.0:
        fac = 10.0
    if fac < 0.2:
        fac = 0.2
    return fac


def _step_factor_reject(err):
    fac = 0.9 * _pow(err, -0.2)
    if fac > 1.0:
        fac = 1.0
    if fac < 0.2:
        fac = 0.2
    return fac


def _dopri_core(dim, sys, par_g, which, y, t0, t1, rtol, atol, h0, max_step,
                t_out, y_out, per_step, t_rec, cap,
                detect, start, nrm, smin, close_tol, ctr):
    """Twin of the compiled stepping loop.

    ctr is a dict receiving nstep, nrej, t_reached, s_close, gap (the
    compiled version uses out-pointers). Returns the status code.
    """
    k1 = [0.0] * 6
    k2 = [0.0] * 6
    k3 = [0.0] * 6
    k4 = [0.0] * 6
    k5 = [0.0] * 6
    k6 = [0.0] * 6
    k7 = [0.0] * 6
    ys = [0.0] * 6
    ynew = [0.0] * 6
    rc1 = [0.0] * 6
    rc2 = [0.0] * 6
    rc3 = [0.0] * 6
    rc4 = [0.0] * 6
    rc5 = [0.0] * 6
    yint = [0.0] * 6
    nstep = 0
    nrej = 0

    dir_ = 1.0 if t1 >= t0 else -1.0
    t = t0
    h = h0 * dir_
    if fabs(h) > max_step:
        h = max_step * dir_
    if fabs(h) > fabs(t1 - t0):
        h = t1 - t0
    err_old = 1e-4
    n_out = len(t_out)
    out_i = 0
    n_rec = 0

    if sys == 0:
        bad = _particle_rhs(t, y, par_g, k1)
    else:
        bad = _line_rhs(par_g, y, which, k1)
    if bad != 0:
        ctr.update(nstep=nstep, nrej=nrej, t_reached=t, s_close=-1.0, gap=-1.0)
        return 1

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
    ctr.update(s_close=-1.0, gap=-1.0)

    while (t - t1) * dir_ < 0.0:
        if nstep + nrej > 100000000:
            ctr.update(nstep=nstep, nrej=nrej, t_reached=t)
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
            nrej += 1
            h = 0.5 * h
            if fabs(h) < 1e-14 * (1.0 if fabs(t) < 1.0 else fabs(t)):
                ctr.update(nstep=nstep, nrej=nrej, t_reached=t)
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
                    ctr.update(nstep=nstep, nrej=nrej, t_reached=t_new)
                    return 3

            if detect != 0:
                p_new = (ynew[0] - start[0]) * nrm[0] + (ynew[1] - start[1]) * nrm[1] \
                        + (ynew[2] - start[2]) * nrm[2]
                if p_prev < 0.0 and p_new >= 0.0 and t_new > smin:
                    lo = 0.0
                    hi = 1.0
                    for _ in range(60):
                        mid = 0.5 * (lo + hi)
                        th = mid
                        th1 = 1.0 - th
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
                        ctr.update(nstep=nstep + 1, nrej=nrej, t_reached=s_star,
                                   s_close=s_star, gap=sqrt(gap2))
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
                ctr.update(nstep=nstep, nrej=nrej, t_reached=t)
                return 2

    ctr.update(nstep=nstep, nrej=nrej, t_reached=t)
    if per_step != 0:
        ctr["n_rec"] = n_rec
    return 0


def particle_push(y0_in, t0, t1, g, rtol, atol, h0, max_step,
                  t_out_in, per_step, cap):
    """Integrate one particle from t0 to t1; see the compiled twin."""
    y0 = np.ascontiguousarray(y0_in, dtype=np.float64)
    t_out = [float(v) for v in np.ascontiguousarray(t_out_in, dtype=np.float64)]
    if y0.shape[0] != 6:
        raise ValueError("state must have 6 components")
    y = [float(v) for v in y0]
    nalloc = cap if per_step != 0 else len(t_out)
    t_rec_arr = np.empty(nalloc, dtype=np.float64)
    y_rec_arr = np.empty((nalloc, 6), dtype=np.float64)
    ctr = {"nstep": 0, "nrej": 0, "t_reached": t0, "s_close": -1.0, "gap": -1.0}
    status = _dopri_core(6, 0, float(g), 0, y, float(t0), float(t1),
                         float(rtol), float(atol), float(h0), float(max_step),
                         t_out, y_rec_arr, per_step, t_rec_arr, nalloc,
                         0, None, None, 0.0, 0.0, ctr)
    if per_step != 0 and status == 0:
        n = ctr["n_rec"]
        t_rec_arr = t_rec_arr[:n].copy()
        y_rec_arr = y_rec_arr[:n].copy()
    return (t_rec_arr, y_rec_arr, ctr["nstep"], ctr["nrej"], status,
            ctr["t_reached"])


def trace_line(start_in, t, which, rtol, atol, h0, max_s, smin, close_tol,
               n_points):
    """Trace one field line at frozen time t; see the compiled twin."""
    s0 = np.ascontiguousarray(start_in, dtype=np.float64)
    if s0.shape[0] != 3:
        raise ValueError("start must have 3 components")
    start = [float(v) for v in s0]
    y = list(start)
    f0 = [0.0, 0.0, 0.0]
    if _line_rhs(float(t), start, which, f0) != 0:
        return np.empty((0, 3), dtype=np.float64), 0.0, -1.0, 0, 2
    nrm = list(f0)

    ctr = {"nstep": 0, "nrej": 0, "t_reached": 0.0, "s_close": -1.0, "gap": -1.0}
    dummy_y = np.empty((0, 3), dtype=np.float64)
    dummy_t = np.empty(0, dtype=np.float64)
    status = _dopri_core(3, 1, float(t), which, y, 0.0, float(max_s),
                         float(rtol), float(atol), float(h0), float(max_s),
                         [], dummy_y, 0, dummy_t, 0,
                         1, start, nrm, float(smin), float(close_tol), ctr)
    if status == 2 or status == 3:
        return np.empty((0, 3), dtype=np.float64), ctr["t_reached"], -1.0, 0, 3

    s_close = ctr["s_close"]
    if s_close > 0.0:
        closed = 1
        s_end = s_close
        gap_out = ctr["gap"]
    else:
        closed = 0
        s_end = ctr["t_reached"]

    if closed != 0:
        s_out = [s_end * i / n_points for i in range(n_points)]
    else:
        s_out = [s_end * i / (n_points - 1) for i in range(n_points)]
    pts_arr = np.empty((n_points, 3), dtype=np.float64)
    t_rec = np.empty(n_points, dtype=np.float64)
    y = list(start)
    ctr = {"nstep": 0, "nrej": 0, "t_reached": 0.0, "s_close": -1.0, "gap": -1.0}
    status = _dopri_core(3, 1, float(t), which, y, 0.0, float(s_end),
                         float(rtol), float(atol), float(h0), float(max_s),
                         s_out, pts_arr, 0, t_rec, n_points,
                         0, start, nrm, 0.0, 0.0, ctr)
    if status != 0:
        return np.empty((0, 3), dtype=np.float64), ctr["t_reached"], -1.0, 0, 3
    if closed == 0:
        dx = pts_arr[n_points - 1, 0] - start[0]
        dy = pts_arr[n_points - 1, 1] - start[1]
        dz = pts_arr[n_points - 1, 2] - start[2]
        gap_out = sqrt(dx * dx + dy * dy + dz * dz)
        return pts_arr, s_end, gap_out, 0, 1
    return pts_arr, s_end, gap_out, 1, 0


def linking_sum(p1_in, p2_in):
    """Midpoint-rule Gauss double sum; see the compiled twin."""
    p1 = np.ascontiguousarray(p1_in, dtype=np.float64)
    p2 = np.ascontiguousarray(p2_in, dtype=np.float64)
    if p1.shape[1] != 3 or p2.shape[1] != 3:
        raise ValueError("polylines must be (n, 3) arrays")
    n1 = p1.shape[0]
    n2 = p2.shape[0]
    q1 = [(float(p1[i, 0]), float(p1[i, 1]), float(p1[i, 2])) for i in range(n1)]
    q2 = [(float(p2[j, 0]), float(p2[j, 1]), float(p2[j, 2])) for j in range(n2)]
    m2 = []
    d2 = []
    for j in range(n2):
        j2 = j + 1 if j + 1 < n2 else 0
        m2.append((0.5 * (q2[j][0] + q2[j2][0]),
                   0.5 * (q2[j][1] + q2[j2][1]),
                   0.5 * (q2[j][2] + q2[j2][2])))
        d2.append((q2[j2][0] - q2[j][0],
                   q2[j2][1] - q2[j][1],
                   q2[j2][2] - q2[j][2]))
    total = 0.0
    mind2 = 1e300
    for i in range(n1):
        i2 = i + 1 if i + 1 < n1 else 0
        m1x = 0.5 * (q1[i][0] + q1[i2][0])
        m1y = 0.5 * (q1[i][1] + q1[i2][1])
        m1z = 0.5 * (q1[i][2] + q1[i2][2])
        d1x = q1[i2][0] - q1[i][0]
        d1y = q1[i2][1] - q1[i][1]
        d1z = q1[i2][2] - q1[i][2]
        for j in range(n2):
            vx = q1[i][0] - q2[j][0]
            vy = q1[i][1] - q2[j][1]
            vz = q1[i][2] - q2[j][2]
            v2 = vx * vx + vy * vy + vz * vz
            if v2 < mind2:
                mind2 = v2
            rx = m1x - m2[j][0]
            ry = m1y - m2[j][1]
            rz = m1z - m2[j][2]
            r2 = rx * rx + ry * ry + rz * rz
            cxx = d1y * d2[j][2] - d1z * d2[j][1]
            cyy = d1z * d2[j][0] - d1x * d2[j][2]
            czz = d1x * d2[j][1] - d1y * d2[j][0]
            triple = cxx * rx + cyy * ry + czz * rz
            total += triple / (r2 * sqrt(r2))
    return total / FOUR_PI, sqrt(mind2)
