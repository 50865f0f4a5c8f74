# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integrator core: fixed-step RK4 hot loops.

Twin of ``_kernels_py``; see that module for the argument and status-code
contract.
"""

from libc.math cimport cos, fabs, isfinite, sin

import numpy as np

COMPILED = True

cdef double TWO_PI = 6.283185307179586476925287


cdef inline int _check_los(double delta, double lo, double hi, double ref,
                           bint use_bounds) nogil:
    if use_bounds:
        if delta > hi:
            return 1
        if delta < lo:
            return 2
    elif fabs(delta - ref) > TWO_PI:
        return 3
    return 0


def integrate_reduced(double delta0, double domega0, Py_ssize_t n_steps,
                      double dt, double a, double b, double phi, double d,
                      double teq, double omega_b, double lo, double hi,
                      double ref, bint use_bounds, bint stop_on_los):
    cdef Py_ssize_t n = n_steps
    delta_arr = np.empty(n + 1)
    domega_arr = np.empty(n + 1)
    edis_arr = np.empty(n + 1)
    cdef double[::1] dv = delta_arr
    cdef double[::1] wv = domega_arr
    cdef double[::1] ev = edis_arr
    cdef double x = delta0, y = domega0, z = 0.0
    cdef double wb_d = omega_b * d
    cdef double inv_teq = 1.0 / teq
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef double k1x, k1y, k1z, k2x, k2y, k2z, k3x, k3y, k3z, k4x, k4y, k4z
    cdef double x2, y2, x3, y3, x4, y4
    cdef int status = 0, los_code = 0, code
    cdef Py_ssize_t los_idx = -1, k = 0
    while True:
        dv[k] = x
        wv[k] = y
        ev[k] = z
        if los_idx < 0:
            code = _check_los(x, lo, hi, ref, use_bounds)
            if code:
                los_idx = k
                los_code = code
                if stop_on_los:
                    status = 1
                    break
        if k == n:
            break
        k1x = omega_b * y
        k1y = (a + b * sin(x + phi) - d * cos(x) * y) * inv_teq
        k1z = wb_d * cos(x) * y * y
        x2 = x + h2 * k1x
        y2 = y + h2 * k1y
        k2x = omega_b * y2
        k2y = (a + b * sin(x2 + phi) - d * cos(x2) * y2) * inv_teq
        k2z = wb_d * cos(x2) * y2 * y2
        x3 = x + h2 * k2x
        y3 = y + h2 * k2y
        k3x = omega_b * y3
        k3y = (a + b * sin(x3 + phi) - d * cos(x3) * y3) * inv_teq
        k3z = wb_d * cos(x3) * y3 * y3
        x4 = x + dt * k3x
        y4 = y + dt * k3y
        k4x = omega_b * y4
        k4y = (a + b * sin(x4 + phi) - d * cos(x4) * y4) * inv_teq
        k4z = wb_d * cos(x4) * y4 * y4
        x += h6 * (k1x + 2.0 * (k2x + k3x) + k4x)
        y += h6 * (k1y + 2.0 * (k2y + k3y) + k4y)
        z += h6 * (k1z + 2.0 * (k2z + k3z) + k4z)
        if not (isfinite(x) and isfinite(y)):
            status = 2
            break
        k += 1
    return (delta_arr[: k + 1], domega_arr[: k + 1], edis_arr[: k + 1],
            status, los_idx, los_code)


def integrate_full(double thg0, double omg0, double thp0, double xi0,
                   Py_ssize_t n_steps, double dt, double omega_b,
                   double omega_0, double tg, double pm, double kp, double ki,
                   double ug, double phig, double c_uq, double ugi,
                   double c_pg, double pgs, double d_aux, double lo,
                   double hi, double ref, bint use_bounds, bint stop_on_los):
    cdef Py_ssize_t n = n_steps
    thg_arr = np.empty(n + 1)
    omg_arr = np.empty(n + 1)
    thp_arr = np.empty(n + 1)
    xi_arr = np.empty(n + 1)
    edis_arr = np.empty(n + 1)
    cdef double[::1] gv = thg_arr
    cdef double[::1] ov = omg_arr
    cdef double[::1] pv = thp_arr
    cdef double[::1] xv = xi_arr
    cdef double[::1] ev = edis_arr
    cdef double thg = thg0, omg = omg0, thp = thp0, xi = xi0, z = 0.0
    cdef double wb_d = omega_b * d_aux
    cdef double inv_tg = 1.0 / tg
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef double delta, uq, omp, pg, dw
    cdef double a1, b1, c1, d1, e1, a2, b2, c2, d2, e2
    cdef double a3, b3, c3, d3, e3, a4, b4, c4, d4, e4
    cdef double s0, s1, s2, s3
    cdef int status = 0, los_code = 0, code
    cdef Py_ssize_t los_idx = -1, k = 0
    while True:
        gv[k] = thg
        ov[k] = omg
        pv[k] = thp
        xv[k] = xi
        ev[k] = z
        if los_idx < 0:
            code = _check_los(thp - thg - phig, lo, hi, ref, use_bounds)
            if code:
                los_idx = k
                los_code = code
                if stop_on_los:
                    status = 1
                    break
        if k == n:
            break
        # stage 1
        delta = thp - thg - phig
        uq = c_uq - ug * sin(delta)
        omp = omega_0 + kp * uq + xi
        pg = pgs - ugi * cos(delta + c_pg)
        dw = omp - omg
        a1 = omega_b * (omg - omega_0)
        b1 = (pm - pg) * inv_tg
        c1 = omega_b * (omp - omega_0)
        d1 = ki * uq
        e1 = wb_d * cos(delta) * dw * dw
        # stage 2
        s0 = thg + h2 * a1
        s1 = omg + h2 * b1
        s2 = thp + h2 * c1
        s3 = xi + h2 * d1
        delta = s2 - s0 - phig
        uq = c_uq - ug * sin(delta)
        omp = omega_0 + kp * uq + s3
        pg = pgs - ugi * cos(delta + c_pg)
        dw = omp - s1
        a2 = omega_b * (s1 - omega_0)
        b2 = (pm - pg) * inv_tg
        c2 = omega_b * (omp - omega_0)
        d2 = ki * uq
        e2 = wb_d * cos(delta) * dw * dw
        # stage 3
        s0 = thg + h2 * a2
        s1 = omg + h2 * b2
        s2 = thp + h2 * c2
        s3 = xi + h2 * d2
        delta = s2 - s0 - phig
        uq = c_uq - ug * sin(delta)
        omp = omega_0 + kp * uq + s3
        pg = pgs - ugi * cos(delta + c_pg)
        dw = omp - s1
        a3 = omega_b * (s1 - omega_0)
        b3 = (pm - pg) * inv_tg
        c3 = omega_b * (omp - omega_0)
        d3 = ki * uq
        e3 = wb_d * cos(delta) * dw * dw
        # stage 4
        s0 = thg + dt * a3
        s1 = omg + dt * b3
        s2 = thp + dt * c3
        s3 = xi + dt * d3
        delta = s2 - s0 - phig
        uq = c_uq - ug * sin(delta)
        omp = omega_0 + kp * uq + s3
        pg = pgs - ugi * cos(delta + c_pg)
        dw = omp - s1
        a4 = omega_b * (s1 - omega_0)
        b4 = (pm - pg) * inv_tg
        c4 = omega_b * (omp - omega_0)
        d4 = ki * uq
        e4 = wb_d * cos(delta) * dw * dw

        thg += h6 * (a1 + 2.0 * (a2 + a3) + a4)
        omg += h6 * (b1 + 2.0 * (b2 + b3) + b4)
        thp += h6 * (c1 + 2.0 * (c2 + c3) + c4)
        xi += h6 * (d1 + 2.0 * (d2 + d3) + d4)
        z += h6 * (e1 + 2.0 * (e2 + e3) + e4)
        if not (isfinite(thg) and isfinite(omg) and isfinite(thp) and isfinite(xi)):
            status = 2
            break
        k += 1
    return (thg_arr[: k + 1], omg_arr[: k + 1], thp_arr[: k + 1],
            xi_arr[: k + 1], edis_arr[: k + 1], status, los_idx, los_code)
