"""Pure-Python twin of the compiled integrator core.

Same entry points, argument order and semantics as the Cython module; plain
float arithmetic in the loop so results match the compiled kernels to
rounding.  Status codes: 0 completed, 1 stopped at a LOS crossing, 2 non-finite
state (arrays truncated at the last valid sample).  LOS codes: 0 none,
1 crossed the upper bound, 2 crossed the lower bound, 3 full revolution.
"""

from math import cos, isfinite, pi, sin

import numpy as np

COMPILED = False

_TWO_PI = 2.0 * pi


def _check_los(delta, lo, hi, ref, use_bounds):
    if use_bounds:
        if delta > hi:
            return 1
        if delta < lo:
            return 2
    elif abs(delta - ref) > _TWO_PI:
        return 3
    return 0


def integrate_reduced(
    delta0,
    domega0,
    n_steps,
    dt,
    a,
    b,
    phi,
    d,
    teq,
    omega_b,
    lo,
    hi,
    ref,
    use_bounds,
    stop_on_los,
):
    """Fixed-step RK4 on the sine-form model plus the dissipation quadrature."""
    n = int(n_steps)
    delta_arr = np.empty(n + 1)
    domega_arr = np.empty(n + 1)
    edis_arr = np.empty(n + 1)
    x, y, z = float(delta0), float(domega0), 0.0
    wb_d = omega_b * d
    inv_teq = 1.0 / teq
    status = 0
    los_idx = -1
    los_code = 0
    k = 0
    while True:
        delta_arr[k] = x
        domega_arr[k] = y
        edis_arr[k] = z
        if los_idx < 0:
            code = _check_los(x, lo, hi, ref, use_bounds)
            if code:
                los_idx, los_code = k, code
                if stop_on_los:
                    status = 1
                    break
        if k == n:
            break
        k1x = omega_b * y
        k1y = (a + b * sin(x + phi) - d * cos(x) * y) * inv_teq
        k1z = wb_d * cos(x) * y * y
        x2 = x + 0.5 * dt * k1x
        y2 = y + 0.5 * dt * k1y
        k2x = omega_b * y2
        k2y = (a + b * sin(x2 + phi) - d * cos(x2) * y2) * inv_teq
        k2z = wb_d * cos(x2) * y2 * y2
        x3 = x + 0.5 * dt * k2x
        y3 = y + 0.5 * dt * k2y
        k3x = omega_b * y3
        k3y = (a + b * sin(x3 + phi) - d * cos(x3) * y3) * inv_teq
        k3z = wb_d * cos(x3) * y3 * y3
        x4 = x + dt * k3x
        y4 = y + dt * k3y
        k4x = omega_b * y4
        k4y = (a + b * sin(x4 + phi) - d * cos(x4) * y4) * inv_teq
        k4z = wb_d * cos(x4) * y4 * y4
        h6 = dt / 6.0
        x += h6 * (k1x + 2.0 * (k2x + k3x) + k4x)
        y += h6 * (k1y + 2.0 * (k2y + k3y) + k4y)
        z += h6 * (k1z + 2.0 * (k2z + k3z) + k4z)
        if not (isfinite(x) and isfinite(y)):
            status = 2
            break
        k += 1
    return (
        delta_arr[: k + 1],
        domega_arr[: k + 1],
        edis_arr[: k + 1],
        status,
        los_idx,
        los_code,
    )


def integrate_full(
    thg0,
    omg0,
    thp0,
    xi0,
    n_steps,
    dt,
    omega_b,
    omega_0,
    tg,
    pm,
    kp,
    ki,
    ug,
    phig,
    c_uq,
    ugi,
    c_pg,
    pgs,
    d_aux,
    lo,
    hi,
    ref,
    use_bounds,
    stop_on_los,
):
    """Fixed-step RK4 on the four-state machine/loop model.

    ``c_uq`` is the constant part of the q-axis voltage, ``c_pg`` the constant
    angle offset in the machine power term; ``d_aux`` scales the dissipation
    quadrature (0 disables it).
    """
    n = int(n_steps)
    thg_arr = np.empty(n + 1)
    omg_arr = np.empty(n + 1)
    thp_arr = np.empty(n + 1)
    xi_arr = np.empty(n + 1)
    edis_arr = np.empty(n + 1)
    thg, omg, thp, xi = float(thg0), float(omg0), float(thp0), float(xi0)
    z = 0.0
    wb_d = omega_b * d_aux
    inv_tg = 1.0 / tg
    status = 0
    los_idx = -1
    los_code = 0
    k = 0
    while True:
        thg_arr[k] = thg
        omg_arr[k] = omg
        thp_arr[k] = thp
        xi_arr[k] = xi
        edis_arr[k] = z
        if los_idx < 0:
            code = _check_los(thp - thg - phig, lo, hi, ref, use_bounds)
            if code:
                los_idx, los_code = k, code
                if stop_on_los:
                    status = 1
                    break
        if k == n:
            break

        def f(s0, s1, s2, s3):
            delta = s2 - s0 - phig
            uq = c_uq - ug * sin(delta)
            omp = omega_0 + kp * uq + s3
            pg = pgs - ugi * cos(delta + c_pg)
            dw = omp - s1
            return (
                omega_b * (s1 - omega_0),
                (pm - pg) * inv_tg,
                omega_b * (omp - omega_0),
                ki * uq,
                wb_d * cos(delta) * dw * dw,
            )

        a1, b1, c1, d1, e1 = f(thg, omg, thp, xi)
        h2 = 0.5 * dt
        a2, b2, c2, d2, e2 = f(thg + h2 * a1, omg + h2 * b1, thp + h2 * c1, xi + h2 * d1)
        a3, b3, c3, d3, e3 = f(thg + h2 * a2, omg + h2 * b2, thp + h2 * c2, xi + h2 * d2)
        a4, b4, c4, d4, e4 = f(thg + dt * a3, omg + dt * b3, thp + dt * c3, xi + dt * d3)
        h6 = dt / 6.0
        thg += h6 * (a1 + 2.0 * (a2 + a3) + a4)
        omg += h6 * (b1 + 2.0 * (b2 + b3) + b4)
        thp += h6 * (c1 + 2.0 * (c2 + c3) + c4)
        xi += h6 * (d1 + 2.0 * (d2 + d3) + d4)
        z += h6 * (e1 + 2.0 * (e2 + e3) + e4)
        if not (
            isfinite(thg) and isfinite(omg) and isfinite(thp) and isfinite(xi)
        ):
            status = 2
            break
        k += 1
    return (
        thg_arr[: k + 1],
        omg_arr[: k + 1],
        thp_arr[: k + 1],
        xi_arr[: k + 1],
        edis_arr[: k + 1],
        status,
        los_idx,
        los_code,
    )
