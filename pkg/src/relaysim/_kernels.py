"""Hot loops of the hybrid simulator: flow evaluation, Dormand-Prince steps and
guard-crossing localization.

Everything here works on flat float64 arrays so the same source runs under
numba or as plain Python (see ``_jit``).

Packed parameter vector ``p``::

    0 R   1 N   2 R0   3 kR   4 m   5 ks   6 zs   7 c   8 z_min   9 z_max   10 phi_sat

``phi_sat = inf`` selects the basic reluctance law.

Packed voltage profile ``prof``::

    [0, u]                       constant
    [1, t_switch, u_before, u_after]  step
    [2, u_start, rate, u_end]    ramp, u_end = nan for no clamp
"""

import math

import numpy as np

from ._jit import njit

# advance() status codes
REACHED = 0
EVENT = 1
FLUX_BREACH = 2
STEP_UNDERFLOW = 3
LOCALIZATION_FAILED = 4

# guard codes
NO_EVENT = 0
IMPACT_MIN = 1
IMPACT_MAX = 2
LIFTOFF_MAX = 3
LIFTOFF_MIN = 4

FLUX_MARGIN = 1e-12
MAX_BISECTIONS = 200

# Dormand-Prince 5(4)
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0
)
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0


@njit
def voltage(prof, t):
    kind = int(prof[0])
    if kind == 0:
        return prof[1]
    if kind == 1:
        return prof[2] if t < prof[1] else prof[3]
    u = prof[1] + prof[2] * t
    end = prof[3]
    if not math.isnan(end):
        if prof[2] >= 0.0 and u > end:
            u = end
        elif prof[2] < 0.0 and u < end:
            u = end
    return u


@njit
def accel(z, v, phi, p):
    return (-0.5 * p[3] * phi * phi - p[5] * (z - p[6]) - p[7] * v) / p[4]


@njit
def flux_rate(z, phi, u, p):
    rel = p[2] / (1.0 - abs(phi) / p[10]) + p[3] * z
    return u / p[1] - p[0] / (p[1] * p[1]) * phi * rel


@njit
def rhs(mode, t, x, p, prof, out):
    u = voltage(prof, t)
    out[2] = flux_rate(x[0], x[2], u, p)
    if mode == 2:
        out[0] = x[1]
        out[1] = accel(x[0], x[1], x[2], p)
    else:
        out[0] = 0.0
        out[1] = 0.0


@njit
def dp_step(mode, t, x, h, p, prof, k, xs, xnew):
    """One Dormand-Prince step; 5th-order result in ``xnew``, error estimate in ``k[7]``."""
    rhs(mode, t, x, p, prof, k[0])
    for i in range(3):
        xs[i] = x[i] + h * A21 * k[0, i]
    rhs(mode, t + C2 * h, xs, p, prof, k[1])
    for i in range(3):
        xs[i] = x[i] + h * (A31 * k[0, i] + A32 * k[1, i])
    rhs(mode, t + C3 * h, xs, p, prof, k[2])
    for i in range(3):
        xs[i] = x[i] + h * (A41 * k[0, i] + A42 * k[1, i] + A43 * k[2, i])
    rhs(mode, t + C4 * h, xs, p, prof, k[3])
    for i in range(3):
        xs[i] = x[i] + h * (A51 * k[0, i] + A52 * k[1, i] + A53 * k[2, i] + A54 * k[3, i])
    rhs(mode, t + C5 * h, xs, p, prof, k[4])
    for i in range(3):
        xs[i] = x[i] + h * (
            A61 * k[0, i] + A62 * k[1, i] + A63 * k[2, i] + A64 * k[3, i] + A65 * k[4, i]
        )
    rhs(mode, t + h, xs, p, prof, k[5])
    for i in range(3):
        xnew[i] = x[i] + h * (
            B1 * k[0, i] + B3 * k[2, i] + B4 * k[3, i] + B5 * k[4, i] + B6 * k[5, i]
        )
    rhs(mode, t + h, xnew, p, prof, k[6])
    for i in range(3):
        k[7, i] = h * (
            E1 * k[0, i] + E3 * k[2, i] + E4 * k[3, i] + E5 * k[4, i]
            + E6 * k[5, i] + E7 * k[6, i]
        )


@njit
def crossed(mode, x, p):
    """Guard code of the jump set that ``x`` has entered while flowing in ``mode``."""
    if mode == 2:
        if x[0] < p[8]:
            return IMPACT_MIN
        if x[0] > p[9]:
            return IMPACT_MAX
        return NO_EVENT
    fv = accel(x[0], 0.0, x[2], p)
    if mode == 1 and fv < 0.0:
        return LIFTOFF_MAX
    if mode == 3 and fv > 0.0:
        return LIFTOFF_MIN
    return NO_EVENT


@njit
def advance(mode, t, x, h, t_stop, p, prof, rtol, atol, event_tol, hmin):
    """Integrate ``mode``'s flow from ``t`` until ``t_stop`` or the first guard crossing.

    ``x`` is updated in place. Returns ``(status, guard_code, t, h_next)``; on
    ``EVENT`` the state is the first localized point inside the jump set.
    """
    k = np.empty((8, 3))
    xs = np.empty(3)
    xnew = np.empty(3)
    xb = np.empty(3)
    flux_lim = p[10] * (1.0 - FLUX_MARGIN)
    while t < t_stop:
        remaining = t_stop - t
        last = h >= remaining
        hs = remaining if last else h
        dp_step(mode, t, x, hs, p, prof, k, xs, xnew)
        if abs(xnew[2]) >= flux_lim or math.isnan(xnew[2]):
            if hs <= hmin:
                return FLUX_BREACH, NO_EVENT, t, hs
            h = 0.25 * hs
            continue
        err = 0.0
        for i in range(3):
            sc = atol + rtol * max(abs(x[i]), abs(xnew[i]))
            e = abs(k[7, i]) / sc
            if e > err:
                err = e
        if err > 1.0:
            if hs <= hmin:
                return STEP_UNDERFLOW, NO_EVENT, t, hs
            h = max(hmin, hs * max(0.2, 0.9 * err ** -0.2))
            continue
        code = crossed(mode, xnew, p)
        if code != NO_EVENT:
            # bisection on the fraction of the accepted step
            lo = 0.0
            hi = 1.0
            it = 0
            while (hi - lo) * hs > event_tol:
                it += 1
                if it > MAX_BISECTIONS:
                    return LOCALIZATION_FAILED, code, t, hs
                mid = 0.5 * (lo + hi)
                dp_step(mode, t, x, mid * hs, p, prof, k, xs, xb)
                c_mid = crossed(mode, xb, p)
                if c_mid != NO_EVENT:
                    hi = mid
                    code = c_mid
                    for i in range(3):
                        xnew[i] = xb[i]
                else:
                    lo = mid
            for i in range(3):
                x[i] = xnew[i]
            return EVENT, code, t + hi * hs, h
        for i in range(3):
            x[i] = xnew[i]
        t = t_stop if last else t + hs
        if not last:
            if err == 0.0:
                h = 5.0 * hs
            else:
                h = hs * min(5.0, max(0.2, 0.9 * err ** -0.2))
    return REACHED, NO_EVENT, t, h
