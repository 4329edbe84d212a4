"""Equilibria of the continuous and hybrid dynamics, their stability, and the
closed-form switching/bifurcation voltages.

With ``v = 0`` an equilibrium of the motion mode is an intersection of the
force-balance parabola ``z = zs - kR phi**2 / (2 ks)`` with the steady
electrical curve ``phi * R(z, phi) = N u / R``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .hybrid import Mode
from .magnetics import core_reluctance, mmf_dphi
from .params import ActuatorParams, ModelError, ReluctanceModel

IMAG_TOL = 1e-9
BOUNDARY_TOL = 1e-12  # relative to zs


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class Equilibrium:
    mode: Mode
    z: float
    phi: float
    u: float
    stability: Stability
    branch: str

    @property
    def v(self) -> float:
        return 0.0


@dataclass(frozen=True)
class CriticalPoints:
    """Switching and bifurcation voltages of a device.

    The ``*_sat`` fields are filled only for the saturation model. ``u_max`` and
    ``phi_max`` are ``None`` when the upper stop is beyond the spring rest position.
    """

    u0: float
    phi0: float
    ub: float
    zb: float
    phib: float
    u_min: float
    phi_min: float
    u_max: float | None
    phi_max: float | None
    u0_sat: float | None = None
    ub_sat: float | None = None
    zb_sat: float | None = None
    phib_sat: float | None = None
    u_min_sat: float | None = None
    u_max_sat: float | None = None

    def closing_voltage(self, saturated: bool) -> float | None:
        return self.u_max_sat if saturated else self.u_max

    def opening_voltage(self, saturated: bool) -> float | None:
        return self.u_min_sat if saturated else self.u_min


# -- small helpers ---------------------------------------------------------


def _parabola_z(params: ActuatorParams, phi):
    return params.zs - params.kR * np.square(phi) / (2.0 * params.ks)


def _fv_rest(params: ActuatorParams, z: float, phi: float) -> float:
    return (-0.5 * params.kR * phi * phi - params.ks * (z - params.zs)) / params.m


def _fphi(params, model, z, phi, u):
    rel = core_reluctance(model, params, phi) + params.kR * z
    return u / params.N - params.R / params.N**2 * phi * rel


def _rtsafe(f, df, a, b, xtol=0.0, maxiter=200):
    """Newton iteration safeguarded by bisection on a sign-changing bracket."""
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        raise ValueError("root not bracketed")
    lo, hi = (a, b) if fa < 0 else (b, a)
    x = 0.5 * (a + b)
    dx_old = abs(b - a)
    dx = dx_old
    fx, dfx = f(x), df(x)
    for _ in range(maxiter):
        newton_ok = dfx != 0 and ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) < 0
        if not newton_ok or abs(2 * fx) > abs(dx_old * dfx):
            dx_old, dx = dx, 0.5 * (hi - lo)
            x = lo + dx
        else:
            dx_old, dx = dx, fx / dfx
            x_prev = x
            x = x - dx
            if x == x_prev:
                return x
        if abs(dx) <= xtol + 4 * np.finfo(float).eps * abs(x):
            return x
        fx, dfx = f(x), df(x)
        if fx == 0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
    return x


def scaled_residual(params: ActuatorParams, model: ReluctanceModel, eq: Equilibrium) -> float:
    """Residual of the active mode's flow at ``eq``, in dimensionless units."""
    phi0 = math.sqrt(2 * params.ks * params.zs / params.kR)
    rv = abs(_fv_rest(params, eq.z, eq.phi)) * params.m / (params.ks * params.zs)
    rphi = abs(_fphi(params, model, eq.z, eq.phi, eq.u)) * params.N**2 / (
        params.R * phi0 * (params.R0 + params.kR * params.zs)
    )
    return rphi if eq.mode != Mode.MOTION else max(rv, rphi)


# -- steady flux -----------------------------------------------------------


def steady_flux(params: ActuatorParams, model: ReluctanceModel, z: float, u: float) -> float:
    """Flux at which the coil voltage balances the resistive drop at fixed gap ``z``."""
    if z < 0:
        raise ValueError(f"gap must be non-negative (z={z!r})")
    b = params.N * abs(u) / params.R
    if b == 0:
        return 0.0
    sign = math.copysign(1.0, u)
    if model.phi_sat is None:
        return sign * b / (params.R0 + params.kR * z)
    # phi*(R0/(1-s) + kR z) = b with s = |phi|/phi_sat is a quadratic in s
    ps = model.phi_sat
    a2 = -params.kR * z
    a1 = params.R0 + params.kR * z + b / ps
    a0 = -b / ps
    s = -2.0 * a0 / (a1 + math.sqrt(a1 * a1 - 4.0 * a2 * a0))
    s = min(s, 1.0 - 1e-16)
    # one Newton polish on the original equation
    phi = s * ps
    g = phi * (params.R0 / (1 - s) + params.kR * z) - b
    dg = params.R0 / (1 - s) ** 2 + params.kR * z
    phi = phi - g / dg
    return sign * min(phi, model.flux_limit)


# -- linearization ---------------------------------------------------------


def jacobian(params: ActuatorParams, model: ReluctanceModel, x, u: float) -> np.ndarray:
    """Analytic Jacobian of the motion-mode flow w.r.t. ``(z, v, phi)``."""
    z, _, phi = x
    d_mmf = mmf_dphi(model, params, z, phi)
    g = params.R / params.N**2
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [-params.ks / params.m, -params.c / params.m, -params.kR * phi / params.m],
            [-g * params.kR * phi, 0.0, -g * d_mmf],
        ]
    )


def classify_stability(J) -> Stability:
    """Lyapunov's indirect method on the eigenvalues of ``J``."""
    J = np.asarray(J, dtype=float)
    if not np.all(np.isfinite(J)):
        raise ValueError("Jacobian has non-finite entries")
    lam = np.linalg.eigvals(J)
    eps = 1e-9 * max(1.0, float(np.max(np.abs(lam))))
    re = lam.real
    if np.all(re < -eps):
        return Stability.STABLE
    if np.any(re > eps):
        return Stability.UNSTABLE
    return Stability.MARGINAL


# -- continuous (motion mode) equilibria -----------------------------------


def _flux_window(params: ActuatorParams, z_lo: float, z_hi: float) -> tuple[float, float] | None:
    """|phi| range whose force-balance gap lies in ``[z_lo, z_hi]``."""
    top = 2 * params.ks * (params.zs - z_lo) / params.kR
    if top < 0:
        return None
    bottom = 2 * params.ks * (params.zs - z_hi) / params.kR if math.isfinite(z_hi) else 0.0
    return math.sqrt(max(bottom, 0.0)), math.sqrt(top)


def _basic_roots(params: ActuatorParams, u: float) -> list[float]:
    """Real roots of the force-balance cubic, via companion-matrix eigenvalues."""
    phi0 = math.sqrt(2 * params.ks * params.zs / params.kR)
    r_s = params.R0 + params.kR * params.zs
    # phi = phi0 * s:  kR zs s^3 - (R0 + kR zs) s + N u / (R phi0) = 0
    coeffs = np.array([params.kR * params.zs, 0.0, -r_s, params.N * u / (params.R * phi0)]) / r_s
    roots = np.roots(coeffs)
    scale = max(1.0, float(np.max(np.abs(roots))))
    out = []
    for r in roots:
        if abs(r.imag) < IMAG_TOL * scale:
            s = r.real
            for _ in range(3):
                p = ((coeffs[0] * s) * s + coeffs[2]) * s + coeffs[3]
                dp = 3 * coeffs[0] * s * s + coeffs[2]
                if dp == 0:
                    break
                s -= p / dp
            out.append(s * phi0)
    return sorted(out)


def _sat_roots(params: ActuatorParams, model: ReluctanceModel, u: float, lo: float, hi: float):
    """Roots of the saturated force-balance equation with |phi| in ``[lo, hi]``."""
    ps = model.phi_sat
    kR, ks = params.kR, params.ks
    a = 1.5 * kR * kR / ks
    b = params.N * u / params.R

    def g(phi):
        s = 1 - abs(phi) / ps
        return phi * (params.R0 / s + kR * (params.zs - kR * phi * phi / (2 * ks))) - b

    def dg(phi):
        s = 1 - abs(phi) / ps
        return params.R0 / (s * s) + kR * params.zs - a * phi * phi

    def d2g(phi):
        s = 1 - abs(phi) / ps
        return 2 * params.R0 * math.copysign(1.0, phi) / (ps * s**3) - 2 * a * phi

    hi = min(hi, model.flux_limit)
    if lo > hi:
        return []
    # turning points of g on [0, hi] split it into monotone pieces (dg is even)
    grid = np.linspace(0.0, hi, 4001)
    grid = np.unique(np.concatenate([grid, hi - (hi - lo) * np.geomspace(1e-12, 1e-3, 40), [lo]]))
    grid = grid[(grid >= 0) & (grid <= hi)]
    sg = 1 - grid / ps
    dvals = params.R0 / (sg * sg) + kR * params.zs - a * grid * grid
    turns = []
    for i in np.nonzero(np.sign(dvals[:-1]) * np.sign(dvals[1:]) < 0)[0]:
        turns.append(_rtsafe(dg, d2g, grid[i], grid[i + 1]))
    roots = []
    for sign in (1.0, -1.0):
        knots = sorted({lo, hi, *[t for t in turns if lo < t < hi]})
        for a_, b_ in zip(knots[:-1], knots[1:]):
            xa, xb = sign * a_, sign * b_
            ga, gb = g(xa), g(xb)
            if ga == 0:
                roots.append(xa)
            elif ga * gb < 0:
                roots.append(_rtsafe(g, dg, min(xa, xb), max(xa, xb)))
        if g(sign * hi) == 0:
            roots.append(sign * hi)
    out = []
    for r in sorted(roots):
        if not out or abs(r - out[-1]) > 1e-14 * ps:
            out.append(r)
    return out


def continuous_equilibria(
    params: ActuatorParams,
    model: ReluctanceModel,
    u: float,
    z_lo: float = 0.0,
    z_hi: float = math.inf,
) -> list[Equilibrium]:
    """Motion-mode equilibria at supply ``u`` with gap in ``[z_lo, z_hi]``, sorted by flux."""
    if z_lo < 0:
        raise ValueError("z_lo must be >= 0")
    window = _flux_window(params, z_lo, z_hi)
    if window is None:
        return []
    if model.phi_sat is None:
        phis = _basic_roots(params, u)
    else:
        phis = _sat_roots(params, model, u, *window)
    tol = BOUNDARY_TOL * params.zs
    found = []
    for phi in phis:
        z = float(_parabola_z(params, phi))
        if z < z_lo - tol or z > z_hi + tol or abs(phi) >= model.flux_limit:
            continue
        z = min(max(z, z_lo), z_hi)
        st = classify_stability(jacobian(params, model, (z, 0.0, phi), u))
        found.append((float(phi), z, st))
    return [
        Equilibrium(Mode.MOTION, z, phi, float(u), st, f"motion-{k}")
        for k, (phi, z, st) in enumerate(found)
    ]


# -- hybrid equilibria -----------------------------------------------------


def _stop_equilibrium(params, model, mode: Mode, z: float, u: float) -> Equilibrium | None:
    phi = steady_flux(params, model, z, u)
    fv = _fv_rest(params, z, phi)
    # a resting state survives while the net force keeps it pressed on the stop
    outward = fv if mode == Mode.MAX_GAP else -fv
    tol = 1e-9 * params.ks * params.zs / params.m
    if outward < -tol:
        return None
    contracting = mmf_dphi(model, params, z, phi) > 0
    if outward > tol and contracting:
        st = Stability.STABLE
    elif contracting:
        st = Stability.MARGINAL
    else:
        st = Stability.UNSTABLE
    name = "max-stop" if mode == Mode.MAX_GAP else "min-stop"
    return Equilibrium(mode, z, phi, float(u), st, name)


def hybrid_equilibria(params: ActuatorParams, model: ReluctanceModel, u: float) -> list[Equilibrium]:
    """Equilibria of all three modes at constant supply ``u``."""
    out = []
    if math.isfinite(params.z_max):
        eq = _stop_equilibrium(params, model, Mode.MAX_GAP, params.z_max, u)
        if eq is not None:
            out.append(eq)
    tol = BOUNDARY_TOL * params.zs
    for eq in continuous_equilibria(params, model, u, params.z_min, params.z_max):
        # states resting on a stop belong to the jump set of the motion mode
        if params.z_min + tol < eq.z < params.z_max - tol:
            out.append(eq)
    eq = _stop_equilibrium(params, model, Mode.MIN_GAP, params.z_min, u)
    if eq is not None:
        out.append(eq)
    return out


# -- critical points -------------------------------------------------------


def _sat_fold(params: ActuatorParams, model: ReluctanceModel, z0: float, phi0: float, u0: float):
    """Newton on {f_v = 0, f_phi = 0, det(df/dx) = 0} in scaled (z, phi, u)."""
    ps = model.phi_sat
    R, N, R0, kR, ks, zs = params.R, params.N, params.R0, params.kR, params.ks, params.zs
    zsc, psc, usc = zs, phi0, u0

    def F(w):
        z, phi, u = w[0] * zsc, w[1] * psc, w[2] * usc
        s = 1 - abs(phi) / ps
        return np.array([
            (-0.5 * kR * phi**2 - ks * (z - zs)) / (ks * zs),
            (phi * (R0 / s + kR * z) - N * u / R) / (R0 * psc),
            (ks * (R0 / s**2 + kR * z) - kR**2 * phi**2) / (ks * R0),
        ])

    def dF(w):
        z, phi = w[0] * zsc, w[1] * psc
        s = 1 - abs(phi) / ps
        sg = math.copysign(1.0, phi)
        return np.array([
            [-ks * zsc / (ks * zs), -kR * phi * psc / (ks * zs), 0.0],
            [phi * kR * zsc / (R0 * psc), (R0 / s**2 + kR * z) * psc / (R0 * psc),
             -N * usc / R / (R0 * psc)],
            [ks * kR * zsc / (ks * R0),
             (2 * ks * R0 * sg / (ps * s**3) - 2 * kR**2 * phi) * psc / (ks * R0), 0.0],
        ])

    w = np.array([z0 / zsc, phi0 / psc, u0 / usc])
    for _ in range(100):
        f = F(w)
        norm = np.linalg.norm(f)
        if norm < 1e-15:
            break
        step = np.linalg.solve(dF(w), -f)
        lam = 1.0
        # damped: halve until the residual decreases and phi stays admissible
        while lam > 1e-10:
            trial = w + lam * step
            if abs(trial[1] * psc) < ps and np.linalg.norm(F(trial)) < norm:
                break
            lam *= 0.5
        w = w + lam * step
        if np.max(np.abs(lam * step)) < 1e-15:
            break
    if np.linalg.norm(F(w)) > 1e-10:
        raise ArithmeticError("saturated fold point did not converge")
    return float(w[0] * zsc), float(w[1] * psc), float(w[2] * usc)


def critical_points(params: ActuatorParams, model: ReluctanceModel) -> CriticalPoints:
    """Closed-form switching and bifurcation voltages (numerical fold for saturation)."""
    R, N, R0, kR, ks, zs = params.R, params.N, params.R0, params.kR, params.ks, params.zs
    phi0 = math.sqrt(2 * ks * zs / kR)
    u0 = R * R0 / N * phi0
    r_s = R0 + kR * zs
    ub = 2 * R * math.sqrt(6 * ks * r_s**3) / (9 * N * kR)
    zb = 2.0 / 3.0 * zs - R0 / (3 * kR)
    phib = math.sqrt(6 * ks * r_s) / (3 * kR)
    if params.z_min >= zs:
        raise ModelError("z_min must be below the spring rest position")
    phi_min = math.sqrt(2 * ks * (zs - params.z_min) / kR)
    u_min = R * (R0 + kR * params.z_min) / N * phi_min
    if params.z_max < zs:
        phi_max = math.sqrt(2 * ks * (zs - params.z_max) / kR)
        u_max = R * (R0 + kR * params.z_max) / N * phi_max
    else:
        phi_max = u_max = None
    if model.phi_sat is None:
        return CriticalPoints(u0, phi0, ub, zb, phib, u_min, phi_min, u_max, phi_max)

    ps = model.phi_sat
    if not ps > phi0:
        raise ModelError(
            f"saturation analysis needs phi_sat > phi0 (phi_sat={ps!r}, phi0={phi0!r})"
        )
    u0_sat = u0 / (1 - phi0 / ps)
    u_min_sat = R * phi_min / N * (R0 / (1 - phi_min / ps) + kR * params.z_min)
    u_max_sat = None
    if phi_max is not None:
        u_max_sat = R * phi_max / N * (R0 / (1 - phi_max / ps) + kR * params.z_max)
    zb_sat, phib_sat, ub_sat = _sat_fold(params, model, zb, phib, ub)
    return CriticalPoints(
        u0, phi0, ub, zb, phib, u_min, phi_min, u_max, phi_max,
        u0_sat=u0_sat, ub_sat=ub_sat, zb_sat=zb_sat, phib_sat=phib_sat,
        u_min_sat=u_min_sat, u_max_sat=u_max_sat,
    )
