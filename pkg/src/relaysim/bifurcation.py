"""Voltage sweeps of the equilibria, stroke-limit case classification and the
hysteretic switching loop (quasi-static and by slow-ramp simulation)."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .equilibria import (
    Equilibrium,
    Stability,
    _fv_rest,
    continuous_equilibria,
    critical_points,
    hybrid_equilibria,
    steady_flux,
)
from .hybrid import EventKind, Mode, SimOptions, State, VoltageProfile, simulate
from .params import ActuatorParams, ModelError, ReluctanceModel


REFINE_TOL = 1e-6  # V
MATCH_FACTOR = 5.0
MIN_MATCH_STEP = 0.01  # normalized units
DOMAIN_EXIT_TOL = 1e-3  # relative to zs


class EndpointKind(str, enum.Enum):
    TANGENTIAL = "TangentialBifurcation"
    DOMAIN_EXIT = "DomainExit"
    LIFT_OFF = "LiftOff"


class SwitchingCase(str, enum.Enum):
    CASE1 = "Case1"  # upper stop beyond the spring rest position
    CASE2 = "Case2"  # upper stop between the fold gap and the rest position
    CASE3 = "Case3"  # upper stop below the fold gap: bistable relay


@dataclass(frozen=True)
class BranchPoint:
    u: float
    branch: int
    mode: Mode
    z: float
    phi: float
    stability: Stability


@dataclass(frozen=True)
class Annotation:
    u: float
    branch: int
    kind: EndpointKind


@dataclass
class Branch:
    id: int
    mode: Mode
    birth: float
    death: float
    birth_kind: EndpointKind | None = None
    death_kind: EndpointKind | None = None


@dataclass
class BranchData:
    records: list[BranchPoint] = field(default_factory=list)
    branches: dict[int, Branch] = field(default_factory=dict)
    annotations: list[Annotation] = field(default_factory=list)

    def branch_points(self, branch: int) -> list[BranchPoint]:
        return [r for r in self.records if r.branch == branch]

    def endpoint_voltages(self, kind: EndpointKind | None = None) -> list[float]:
        return sorted(a.u for a in self.annotations if kind is None or a.kind == kind)


@dataclass
class HysteresisLoop:
    up_u: np.ndarray
    up_z: np.ndarray
    down_u: np.ndarray
    down_z: np.ndarray
    closing_voltage: float | None
    opening_voltage: float | None


# -- sweep -----------------------------------------------------------------


def _solver(params, model, hybrid: bool, z_lo: float, z_hi: float):
    if hybrid:
        return lambda u: hybrid_equilibria(params, model, u)
    return lambda u: continuous_equilibria(params, model, u, z_lo, z_hi)


def _refine(count, u_absent: float, u_present: float, n_present: int) -> tuple[float, float]:
    """Bisect the voltage where ``count`` leaves ``n_present``; returns (boundary, present side)."""
    a, b = u_absent, u_present
    while abs(b - a) > REFINE_TOL:
        mid = 0.5 * (a + b)
        if count(mid) == n_present:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b), b


def sweep(
    params: ActuatorParams,
    model: ReluctanceModel,
    u_range: tuple[float, float],
    n_steps: int = 1001,
    hybrid: bool = False,
    z_lo: float = 0.0,
    z_hi: float = math.inf,
) -> BranchData:
    """Trace equilibrium branches over a voltage grid.

    Continuous sweeps look for motion-mode equilibria with gap in ``[z_lo, z_hi]``;
    hybrid sweeps use the device's stroke limits and all three modes.
    """
    u_lo, u_hi = map(float, u_range)
    if u_lo == u_hi:
        grid = np.array([u_lo])
    else:
        if n_steps < 2:
            raise ValueError("n_steps must be >= 2")
        grid = np.linspace(u_lo, u_hi, n_steps)
    solve = _solver(params, model, hybrid, z_lo, z_hi)
    phi_scale = math.sqrt(2 * params.ks * params.zs / params.kR)

    def coords(eq: Equilibrium):
        return np.array([eq.z / params.zs, eq.phi / phi_scale])

    def count(u, mode):
        return sum(1 for e in solve(u) if e.mode == mode)

    data = BranchData()
    active: dict[int, tuple[np.ndarray, float]] = {}
    pts: dict[int, list[tuple[int, Equilibrium]]] = {}
    mode_of: dict[int, Mode] = {}
    next_id = 0
    for k, u in enumerate(grid):
        eqs = solve(float(u))
        pairs = []
        for bid, (xy, last_step) in active.items():
            thr = MATCH_FACTOR * max(last_step, MIN_MATCH_STEP)
            for j, eq in enumerate(eqs):
                if eq.mode != mode_of[bid]:
                    continue
                d = float(np.linalg.norm(coords(eq) - xy))
                if d <= thr:
                    pairs.append((d, bid, j))
        pairs.sort()
        taken_b, taken_e = set(), set()
        new_active = {}
        for d, bid, j in pairs:
            if bid in taken_b or j in taken_e:
                continue
            taken_b.add(bid)
            taken_e.add(j)
            new_active[bid] = (coords(eqs[j]), d)
            pts[bid].append((k, eqs[j]))
        for j, eq in enumerate(eqs):
            if j not in taken_e:
                bid = next_id
                next_id += 1
                mode_of[bid] = eq.mode
                pts[bid] = [(k, eq)]
                new_active[bid] = (coords(eq), 0.0)
        active = new_active

    for bid, plist in pts.items():
        mode = mode_of[bid]
        k_first, first = plist[0]
        k_last, last = plist[-1]
        br = Branch(bid, mode, float(grid[k_first]), float(grid[k_last]))
        extra = []
        for k_end, end_eq, other_k, is_birth in (
            (k_first, first, k_first - 1, True),
            (k_last, last, k_last + 1, False),
        ):
            if not 0 <= other_k < len(grid):
                continue
            n_present = count(float(grid[k_end]), mode)
            u_star, u_side = _refine(
                lambda v: count(v, mode), float(grid[other_k]), float(grid[k_end]), n_present
            )
            near = [e for e in solve(u_side) if e.mode == mode]
            ref_eq = min(near, key=lambda e: np.linalg.norm(coords(e) - coords(end_eq)))
            kind = _endpoint_kind(params, mode, ref_eq, hybrid, z_lo, z_hi)
            extra.append(BranchPoint(u_side, bid, mode, ref_eq.z, ref_eq.phi, ref_eq.stability))
            data.annotations.append(Annotation(u_star, bid, kind))
            if is_birth:
                br.birth, br.birth_kind = u_star, kind
            else:
                br.death, br.death_kind = u_star, kind
        data.branches[bid] = br
        for _, eq in plist:
            data.records.append(BranchPoint(eq.u, bid, mode, eq.z, eq.phi, eq.stability))
        data.records.extend(extra)

    data.records.sort(key=lambda r: (r.u, r.branch))
    data.annotations.sort(key=lambda a: (a.u, a.branch))
    return data


def _endpoint_kind(params, mode, eq, hybrid, z_lo, z_hi) -> EndpointKind:
    if mode != Mode.MOTION:
        return EndpointKind.LIFT_OFF
    lo, hi = (params.z_min, params.z_max) if hybrid else (z_lo, z_hi)
    tol = DOMAIN_EXIT_TOL * params.zs
    if abs(eq.z - lo) < tol or (math.isfinite(hi) and abs(eq.z - hi) < tol):
        return EndpointKind.DOMAIN_EXIT
    return EndpointKind.TANGENTIAL


# -- case classification ---------------------------------------------------


def classify_case(params: ActuatorParams, model: ReluctanceModel) -> SwitchingCase:
    cp = critical_points(params, model)
    zb = cp.zb_sat if model.saturated else cp.zb
    if not params.z_min < zb:
        raise ModelError(f"z_min must lie below the fold gap {zb!r} (z_min={params.z_min!r})")
    if params.z_max > params.zs:
        return SwitchingCase.CASE1
    if params.z_max > zb:
        return SwitchingCase.CASE2
    return SwitchingCase.CASE3


# -- hysteresis ------------------------------------------------------------


def _holding_force(params, model, u, mode) -> float:
    """Net force pressing the resting armature onto its stop (>= 0 while it stays)."""
    z = params.z_max if mode == Mode.MAX_GAP else params.z_min
    fv = _fv_rest(params, z, steady_flux(params, model, z, u))
    return fv if mode == Mode.MAX_GAP else -fv


def _switch_voltage(params, model, mode, u_present, u_absent) -> float:
    a, b = u_absent, u_present
    while abs(b - a) > 1e-12 * max(1.0, abs(b)):
        mid = 0.5 * (a + b)
        if _holding_force(params, model, mid, mode) >= 0.0:
            b = mid
        else:
            a = mid
    return b


def hysteresis_quasistatic(
    params: ActuatorParams, model: ReluctanceModel, n_points: int = 401
) -> HysteresisLoop:
    """Loop traced by an arbitrarily slow up/down voltage sweep from rest at the upper stop."""
    if classify_case(params, model) != SwitchingCase.CASE3:
        raise ModelError("hysteresis loop requires a Case 3 (bistable) stroke")
    # bracket the lift-off from the upper stop
    top = 1.0
    while _holding_force(params, model, top, Mode.MAX_GAP) >= 0.0:
        top *= 2.0
    closing = _switch_voltage(params, model, Mode.MAX_GAP, 0.0, top)
    u_top = 1.2 * closing
    opening = _switch_voltage(params, model, Mode.MIN_GAP, u_top, 0.0)

    grid = np.linspace(0.0, u_top, n_points)
    below, above = grid[grid < closing], grid[grid > closing]
    up_u = np.concatenate([below, [closing, closing], above])
    up_z = np.concatenate(
        [np.full(len(below) + 1, params.z_max), np.full(len(above) + 1, params.z_min)]
    )
    desc = grid[::-1]
    above, below = desc[desc > opening], desc[desc < opening]
    down_u = np.concatenate([above, [opening, opening], below])
    down_z = np.concatenate(
        [np.full(len(above) + 1, params.z_min), np.full(len(below) + 1, params.z_max)]
    )
    return HysteresisLoop(up_u, up_z, down_u, down_z, closing, opening)


def _ramp_leg(params, model, q0, x0, u_start, rate, u_end, opts):
    t_end = abs(u_end - u_start) / abs(rate)
    prof = VoltageProfile.ramp(u_start, rate, u_end)
    return simulate(params, model, q0, x0, prof, t_end, opts), prof


def _run_dynamic(params, model, ramp_rate, u_peak, opts):
    leg_up, prof_up = _ramp_leg(
        params, model, Mode.MAX_GAP, State(params.z_max, 0.0, 0.0), 0.0, ramp_rate, u_peak, opts
    )
    leg_down, prof_down = _ramp_leg(
        params, model, leg_up.final_mode, leg_up.final_state, u_peak, -ramp_rate, 0.0, opts
    )
    closing = next(
        (prof_up(e.t) for e in leg_up.events if e.kind is EventKind.IMPACT_MIN), None
    )
    opening = next(
        (prof_down(e.t) for e in leg_down.events if e.kind is EventKind.LIFTOFF_MIN), None
    )
    loop = HysteresisLoop(
        up_u=np.array([prof_up(t) for t in leg_up.t]),
        up_z=leg_up.z.copy(),
        down_u=np.array([prof_down(t) for t in leg_down.t]),
        down_z=leg_down.z.copy(),
        closing_voltage=closing,
        opening_voltage=opening,
    )
    return loop


def hysteresis_dynamic(
    params: ActuatorParams,
    model: ReluctanceModel,
    ramp_rate: float,
    u_peak: float | None = None,
    opts: SimOptions | None = None,
    check_convergence: bool = False,
) -> HysteresisLoop:
    """Switching loop from a time-domain simulation of a slow ramp up and back down.

    Starts de-energized at the upper stop. The closing voltage is read at the
    impact on the lower stop, the opening voltage at lift-off from it.
    """
    if not ramp_rate > 0:
        raise ValueError("ramp_rate must be > 0")
    if u_peak is None:
        closing = critical_points(params, model).closing_voltage(model.saturated)
        if closing is None:
            raise ModelError("no lift-off from the upper stop for this stroke")
        u_peak = 1.2 * closing
    if opts is None:
        opts = SimOptions(output_dt=u_peak / ramp_rate / 2000)
    loop = _run_dynamic(params, model, ramp_rate, u_peak, opts)
    if check_convergence:
        half = _run_dynamic(params, model, 0.5 * ramp_rate, u_peak, opts)
        for name in ("closing_voltage", "opening_voltage"):
            a, b = getattr(loop, name), getattr(half, name)
            if a is not None and b is not None and abs(a - b) > 0.01 * abs(b):
                warnings.warn(
                    f"{name} moved by more than 1% when halving the ramp rate "
                    f"({a:.6g} V vs {b:.6g} V); ramp is not quasi-static",
                    RuntimeWarning,
                    stacklevel=2,
                )
    return loop
