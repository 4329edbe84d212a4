"""Three-mode hybrid automaton of a switching actuator and its event-driven simulator.

Modes: 1 = resting at the maximum gap, 2 = free motion, 3 = resting at the
minimum gap. Impacts are purely inelastic (the velocity is reset to zero).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .magnetics import core_reluctance, force
from .params import ActuatorParams, DomainError, ReluctanceModel


class SimulationError(RuntimeError):
    """The simulator could not continue (flux breach, step underflow, chattering...)."""


class Mode(enum.IntEnum):
    MAX_GAP = 1
    MOTION = 2
    MIN_GAP = 3


class EventKind(str, enum.Enum):
    IMPACT_MIN = "ImpactMin"
    IMPACT_MAX = "ImpactMax"
    LIFTOFF_MIN = "LiftOffMin"
    LIFTOFF_MAX = "LiftOffMax"


_KIND_OF_CODE = {
    K.IMPACT_MIN: EventKind.IMPACT_MIN,
    K.IMPACT_MAX: EventKind.IMPACT_MAX,
    K.LIFTOFF_MIN: EventKind.LIFTOFF_MIN,
    K.LIFTOFF_MAX: EventKind.LIFTOFF_MAX,
}


class State(NamedTuple):
    z: float  # gap, m
    v: float  # velocity, m/s
    phi: float = 0.0  # flux, Wb


@dataclass(frozen=True)
class VoltageProfile:
    """Supply voltage as a function of time (V)."""

    kind: str
    values: tuple[float, ...]

    @classmethod
    def constant(cls, u: float) -> "VoltageProfile":
        return cls("constant", (float(u),))

    @classmethod
    def step(cls, t_switch: float, u_before: float, u_after: float) -> "VoltageProfile":
        return cls("step", (float(t_switch), float(u_before), float(u_after)))

    @classmethod
    def ramp(cls, u_start: float, rate: float, u_end: float | None = None) -> "VoltageProfile":
        end = math.nan if u_end is None else float(u_end)
        return cls("ramp", (float(u_start), float(rate), end))

    def pack(self) -> np.ndarray:
        code = {"constant": 0, "step": 1, "ramp": 2}[self.kind]
        return np.array((code,) + self.values, dtype=np.float64)

    def __call__(self, t: float) -> float:
        return K.voltage(self.pack(), float(t))

    def breakpoints(self) -> list[float]:
        """Times where the profile is not smooth."""
        if self.kind == "step":
            return [self.values[0]]
        if self.kind == "ramp":
            u0, rate, end = self.values
            if not math.isnan(end) and rate != 0.0:
                tb = (end - u0) / rate
                if tb > 0:
                    return [tb]
        return []


@dataclass
class SimOptions:
    rtol: float = 1e-8
    atol: float = 1e-12
    event_tol: float = 1e-10  # s
    output_dt: float = 1e-4  # s
    h_min: float = 1e-15  # s
    max_chatter: int = 10


@dataclass(frozen=True)
class Event:
    t: float
    kind: EventKind
    before: State
    after: State
    mode_before: Mode
    mode_after: Mode


@dataclass
class Trajectory:
    t: np.ndarray
    q: np.ndarray
    z: np.ndarray
    v: np.ndarray
    phi: np.ndarray
    i: np.ndarray
    force: np.ndarray
    events: list[Event] = field(default_factory=list)

    def __len__(self):
        return len(self.t)

    @property
    def final_mode(self) -> Mode:
        return Mode(int(self.q[-1]))

    @property
    def final_state(self) -> State:
        return State(float(self.z[-1]), float(self.v[-1]), float(self.phi[-1]))

    def event_kinds(self) -> list[EventKind]:
        return [e.kind for e in self.events]


def pack_params(params: ActuatorParams, model: ReluctanceModel) -> np.ndarray:
    phi_sat = math.inf if model.phi_sat is None else model.phi_sat
    return np.array(
        [params.R, params.N, params.R0, params.kR, params.m, params.ks, params.zs,
         params.c, params.z_min, params.z_max, phi_sat],
        dtype=np.float64,
    )


def _fv(params: ActuatorParams, x: State) -> float:
    return (force(params, x.phi) - params.ks * (x.z - params.zs) - params.c * x.v) / params.m


def _fphi(params: ActuatorParams, model: ReluctanceModel, x: State, u: float) -> float:
    rel = core_reluctance(model, params, x.phi) + params.kR * x.z
    return u / params.N - params.R / params.N**2 * x.phi * rel


def in_flow_set(q: int, x: State, params: ActuatorParams, model: ReluctanceModel) -> bool:
    """Membership of ``x`` in the flow set of mode ``q``."""
    if not abs(x.phi) < model.flux_limit:
        return False
    if q == Mode.MAX_GAP:
        return x.z == params.z_max and x.v == 0.0
    if q == Mode.MOTION:
        return params.z_min <= x.z <= params.z_max and math.isfinite(x.v)
    if q == Mode.MIN_GAP:
        return x.z == params.z_min and x.v == 0.0
    return False


def flow(q: int, x: State, u: float, params: ActuatorParams, model: ReluctanceModel) -> State:
    """Time derivative ``(dz/dt, dv/dt, dphi/dt)`` of the flow of mode ``q``."""
    x = State(*x)
    if not in_flow_set(q, x, params, model):
        raise DomainError(f"state {tuple(x)} is not in the flow set of mode {int(q)}")
    dphi = _fphi(params, model, x, u)
    if q == Mode.MOTION:
        return State(x.v, _fv(params, x), dphi)
    return State(0.0, 0.0, dphi)


def jump(
    q: int, x: State, u: float, params: ActuatorParams, model: ReluctanceModel
) -> tuple[State, Mode] | None:
    """Jump map applied when ``x`` lies in the jump set of mode ``q``, else ``None``.

    ``u`` is accepted for interface symmetry; the jump sets do not depend on it.
    """
    x = State(*x)
    if q == Mode.MAX_GAP:
        return (x, Mode.MOTION) if _fv(params, x) < 0 else None
    if q == Mode.MIN_GAP:
        return (x, Mode.MOTION) if _fv(params, x) > 0 else None
    if q == Mode.MOTION:
        if x.z == params.z_max and x.v >= 0:
            return State(x.z, 0.0, x.phi), Mode.MAX_GAP
        if x.z == params.z_min and x.v <= 0:
            return State(x.z, 0.0, x.phi), Mode.MIN_GAP
    return None


def _pending_jump(q: Mode, x: State, params: ActuatorParams) -> EventKind | None:
    """Jump that must be taken before flowing from ``x``.

    Boundary states of mode 2 at rest whose acceleration points into the
    interior are allowed to flow; taking the jump there would only bounce
    straight back.
    """
    fv = _fv(params, x)
    if q == Mode.MAX_GAP:
        return EventKind.LIFTOFF_MAX if fv < 0 else None
    if q == Mode.MIN_GAP:
        return EventKind.LIFTOFF_MIN if fv > 0 else None
    if x.z <= params.z_min and (x.v < 0 or (x.v == 0 and fv <= 0)):
        return EventKind.IMPACT_MIN
    if x.z >= params.z_max and (x.v > 0 or (x.v == 0 and fv >= 0)):
        return EventKind.IMPACT_MAX
    return None


def _apply(kind: EventKind, x: State, params: ActuatorParams) -> tuple[State, State, Mode]:
    """Returns (state before, state after, destination mode); ``before`` is put on the stop."""
    if kind is EventKind.IMPACT_MIN:
        before = State(params.z_min, x.v, x.phi)
        return before, State(params.z_min, 0.0, x.phi), Mode.MIN_GAP
    if kind is EventKind.IMPACT_MAX:
        before = State(params.z_max, x.v, x.phi)
        return before, State(params.z_max, 0.0, x.phi), Mode.MAX_GAP
    return x, x, Mode.MOTION


def simulate(
    params: ActuatorParams,
    model: ReluctanceModel,
    q0: int,
    x0: State,
    u: VoltageProfile,
    t_end: float,
    opts: SimOptions | None = None,
) -> Trajectory:
    """Run the automaton from ``(q0, x0)`` over ``[0, t_end]``."""
    opts = opts or SimOptions()
    q = Mode(q0)
    x = State(*map(float, x0))
    if not t_end > 0:
        raise ValueError("t_end must be > 0")
    if not in_flow_set(q, x, params, model):
        raise DomainError(f"initial state {tuple(x)} is not in the flow set of mode {int(q)}")

    p = pack_params(params, model)
    prof = u.pack()
    n_out = max(1, int(math.ceil(t_end / opts.output_dt - 1e-9)))
    t_out = np.minimum(np.arange(n_out + 1) * opts.output_dt, t_end)
    stops = sorted(set(b for b in u.breakpoints() if 0 < b < t_end))

    rows = [(0.0, int(q), *x)]
    events: list[Event] = []
    t = 0.0
    xa = np.array(x, dtype=np.float64)
    h = min(1e-6, opts.output_dt)
    k_out = 1
    chatter = 0
    last_jump_t = -1.0

    while k_out <= n_out:
        x = State(*xa.tolist())
        kind = _pending_jump(q, x, params)
        if kind is not None:
            chatter = chatter + 1 if t == last_jump_t else 1
            last_jump_t = t
            if chatter > opts.max_chatter:
                raise SimulationError(f"chattering jumps at t={t!r}")
            before, after, q_next = _apply(kind, x, params)
            events.append(Event(t, kind, before, after, q, q_next))
            q = q_next
            xa[:] = after
            h = min(h, 1e-7)
            continue

        t_stop = float(t_out[k_out])
        for b in stops:
            if t < b < t_stop:
                t_stop = b
                break
        status, code, t_new, h = K.advance(
            int(q), t, xa, h, t_stop, p, prof,
            opts.rtol, opts.atol, opts.event_tol, opts.h_min,
        )
        if status == K.REACHED:
            t = t_stop
            if t_stop == t_out[k_out]:
                rows.append((t, int(q), *xa.tolist()))
                k_out += 1
        elif status == K.EVENT:
            t = t_new
            kind = _KIND_OF_CODE[code]
            before, after, q_next = _apply(kind, State(*xa.tolist()), params)
            chatter = chatter + 1 if t == last_jump_t else 1
            last_jump_t = t
            events.append(Event(t, kind, before, after, q, q_next))
            q = q_next
            xa[:] = after
            h = min(h, 1e-7)
        elif status == K.FLUX_BREACH:
            raise SimulationError(f"flux reached the saturation limit near t={t!r}")
        elif status == K.STEP_UNDERFLOW:
            raise SimulationError(f"step size underflow at t={t!r}")
        else:
            raise SimulationError(f"event localization did not converge at t={t!r}")

    arr = np.array(rows, dtype=np.float64)
    tt, qq, zz, vv, pp = arr.T
    rel = params.R0 / (1.0 - np.abs(pp) / p[10]) + params.kR * zz
    return Trajectory(
        t=tt,
        q=qq.astype(np.int64),
        z=zz,
        v=vv,
        phi=pp,
        i=pp * rel / params.N,
        force=-0.5 * params.kR * pp**2,
        events=events,
    )
