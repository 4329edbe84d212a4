"""INI-style run configuration: device parameters plus optional analysis blocks.

Values are SI base units; an optional unit suffix is accepted (``zs = 15 mm``); conversion
happens here, nothing downstream sees non-SI numbers.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .hybrid import Mode, SimOptions, State, VoltageProfile
from .params import ActuatorParams, ModelError, ReluctanceModel


class ConfigError(ValueError):
    pass


_UNITS = {
    "": 1.0,
    "m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6,
    "Wb": 1.0, "mWb": 1e-3, "uWb": 1e-6, "µWb": 1e-6,
    "kg": 1.0, "g": 1e-3,
    "s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6,
    "V": 1.0, "mV": 1e-3, "V/s": 1.0,
    "ohm": 1.0, "Ohm": 1.0, "Ω": 1.0,
    "N/m": 1.0, "Ns/m": 1.0, "N*s/m": 1.0, "1/H": 1.0, "1/(H*m)": 1.0,
}

_ACTUATOR_KEYS = {"model", "R", "N", "R0", "kR", "phi_sat", "m", "ks", "zs", "c", "z_min", "z_max"}
_SECTIONS = {
    "actuator": _ACTUATOR_KEYS,
    "simulation": {
        "t_end", "output_dt", "rtol", "atol", "event_tol", "q0", "z0", "v0", "phi0",
        "profile", "u", "t_switch", "u_before", "u_after", "u_start", "rate", "u_end",
    },
    "sweep": {"u_lo", "u_hi", "steps", "hybrid"},
    "hysteresis": {"mode", "ramp_rate", "u_peak"},
}
SHIPPED = ("tableI_basic", "tableI_saturation")


@dataclass
class SimulationConfig:
    q0: Mode
    x0: State
    profile: VoltageProfile
    t_end: float
    options: SimOptions


@dataclass
class SweepConfig:
    u_lo: float
    u_hi: float
    steps: int = 1001
    hybrid: bool = False


@dataclass
class HysteresisConfig:
    mode: str = "quasistatic"
    ramp_rate: float = 1.0
    u_peak: float | None = None


@dataclass
class Config:
    params: ActuatorParams
    model: ReluctanceModel
    simulation: SimulationConfig | None = None
    sweep: SweepConfig | None = None
    hysteresis: HysteresisConfig | None = None


def parse_quantity(text: str, key: str) -> float:
    text = text.strip()
    if text.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    number, _, unit = text.partition(" ")
    unit = unit.strip()
    if unit not in _UNITS:
        raise ConfigError(f"{key}: unknown unit {unit!r}")
    try:
        return float(number) * _UNITS[unit]
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None


def _section(cp, name):
    return dict(cp.items(name)) if cp.has_section(name) else None


def _num(sec: dict, key: str, default=None, section="") -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"[{section}] missing required key {key!r}")
        return default
    return parse_quantity(sec[key], key)


def _bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _resolve(path) -> Path:
    p = Path(path)
    if p.exists() or str(path) not in SHIPPED:
        return p
    return Path(str(resources.files("relaysim") / "configs" / f"{path}.ini"))


def load_config(path) -> Config:
    """Read, unit-normalize and validate a configuration file.

    ``path`` may also be the name of a shipped config (``tableI_basic``,
    ``tableI_saturation``).
    """
    p = _resolve(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(p, encoding="utf-8") as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{p}: parse error: {exc}") from None

    for name in cp.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        unknown = set(cp.options(name)) - _SECTIONS[name]
        if unknown:
            raise ConfigError(f"[{name}] unknown key(s): {', '.join(sorted(unknown))}")
    act = _section(cp, "actuator")
    if act is None:
        raise ConfigError("missing [actuator] section")

    kind = act.get("model", "basic").strip().lower()
    if kind not in ("basic", "saturation"):
        raise ConfigError(f"model: expected basic or saturation, got {kind!r}")
    if kind == "saturation" and "phi_sat" not in act:
        raise ConfigError("phi_sat is required when model = saturation")
    n_turns = _num(act, "N", section="actuator")
    if n_turns != int(n_turns):
        raise ConfigError(f"N must be a positive integer (got {act['N']!r})")
    try:
        params = ActuatorParams(
            R=_num(act, "R", section="actuator"),
            N=int(n_turns),
            R0=_num(act, "R0", section="actuator"),
            kR=_num(act, "kR", section="actuator"),
            m=_num(act, "m", section="actuator"),
            ks=_num(act, "ks", section="actuator"),
            zs=_num(act, "zs", section="actuator"),
            c=_num(act, "c", section="actuator"),
            z_min=_num(act, "z_min", 0.0),
            z_max=_num(act, "z_max", math.inf),
            phi_sat=_num(act, "phi_sat") if "phi_sat" in act else None,
        )
        model = params.model(kind)
    except ModelError as exc:
        raise ConfigError(str(exc)) from None

    cfg = Config(params, model)
    sim = _section(cp, "simulation")
    if sim is not None:
        cfg.simulation = _simulation(sim, params)
    sw = _section(cp, "sweep")
    if sw is not None:
        steps = _num(sw, "steps", 1001.0)
        if steps != int(steps) or steps < 1:
            raise ConfigError("steps must be a positive integer")
        cfg.sweep = SweepConfig(
            u_lo=_num(sw, "u_lo", section="sweep"),
            u_hi=_num(sw, "u_hi", section="sweep"),
            steps=int(steps),
            hybrid=_bool(sw.get("hybrid", "false"), "hybrid"),
        )
    hy = _section(cp, "hysteresis")
    if hy is not None:
        mode = hy.get("mode", "quasistatic").strip().lower()
        if mode not in ("quasistatic", "dynamic"):
            raise ConfigError(f"hysteresis mode must be quasistatic or dynamic, got {mode!r}")
        rate = _num(hy, "ramp_rate", 1.0)
        if not rate > 0:
            raise ConfigError("ramp_rate must be > 0")
        cfg.hysteresis = HysteresisConfig(
            mode, rate, _num(hy, "u_peak") if "u_peak" in hy else None
        )
    return cfg


def _simulation(sec: dict, params: ActuatorParams) -> SimulationConfig:
    q0 = int(_num(sec, "q0", 1.0))
    if q0 not in (1, 2, 3):
        raise ConfigError(f"q0 must be 1, 2 or 3 (got {q0})")
    default_z = {1: params.z_max, 2: min(params.zs, params.z_max), 3: params.z_min}[q0]
    x0 = State(_num(sec, "z0", default_z), _num(sec, "v0", 0.0), _num(sec, "phi0", 0.0))
    kind = sec.get("profile", "constant").strip().lower()
    if kind == "constant":
        profile = VoltageProfile.constant(_num(sec, "u", 0.0))
    elif kind == "step":
        profile = VoltageProfile.step(
            _num(sec, "t_switch", section="simulation"),
            _num(sec, "u_before", 0.0),
            _num(sec, "u_after", section="simulation"),
        )
    elif kind == "ramp":
        profile = VoltageProfile.ramp(
            _num(sec, "u_start", 0.0),
            _num(sec, "rate", section="simulation"),
            _num(sec, "u_end") if "u_end" in sec else None,
        )
    else:
        raise ConfigError(f"profile must be constant, step or ramp (got {kind!r})")
    t_end = _num(sec, "t_end", 0.05)
    if not t_end > 0:
        raise ConfigError("t_end must be > 0")
    opts = SimOptions(
        rtol=_num(sec, "rtol", 1e-8),
        atol=_num(sec, "atol", 1e-12),
        event_tol=_num(sec, "event_tol", 1e-10),
        output_dt=_num(sec, "output_dt", 1e-4),
    )
    return SimulationConfig(Mode(q0), x0, profile, t_end, opts)
