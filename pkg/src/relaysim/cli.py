"""Command-line front end. Every subcommand writes CSV.

Exit codes: 0 ok, 1 configuration error, 2 numerical/model error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import sys
from pathlib import Path

from .bifurcation import hysteresis_dynamic, hysteresis_quasistatic, sweep
from .config import Config, ConfigError, SweepConfig, load_config
from .equilibria import critical_points, hybrid_equilibria
from .hybrid import SimulationError, simulate
from .params import DomainError, ModelError

EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 1, 2, 3

TRAJECTORY_COLUMNS = ("t", "q", "z", "v", "phi", "i", "force")
EVENT_COLUMNS = ("t", "kind", "z", "v", "phi")
EQUILIBRIA_COLUMNS = ("u", "mode", "branch", "z", "phi", "stability")
CRITICAL_COLUMNS = (
    "u0", "phi0", "ub", "zb", "phib", "u_min", "phi_min", "u_max", "phi_max",
    "u0_sat", "ub_sat", "zb_sat", "phib_sat", "u_min_sat", "u_max_sat",
)
SWEEP_COLUMNS = ("u", "branch", "mode", "z", "phi", "stability")
ANNOTATION_COLUMNS = ("u", "branch", "kind")
HYSTERESIS_COLUMNS = ("direction", "u", "z")
SUMMARY_COLUMNS = ("closing_voltage", "opening_voltage")


def fmt(value) -> str:
    """Shortest round-trip text for floats; blank for missing values."""
    if value is None:
        return ""
    if hasattr(value, "value"):  # enums
        value = value.value
    if isinstance(value, float) or type(value).__name__.startswith("float"):
        return repr(float(value))
    return str(value)


def companion(out: Path, suffix: str) -> Path:
    return out.with_name(f"{out.stem}_{suffix}{out.suffix or '.csv'}")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def cmd_simulate(cfg: Config, out: Path) -> None:
    sim = cfg.simulation
    if sim is None:
        raise ConfigError("simulate needs a [simulation] section")
    tr = simulate(cfg.params, cfg.model, sim.q0, sim.x0, sim.profile, sim.t_end, sim.options)
    write_csv(
        out,
        TRAJECTORY_COLUMNS,
        zip(tr.t.tolist(), tr.q.tolist(), tr.z.tolist(), tr.v.tolist(),
            tr.phi.tolist(), tr.i.tolist(), tr.force.tolist()),
    )
    write_csv(
        companion(out, "events"),
        EVENT_COLUMNS,
        ((e.t, e.kind, e.before.z, e.before.v, e.before.phi) for e in tr.events),
    )


def cmd_equilibria(cfg: Config, u: float, out: Path) -> None:
    eqs = hybrid_equilibria(cfg.params, cfg.model, u)
    write_csv(
        out, EQUILIBRIA_COLUMNS,
        ((e.u, int(e.mode), e.branch, e.z, e.phi, e.stability) for e in eqs),
    )


def cmd_critical(cfg: Config, out: Path) -> None:
    cp = critical_points(cfg.params, cfg.model)
    values = dataclasses.asdict(cp)
    write_csv(out, CRITICAL_COLUMNS, [[values[c] for c in CRITICAL_COLUMNS]])


def cmd_sweep(cfg: Config, out: Path) -> None:
    sw = cfg.sweep
    if sw is None:
        cp = critical_points(cfg.params, cfg.model)
        top = cp.ub_sat if cp.ub_sat is not None else cp.ub
        sw = SweepConfig(0.0, 1.1 * top)
    data = sweep(cfg.params, cfg.model, (sw.u_lo, sw.u_hi), sw.steps, hybrid=sw.hybrid)
    write_csv(
        out, SWEEP_COLUMNS,
        ((r.u, r.branch, int(r.mode), r.z, r.phi, r.stability) for r in data.records),
    )
    write_csv(
        companion(out, "annotations"), ANNOTATION_COLUMNS,
        ((a.u, a.branch, a.kind) for a in data.annotations),
    )


def cmd_hysteresis(cfg: Config, out: Path) -> None:
    hy = cfg.hysteresis
    if hy is not None and hy.mode == "dynamic":
        loop = hysteresis_dynamic(cfg.params, cfg.model, hy.ramp_rate, u_peak=hy.u_peak)
    else:
        loop = hysteresis_quasistatic(cfg.params, cfg.model)
    rows = [("up", u, z) for u, z in zip(loop.up_u.tolist(), loop.up_z.tolist())]
    rows += [("down", u, z) for u, z in zip(loop.down_u.tolist(), loop.down_z.tolist())]
    write_csv(out, HYSTERESIS_COLUMNS, rows)
    write_csv(
        companion(out, "summary"), SUMMARY_COLUMNS,
        [(loop.closing_voltage, loop.opening_voltage)],
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaysim", description="Equilibrium, bifurcation and switching analysis of relays."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("simulate", "time-domain simulation of the hybrid model"),
        ("equilibria", "equilibria of all modes at one supply voltage"),
        ("critical", "closed-form switching and bifurcation voltages"),
        ("sweep", "bifurcation diagram over a voltage range"),
        ("hysteresis", "switching hysteresis loop"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True,
                       help="config file, or a shipped name: tableI_basic, tableI_saturation")
        p.add_argument("--out", required=True, type=Path, help="output CSV path")
        if name == "equilibria":
            p.add_argument("--u", required=True, type=float, help="supply voltage (V)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"relaysim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"relaysim: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.command == "simulate":
            cmd_simulate(cfg, args.out)
        elif args.command == "equilibria":
            if not math.isfinite(args.u):
                raise ConfigError("--u must be finite")
            cmd_equilibria(cfg, args.u, args.out)
        elif args.command == "critical":
            cmd_critical(cfg, args.out)
        elif args.command == "sweep":
            cmd_sweep(cfg, args.out)
        else:
            cmd_hysteresis(cfg, args.out)
    except ConfigError as exc:
        print(f"relaysim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelError, DomainError, SimulationError, ArithmeticError) as exc:
        print(f"relaysim: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"relaysim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
