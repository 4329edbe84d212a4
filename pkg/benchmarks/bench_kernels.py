"""Wall-clock comparison of the numba kernels against the pure-Python fallback.

Each backend runs in its own interpreter because the backend is fixed at
import time by ``RELAYSIM_DISABLE_JIT``.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKLOAD = textwrap.dedent(
    """
    import json, time
    from relaysim import _jit
    from relaysim.bifurcation import hysteresis_dynamic
    from relaysim.hybrid import Mode, State, VoltageProfile, simulate
    from relaysim.params import ReluctanceModel, table_i

    p = table_i(0.0, 5e-3)
    sat = ReluctanceModel.saturation(20e-6)

    def closing():
        simulate(p, sat, Mode.MAX_GAP, State(p.z_max, 0.0), VoltageProfile.step(1e-3, 0.0, 45.0), 0.03)

    def loop():
        hysteresis_dynamic(p, sat, {rate})

    t0 = time.perf_counter()
    closing()
    warm = time.perf_counter() - t0
    out = {{"jit": _jit.JIT_ENABLED, "first_call": warm}}
    for name, fn in (("closing_step", closing), ("hysteresis_ramp", loop)):
        best = float("inf")
        for _ in range({repeat}):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out[name] = best
    print(json.dumps(out))
    """
)


def run(disable_jit: bool, repeat: int, rate: float) -> dict:
    env = dict(os.environ)
    env.pop("RELAYSIM_DISABLE_JIT", None)
    if disable_jit:
        env["RELAYSIM_DISABLE_JIT"] = "1"
    code = WORKLOAD.format(repeat=repeat, rate=rate)
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(r.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--rate", type=float, default=20.0, help="ramp rate of the hysteresis workload (V/s)")
    args = ap.parse_args()

    jit = run(False, args.repeat, args.rate)
    plain = run(True, args.repeat, args.rate)
    if not jit["jit"]:
        print("numba unavailable: both runs used the fallback")
    print(f"{'workload':<18}{'numba (s)':>12}{'python (s)':>12}{'speedup':>10}")
    print(f"{'first call':<18}{jit['first_call']:>12.3f}{plain['first_call']:>12.3f}{'':>10}")
    for key in ("closing_step", "hysteresis_ramp"):
        print(f"{key:<18}{jit[key]:>12.4f}{plain[key]:>12.4f}{plain[key] / jit[key]:>9.1f}x")


if __name__ == "__main__":
    main()
