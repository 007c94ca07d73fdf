"""Wall-clock comparison of the numba and pure-numpy backends.

Each backend runs in its own interpreter because the backend is chosen once,
at import time, from MEMRISTOR1D_DISABLE_NUMBA.

    python3 benchmarks/bench_backends.py [--cycles 4] [--repeats 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from memristor1d import engine
from memristor1d._backend import backend_name
from memristor1d.params import DeviceParams, SimConfig, StochasticConfig

cycles, repeats = int(sys.argv[1]), int(sys.argv[2])
dev, sto, sim = DeviceParams(), StochasticConfig(delta=0.05, seed=0), SimConfig()
t0 = time.perf_counter()
engine.run(dev, sto, SimConfig(t_max=0.05))  # numba compiles (or loads its cache) here
warmup = time.perf_counter() - t0
times = []
for _ in range(repeats):
    t0 = time.perf_counter()
    engine.run_c2c(dev, sto, sim, cycles=cycles)
    times.append(time.perf_counter() - t0)
print(json.dumps({"backend": backend_name(), "warmup": warmup, "times": times}))
"""


def measure(disable_numba: bool, cycles: int, repeats: int) -> dict:
    env = dict(os.environ)
    env.pop("MEMRISTOR1D_DISABLE_NUMBA", None)
    if disable_numba:
        env["MEMRISTOR1D_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKER, str(cycles), str(repeats)], env=env,
                         check=True, capture_output=True, text=True).stdout
    return json.loads(out.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cycles", type=int, default=4)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    rows = [measure(flag, args.cycles, args.repeats) for flag in (False, True)]
    steps = args.cycles * 900
    print(f"{args.cycles}-cycle C2C run, {steps} steps, best of {args.repeats}")
    print(f"{'backend':8s} {'warm-up s':>10s} {'run s':>8s} {'us/step':>8s}")
    for r in rows:
        best = min(r["times"])
        print(f"{r['backend']:8s} {r['warmup']:10.2f} {best:8.3f} {best / steps * 1e6:8.1f}")
    if len(rows) == 2 and rows[0]["backend"] != rows[1]["backend"]:
        print(f"speed-up: {min(rows[1]['times']) / min(rows[0]['times']):.1f}x")


if __name__ == "__main__":
    main()
