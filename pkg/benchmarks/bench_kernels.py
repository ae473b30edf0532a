"""Compare the numba kernels with the pure-Python fallback.

Each path runs in its own interpreter (the switch is read at import), once
to warm up (numba compiles, or loads its cache) and then timed. Pure-Python
workloads are scaled down; rates are reported per item so the two paths are
comparable.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
import cwsaddle
from cwsaddle.eset import rho_many
from cwsaddle.saddle import saddle_step_many
from cwsaddle.torus_da import map_many, default_config, SaddleInsertion
from cwsaddle.surface import step_many
from cwsaddle.lab import System, ContinuumSample, track_continuum

scale, repeat = float(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
n = lambda k: max(1, int(k * scale))
P = rng.uniform(-2, 2, (n(200_000), 2))
S = rng.uniform(-1, 1, (n(5_000), 2))
Z = rng.random((n(100_000), 2))
W = rng.random((n(20_000), 2))
da, ins = default_config(), SaddleInsertion()
f = System("surface", "f")
C = ContinuumSample.segment((0.0, 1.0), (0.3, 1.5), 0.0125, "chart", 1, 4)
work = {
    "rho_many": (len(P), lambda: rho_many(P)),
    "saddle_step_many": (len(S), lambda: saddle_step_many(S)),
    "da_map_many": (len(Z), lambda: map_many(Z, "forward", da)),
    "anomalous_map_many": (len(Z), lambda: map_many(Z, "forward", da, ins)),
    "surface_step_many": (len(W), lambda: step_many(np.full(len(W), 1), W, "g")),
    "track_continuum": (1, lambda: track_continuum(f, C, 4, 4)),
}
out = {"numba": cwsaddle.USE_NUMBA, "results": {}}
for name, (items, fn) in work.items():
    t0 = time.perf_counter(); fn(); warm = time.perf_counter() - t0
    best = min((lambda t: (fn(), time.perf_counter() - t)[1])(time.perf_counter()) for _ in range(repeat))
    out["results"][name] = {"items": items, "warmup_s": warm, "best_s": best, "per_item_s": best / items}
print(json.dumps(out))
"""


def run(disable: bool, scale: float, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("CWSADDLE_DISABLE_NUMBA", None)
    if disable:
        env["CWSADDLE_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", _WORKER, str(scale), str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--pure-scale", type=float, default=0.02, help="workload fraction for the pure path")
    ap.add_argument("--json", help="also write the raw results here")
    args = ap.parse_args(argv)
    jit = run(False, 1.0, args.repeat)
    pure = run(True, args.pure_scale, args.repeat)
    print(f"{'kernel':<20} {'numba/item':>12} {'pure/item':>12} {'speedup':>9} {'compile':>9}")
    for name, a in jit["results"].items():
        b = pure["results"][name]
        print(f"{name:<20} {a['per_item_s']:12.3e} {b['per_item_s']:12.3e} "
              f"{b['per_item_s'] / a['per_item_s']:9.1f} {a['warmup_s'] - a['best_s']:8.2f}s")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"numba": jit, "pure": pure}, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
