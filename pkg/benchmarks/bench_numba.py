"""Compare the compiled kernels with the plain-numpy fallback.

The backend is fixed at import time, so each backend runs in its own
interpreter.  Usage::

    python3 benchmarks/bench_numba.py [--frames 2000] [--repeats 5]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from multileg import FrictionModel, RobotModel, simulate, _jit
from multileg.trajectory import GaitSpec, gait_trajectory

frames, repeats = int(sys.argv[1]), int(sys.argv[2])
robot = RobotModel.uniform(6, 10.0, 1.0)
spec = GaitSpec.tripod()
traj = gait_trajectory(spec, cycles=frames * 0.01 * spec.frequency, dt=0.01)
out = {"backend": _jit.backend_name(), "frames": len(traj)}
t0 = time.perf_counter()
simulate(robot, gait_trajectory(spec, cycles=0.1, dt=0.01))
out["first_call_s"] = time.perf_counter() - t0
for name in ("viscous", "coulomb"):
    model = FrictionModel.parse(name)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        log = simulate(robot, traj, model)
        best = min(best, time.perf_counter() - t0)
    out[name + "_us_per_frame"] = 1e6 * best / len(traj)
    out[name + "_final_pose"] = log.final_pose.tolist()
print(json.dumps(out))
"""


def run(disable, frames, repeats):
    env = dict(os.environ)
    env.pop("MULTILEG_DISABLE_NUMBA", None)
    if disable:
        env["MULTILEG_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", CHILD, str(frames), str(repeats)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--frames", type=int, default=2000)
    p.add_argument("--repeats", type=int, default=5)
    args = p.parse_args(argv)
    fast = run(False, args.frames, args.repeats)
    slow = run(True, args.frames, args.repeats)
    print(f"{'':10s}{'numba':>14s}{'numpy':>14s}{'speed-up':>10s}")
    for name in ("viscous", "coulomb"):
        a, b = fast[name + "_us_per_frame"], slow[name + "_us_per_frame"]
        print(f"{name:10s}{a:11.1f} us{b:11.1f} us{b / a:9.1f}x")
    print(f"{'1st call':10s}{fast['first_call_s']:12.2f} s{slow['first_call_s']:12.2f} s")
    for name in ("viscous", "coulomb"):
        d = max(abs(x - y) for x, y in zip(fast[name + "_final_pose"], slow[name + "_final_pose"]))
        print(f"{name} final-pose difference between backends: {d:.2e}")


if __name__ == "__main__":
    main()
