"""Solver-scaling and parallel-overhead benchmarks."""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .connection import full_frame_solve
from .core import RobotModel, ShapeFrame
from .errors import SolverError
from .support import max_events
from .trajectory import HEXAPOD_HIPS

PERCENTILES = (2.5, 25.0, 50.0, 75.0, 97.5)
THREADS_ENV = "MULTILEG_THREADS"
WARMUP = 50


@dataclass(frozen=True)
class DiskLayout:
    """Foot workspaces of a disk robot: one angular wedge per leg around the rim."""

    hip_angles: np.ndarray
    half_angle: float
    radius: tuple = (0.8, 1.2)
    height: tuple = (-0.6, -0.4)

    def wedge_bounds(self):
        return np.stack([self.hip_angles - self.half_angle, self.hip_angles + self.half_angle], axis=1)

    def sample(self, rng, n_frames):
        """Random feet uniform over each wedge (by area) and random velocities."""
        n = len(self.hip_angles)
        ang = self.hip_angles + rng.uniform(-self.half_angle, self.half_angle, (n_frames, n))
        r0, r1 = self.radius
        rad = np.sqrt(rng.uniform(r0 * r0, r1 * r1, (n_frames, n)))
        z = rng.uniform(*self.height, (n_frames, n))
        Q = np.stack([rad * np.cos(ang), rad * np.sin(ang), z], axis=2)
        QD = rng.uniform(-1.0, 1.0, (n_frames, n, 3))
        return Q, QD


def disk_robot(n_legs):
    """Disk robot with legs equally spaced on the unit rim, K = mu = 1.

    Each wedge spans 45% of the leg's share of the circle, which keeps
    neighbouring workspaces apart and keeps the centre of mass inside the
    support polygon for every sample.
    """
    if n_legs < 3:
        raise ValueError("a disk robot needs at least three legs")
    angles = 2 * np.pi * np.arange(n_legs) / n_legs
    layout = DiskLayout(angles, 0.45 * np.pi / n_legs)
    return RobotModel.uniform(n_legs, 1.0, 1.0), layout


@dataclass(frozen=True)
class ScalingReport:
    n_legs: np.ndarray
    percentiles: np.ndarray  # (len(n_legs), 5) normalised by the 3-leg (first) median
    median_seconds: np.ndarray
    checksum: float
    failures: np.ndarray

    def normalized_median(self, n):
        return float(self.percentiles[list(self.n_legs).index(n), 2])


def _checksum(values):
    return float(np.sum(np.abs(values)))


def scaling_benchmark(n_range=range(3, 51), trials=1000, seed=0, warmup=WARMUP):
    """Time ``full_frame_solve`` on random disk-robot frames for each leg count.

    Trials are interleaved across leg counts, so a burst of outside load
    on the machine slows every leg count alike instead of one block.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    n_range = list(n_range)
    robots, samples = [], []
    for n in n_range:
        robot, layout = disk_robot(n)
        robots.append(robot)
        samples.append(layout.sample(rng, trials))
        wQ, wQD = layout.sample(np.random.default_rng(seed + 7919 * n), warmup)
        for k in range(warmup):
            _timed_solve(robot, wQ[k], wQD[k])
    times = np.empty((len(n_range), trials))
    fails = np.zeros(len(n_range), dtype=int)
    sums = np.zeros(len(n_range))
    for k in range(trials):
        for i, robot in enumerate(robots):
            Q, QD = samples[i]
            dt, vel = _timed_solve(robot, Q[k], QD[k])
            times[i, k] = dt
            if vel is None:
                fails[i] += 1
            else:
                sums[i] += _checksum(vel)
    rows = np.percentile(times, PERCENTILES, axis=1).T
    medians = np.median(times, axis=1)
    return ScalingReport(np.array(n_range), rows / medians[0], medians, float(sums.sum()), fails)


def _timed_solve(robot, q, qd):
    frame = ShapeFrame(q, qd)
    t0 = time.perf_counter_ns()
    try:
        _, planar, _ = full_frame_solve(robot, frame)
        vel = planar.vel.as_array()
    except SolverError:
        vel = None
    return (time.perf_counter_ns() - t0) * 1e-9, vel


# --------------------------------------------------------------------------
# parallel frames
# --------------------------------------------------------------------------

def prefix_compose(displacements):
    """Compose planar displacements ``(dx, dy, dtheta)`` by a pairwise tree.

    Each displacement is expressed in the frame reached by the ones before
    it; the result is the final pose ``(x, y, theta)`` starting from the
    identity.
    """
    D = np.array(displacements, dtype=float).reshape(-1, 3)
    if len(D) == 0:
        return np.zeros(3)
    while len(D) > 1:
        odd = D[-1:] if len(D) % 2 else None
        a, b = D[0:len(D) - len(D) % 2:2], D[1::2]
        c, s = np.cos(a[:, 2]), np.sin(a[:, 2])
        D = np.column_stack([a[:, 0] + c * b[:, 0] - s * b[:, 1],
                             a[:, 1] + s * b[:, 0] + c * b[:, 1],
                             a[:, 2] + b[:, 2]])
        if odd is not None:
            D = np.vstack([D, odd])
    return D[0].copy()


def sequential_compose(displacements):
    D = np.ascontiguousarray(np.asarray(displacements, float).reshape(-1, 3))
    return kernels.compose_sequential(np.zeros(3), D)[-1]


@dataclass(frozen=True)
class ParallelReport:
    threads: np.ndarray
    overhead: np.ndarray  # (len(threads), 3): p25, p50, p75
    wall_seconds: np.ndarray  # (len(threads), repeats)
    final_poses: np.ndarray  # (len(threads), 3)
    workers: np.ndarray

    def median_overhead(self, m):
        return float(self.overhead[list(self.threads).index(m), 1])


def thread_cap():
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return None
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1")
    return cap


def hexapod_frames(n_frames, seed=0):
    rng = np.random.default_rng(seed)
    Q = HEXAPOD_HIPS[None] + rng.uniform(-0.15, 0.15, (n_frames, 6, 3))
    QD = rng.uniform(-1.0, 1.0, (n_frames, 6, 3))
    return Q, QD


def _solve_chunk(Q, QD, robot):
    n = robot.n_legs
    out = kernels.viscous_batch(Q, QD, robot.stiffness, float(robot.weight), robot.mu,
                                np.zeros((n, 2)), max_events(n))
    return out[3]


def _run_parallel(pool, workers, Q, QD, robot, dt):
    bounds = np.linspace(0, len(Q), workers + 1).astype(int)
    chunks = [(np.ascontiguousarray(Q[a:b]), np.ascontiguousarray(QD[a:b]))
              for a, b in zip(bounds[:-1], bounds[1:])]
    t0 = time.perf_counter()
    if workers == 1:
        parts = [_solve_chunk(q, qd, robot) for q, qd in chunks]
    else:
        parts = list(pool.map(lambda c: _solve_chunk(c[0], c[1], robot), chunks))
    X = np.concatenate(parts)
    pose = kernels.compose_sequential(np.zeros(3), kernels.twist_displacement(X, dt))[-1]
    return time.perf_counter() - t0, pose


def parallel_benchmark(n_frames=10000, threads=(1, 2, 3, 4), seed=0, repeats=20, dt=0.01):
    """Per-frame velocity solves split across ``M`` threads, then one sequential pose pass.

    Overhead for ``M`` threads is ``wall * M / median(single-thread wall)``.
    """
    threads = [int(m) for m in threads]
    if any(m < 1 for m in threads):
        raise ValueError("thread counts must be >= 1")
    cap = thread_cap()
    robot = RobotModel.uniform(6, 10.0, 1.0)
    Q, QD = hexapod_frames(n_frames, seed)
    _solve_chunk(Q[:WARMUP], QD[:WARMUP], robot)

    walls, poses, workers = [], [], []
    for m in threads:
        w = m if cap is None else min(m, cap)
        with ThreadPoolExecutor(max_workers=w) as pool:
            _run_parallel(pool, w, Q, QD, robot, dt)
            times = []
            pose = None
            for _ in range(repeats):
                t, pose = _run_parallel(pool, w, Q, QD, robot, dt)
                times.append(t)
        walls.append(times)
        poses.append(pose)
        workers.append(w)
    walls = np.array(walls)
    base = np.median(walls[threads.index(1)]) if 1 in threads else np.median(walls[0]) * threads[0]
    over = walls * np.array(threads)[:, None] / base
    pct = np.percentile(over, [25, 50, 75], axis=1).T
    return ParallelReport(np.array(threads), pct, walls, np.array(poses), np.array(workers))


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def write_scaling_csv(path, report: ScalingReport):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n_legs", "p2.5", "p25", "p50", "p75", "p97.5"])
        for n, row in zip(report.n_legs, report.percentiles):
            w.writerow([int(n), *(f"{v:.17g}" for v in row)])


def write_parallel_csv(path, report: ParallelReport):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["threads", "overhead_p25", "overhead_p50", "overhead_p75"])
        for m, row in zip(report.threads, report.overhead):
            w.writerow([int(m), *(f"{v:.17g}" for v in row)])
