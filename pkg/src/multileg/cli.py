"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 insufficient data, 4 solver
failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import replace

import numpy as np

from . import bench, friction, trajectory
from .config import RobotConfig, load_config, save_config
from .connection import full_frame_solve
from .core import ShapeFrame
from .errors import InsufficientData, MultilegError, SolverError
from .fitting import FitConfig, fit_friction, fit_stiffness
from .trajectory import GaitKind, GaitSpec

EXIT_OK, EXIT_INPUT, EXIT_DATA, EXIT_SOLVER = 0, 2, 3, 4


class InputError(Exception):
    pass


def _load(path) -> RobotConfig:
    try:
        return load_config(path)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _read_traj(path):
    try:
        return trajectory.read_trajectory_csv(path)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _check_legs(cfg, n):
    if cfg.robot.n_legs != n:
        raise InputError(f"config has {cfg.robot.n_legs} legs, data has {n}")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_solve_frame(args):
    cfg = _load(args.config)
    traj = _read_traj(args.frame)
    _check_legs(cfg, traj.n_legs)
    if not 0 <= args.row < len(traj):
        raise InputError(f"row {args.row} out of range (file has {len(traj)} rows)")
    frame: ShapeFrame = traj[args.row]
    model = cfg.model(args.model)
    support, planar, _ = full_frame_solve(cfg.robot, frame, args.theta, model, cfg.schedule)
    v = planar.vel
    if args.format == "csv":
        w = csv.writer(sys.stdout)
        n = cfg.robot.n_legs
        w.writerow(["z0", "alpha_x", "alpha_y", "vx", "vy", "omega"]
                   + [f"Fz{j}" for j in range(n)] + [f"Fx{j}" for j in range(n)]
                   + [f"Fy{j}" for j in range(n)] + [f"contact{j}" for j in range(n)])
        s = support.state
        vals = [s.z0, s.alpha_x, s.alpha_y, *v.v_xy, v.omega, *support.normal_forces,
                *planar.foot_forces[:, 0], *planar.foot_forces[:, 1]]
        w.writerow([f"{x:.17g}" for x in vals] + [str(int(b)) for b in support.contact_mask])
        return EXIT_OK
    s = support.state
    print(f"model      {model.kind.value}")
    print(f"support    z0={s.z0:.6g} alpha_x={s.alpha_x:.6g} alpha_y={s.alpha_y:.6g} "
          f"events={support.iterations}")
    print(f"contacts   {sorted(support.contacts)}")
    print("Fz         " + " ".join(f"{f:.6g}" for f in support.normal_forces))
    print(f"velocity   vx={v.v_xy[0]:.6g} vy={v.v_xy[1]:.6g} omega={v.omega:.6g}")
    for j, F in enumerate(planar.foot_forces):
        print(f"leg {j:<3d}    Fx={F[0]:.6g} Fy={F[1]:.6g}")
    print("residual   " + " ".join(f"{r:.3g}" for r in planar.balance_residual))
    return EXIT_OK


def _summary(name, log, elapsed):
    dist = float(np.hypot(*(log.final_pose[:2] - log.poses[0, :2])))
    print(f"{name}: frames={len(log)} distance={dist:.6g} heading={log.final_pose[2]:.6g} "
          f"failed={int(log.failed.sum())} ms/frame={1e3 * elapsed / len(log):.4g}")


def cmd_simulate(args):
    cfg = _load(args.config)
    traj = _read_traj(args.trajectory)
    _check_legs(cfg, traj.n_legs)
    if len(traj) < 2 and args.dt is None:
        raise InputError("single-frame trajectory needs --dt")
    main_name = args.model or cfg.friction_model
    logs = {}
    for name in [main_name] + ([args.compare] if args.compare else []):
        model = cfg.model(name)
        t0 = time.perf_counter()
        log = trajectory.simulate(cfg.robot, traj, model, schedule=cfg.schedule, dt=args.dt)
        _summary(model.kind.value, log, time.perf_counter() - t0)
        logs[name] = log
    trajectory.write_log_csv(args.out, logs[main_name])
    if args.compare:
        if args.compare_out:
            trajectory.write_log_csv(args.compare_out, logs[args.compare])
        st = trajectory.error_stats(logs[main_name], logs[args.compare])
        print(f"heading-velocity RMSE {main_name} vs {args.compare}: {st['heading']:.6g}")
    return EXIT_OK


def _gait_spec(cfg, kind, n_legs):
    spec = cfg.gait
    if kind is not None:
        k = GaitKind(kind)
        if spec is None or spec.kind is not k:
            spec = GaitSpec.metachronal() if k is GaitKind.METACHRONAL_CUBIC else GaitSpec.tripod()
    spec = spec or GaitSpec.tripod()
    if spec.n_legs != n_legs:
        raise InputError(f"gait has {spec.n_legs} legs, config has {n_legs}")
    return spec


def cmd_gait(args):
    cfg = _load(args.config)
    try:
        spec = _gait_spec(cfg, args.kind, cfg.robot.n_legs)
        traj = trajectory.gait_trajectory(spec, args.cycles, args.dt)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    trajectory.write_trajectory_csv(args.out, traj)
    print(f"wrote {len(traj)} frames ({spec.kind.value}) to {args.out}")
    return EXIT_OK


def cmd_fit(args):
    cfg = _load(args.config)
    try:
        log = trajectory.read_log_csv(args.log)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None
    _check_legs(cfg, log.n_legs)
    if log.measured_forces is None:
        raise InputError("log has no measured-force columns (mFx, mFy, mFz)")
    fc = FitConfig(cov_penalty_weight=args.cov_weight, absolute_forces=args.absolute)
    robot = cfg.robot
    if args.what == "stiffness":
        if log.q is None:
            raise InputError("log has no foot-position columns")
        res = fit_stiffness(log, robot, fc)
        legs = [replace(l, stiffness=float(k)) for l, k in zip(robot.legs, res.stiffness)]
        if res.unidentifiable:
            print(f"unidentifiable legs (kept initial stiffness): {list(res.unidentifiable)}")
    else:
        if log.foot_velocities is None:
            raise InputError("log has no foot slip-velocity columns")
        res = fit_friction(log, fc)
        legs = [replace(l, mu=float(m), traction_dir=tuple(float(v) for v in w))
                for l, m, w in zip(robot.legs, res.mu, res.traction_dir)]
    print(f"cost before {res.initial_cost:.6g} after {res.cost:.6g}")
    out = replace(cfg, robot=replace(robot, legs=tuple(legs)))
    save_config(args.out, out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_bench(args):
    if args.scaling:
        rep = bench.scaling_benchmark(range(args.min_legs, args.max_legs + 1), args.trials, args.seed)
        bench.write_scaling_csv(args.out, rep)
        print(f"normalised median at {rep.n_legs[-1]} legs: {rep.percentiles[-1, 2]:.4g}")
        print(f"solver-output checksum {rep.checksum:.17g}")
    else:
        rep = bench.parallel_benchmark(args.frames, range(1, args.max_threads + 1), args.seed,
                                       args.repeats)
        bench.write_parallel_csv(args.out, rep)
        for m, row, w in zip(rep.threads, rep.overhead, rep.workers):
            print(f"threads={m} workers={w} overhead p50={row[1]:.4g}")
        same = bool(np.all(rep.final_poses == rep.final_poses[0]))
        print(f"composed poses identical across thread counts: {same}")
        print(f"solver-output checksum {float(np.abs(rep.final_poses[0]).sum()):.17g}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_friction_map(args):
    vx, vy = friction.error_grid(args.half_width, args.n)
    err = friction.relative_error_map(vx, vy)
    friction.write_error_map_csv(args.out, vx, vy, err)
    disk = np.hypot(vx - 1.0, vy) <= 0.2 + 1e-12
    print(f"max relative error for |dv| <= 0.2: {100 * err[disk].max():.4f}%")
    print(f"wrote {len(err)} rows to {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

MODELS = ("viscous", "coulomb", "anisotropic")


def build_parser():
    p = argparse.ArgumentParser(prog="multileg", description="Quasi-static multi-legged locomotion with slipping.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-frame", help="solve one frame")
    s.add_argument("config")
    s.add_argument("frame", help="trajectory CSV; one row is solved")
    s.add_argument("--row", type=int, default=0)
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--model", choices=MODELS)
    s.add_argument("--format", choices=("text", "csv"), default="text")
    s.set_defaults(func=cmd_solve_frame)

    s = sub.add_parser("simulate", help="simulate a shape trajectory")
    s.add_argument("config")
    s.add_argument("trajectory")
    s.add_argument("--model", choices=MODELS)
    s.add_argument("--out", required=True)
    s.add_argument("--dt", type=float)
    s.add_argument("--compare", choices=MODELS, help="also simulate with this model")
    s.add_argument("--compare-out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("gait", help="generate a gait trajectory")
    s.add_argument("config")
    s.add_argument("--kind", choices=[k.value for k in GaitKind if k is not GaitKind.CUSTOM])
    s.add_argument("--cycles", type=float, default=1.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gait)

    s = sub.add_parser("fit", help="fit leg parameters to a log with measured forces")
    s.add_argument("config")
    s.add_argument("log")
    s.add_argument("--what", choices=("stiffness", "friction"), required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--cov-weight", type=float, default=FitConfig.cov_penalty_weight)
    s.add_argument("--absolute", action="store_true", help="fit absolute normal forces, not shares")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("bench", help="run a benchmark")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--scaling", action="store_true")
    g.add_argument("--parallel", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--min-legs", type=int, default=3)
    s.add_argument("--max-legs", type=int, default=50)
    s.add_argument("--frames", type=int, default=10000)
    s.add_argument("--max-threads", type=int, default=4)
    s.add_argument("--repeats", type=int, default=20)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("friction-map", help="viscous vs Coulomb relative-error grid")
    s.add_argument("--out", required=True)
    s.add_argument("--n", type=int, default=101)
    s.add_argument("--half-width", type=float, default=0.5)
    s.set_defaults(func=cmd_friction_map)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InsufficientData as exc:
        print(f"InsufficientData: {exc} (legs {list(exc.legs)})", file=sys.stderr)
        return EXIT_DATA
    except SolverError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except MultilegError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
