"""Gaits, trajectory simulation, filtering and log statistics.

A trajectory is a uniformly sampled sequence of shape frames.  Each frame
is solved independently for the body velocity (the quasi-static model has
no memory), then the poses are obtained by chaining the exact SE(2)
displacement of each frame's body twist over one sample interval.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter

from . import kernels
from .coulomb import INNER_MAX_ITER, INNER_STEP_TOL, RESIDUAL_RTOL, HomotopySchedule, default_schedule
from .core import BodyVelocity, PoseState, RobotModel, S, ShapeFrame, rot2
from .errors import DegenerateFit, LengthMismatch
from .friction import FrictionKind, FrictionModel
from .support import SupportSolution, SupportState, max_events

TWO_PI = 2.0 * math.pi
PHASE_TOL = 1e-12


# --------------------------------------------------------------------------
# shape trajectories
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeTrajectory:
    """Uniformly sampled shape frames, stored as stacked arrays."""

    times: np.ndarray  # (F,)
    q: np.ndarray  # (F, N, 3)
    qdot: np.ndarray  # (F, N, 3)

    def __post_init__(self):
        t = np.array(self.times, dtype=float).reshape(-1)
        q = np.array(self.q, dtype=float)
        qd = np.array(self.qdot, dtype=float)
        if q.ndim != 3 or q.shape[2] != 3 or q.shape != qd.shape or q.shape[0] != len(t):
            raise ValueError("expected times (F,), q and qdot (F, N, 3)")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(qd)) and np.all(np.isfinite(t))):
            raise ValueError("trajectory contains non-finite entries")
        if len(t) > 1:
            steps = np.diff(t)
            if np.any(steps <= 0):
                raise ValueError("times must be strictly increasing")
            if np.ptp(steps) > 1e-9 * max(1.0, abs(t[-1])):
                raise ValueError("times must be uniformly spaced")
        for a in (t, q, qd):
            a.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", qd)

    @classmethod
    def from_frames(cls, frames):
        frames = list(frames)
        if not frames:
            raise ValueError("no frames")
        return cls(np.array([f.time for f in frames]),
                   np.stack([f.q for f in frames]), np.stack([f.qdot for f in frames]))

    def __len__(self):
        return len(self.times)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return ShapeTrajectory(self.times[k], self.q[k], self.qdot[k])
        return ShapeFrame(self.q[k], self.qdot[k], float(self.times[k]))

    @property
    def n_legs(self):
        return self.q.shape[1]

    @property
    def dt(self):
        if len(self.times) < 2:
            raise ValueError("dt is undefined for fewer than two frames")
        return float((self.times[-1] - self.times[0]) / (len(self.times) - 1))

    @property
    def frames(self):
        return [self[k] for k in range(len(self))]


def _trajectory_header(n):
    cols = ["t"]
    for j in range(n):
        cols += [f"q{j}x", f"q{j}y", f"q{j}z"]
    for j in range(n):
        cols += [f"qd{j}x", f"qd{j}y", f"qd{j}z"]
    return cols


def write_trajectory_csv(path, traj: ShapeTrajectory):
    n = traj.n_legs
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(_trajectory_header(n))
        for k in range(len(traj)):
            row = [traj.times[k], *traj.q[k].ravel(), *traj.qdot[k].ravel()]
            w.writerow([f"{v:.17g}" for v in row])


def _read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r]
    try:
        data = np.array([[float(v) for v in r] for r in body], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from None
    if body and (data.ndim != 2 or data.shape[1] != len(header)):
        raise ValueError(f"{path}: ragged rows")
    return header, data.reshape(len(body), len(header))


def read_trajectory_csv(path) -> ShapeTrajectory:
    header, data = _read_table(path)
    if len(header) < 7 or (len(header) - 1) % 6:
        raise ValueError(f"{path}: expected t plus six columns per leg")
    n = (len(header) - 1) // 6
    if header != _trajectory_header(n):
        raise ValueError(f"{path}: unexpected column names")
    if len(data) == 0:
        raise ValueError("no frames")
    q = data[:, 1:1 + 3 * n].reshape(-1, n, 3)
    qd = data[:, 1 + 3 * n:].reshape(-1, n, 3)
    return ShapeTrajectory(data[:, 0], q, qd)


# --------------------------------------------------------------------------
# gaits
# --------------------------------------------------------------------------

class GaitKind(enum.Enum):
    BUEHLER_TRIPOD = "tripod"
    METACHRONAL_CUBIC = "metachronal"
    CUSTOM = "custom"


# hexapod leg order: LF, LM, LH, RF, RM, RH
HEXAPOD_LEGS = ("LF", "LM", "LH", "RF", "RM", "RH")
TRIPOD_OFFSETS = (0.0, math.pi, 0.0, math.pi, 0.0, math.pi)
# wave runs from the hind legs forward, alternating sides
_WAVE_ORDER = ("LH", "RH", "LM", "RM", "LF", "RF")
METACHRONAL_OFFSETS = tuple(TWO_PI * _WAVE_ORDER.index(name) / 6 for name in HEXAPOD_LEGS)


@dataclass(frozen=True)
class GaitSpec:
    kind: GaitKind = GaitKind.BUEHLER_TRIPOD
    frequency: float = 1.0
    duty: float = 0.5
    stance_sweep: float = 1.0
    phase_offsets: tuple = TRIPOD_OFFSETS

    def __post_init__(self):
        object.__setattr__(self, "kind", GaitKind(self.kind))
        object.__setattr__(self, "phase_offsets", tuple(float(p) for p in self.phase_offsets))
        if not self.frequency > 0:
            raise ValueError("frequency must be > 0")
        if not 0 < self.duty < 1:
            raise ValueError("duty must lie in (0, 1)")
        if not 0 < self.stance_sweep < TWO_PI:
            raise ValueError("stance_sweep must lie in (0, 2 pi)")
        if not self.phase_offsets:
            raise ValueError("phase_offsets must name at least one leg")

    @classmethod
    def tripod(cls, frequency=1.0, duty=0.5, stance_sweep=1.0):
        return cls(GaitKind.BUEHLER_TRIPOD, frequency, duty, stance_sweep, TRIPOD_OFFSETS)

    @classmethod
    def metachronal(cls, frequency=1.0, stance_sweep=1.0):
        return cls(GaitKind.METACHRONAL_CUBIC, frequency, 2.0 / 3.0, stance_sweep, METACHRONAL_OFFSETS)

    @property
    def n_legs(self):
        return len(self.phase_offsets)


def _cycle_fraction(spec, t):
    t = np.asarray(t, float)
    u = spec.frequency * t[..., None] + np.asarray(spec.phase_offsets) / TWO_PI
    u = u - np.floor(u)
    # snap round-off at the cycle wrap so sampled phase boundaries land in the next segment
    return np.where(u > 1.0 - PHASE_TOL, 0.0, u)


def _stance_profile(spec, s):
    """Stance progress ``c(s)`` on [0, 1] and its derivative."""
    if spec.kind is GaitKind.METACHRONAL_CUBIC:
        return s + 0.5 * s * (1 - s) * (1 - 2 * s), 1.5 - 3 * s + 3 * s * s
    return s, np.ones_like(s)


def _shaft(spec, t):
    u = _cycle_fraction(spec, t)
    d, sweep = spec.duty, spec.stance_sweep
    stance = u < d - PHASE_TOL
    s = np.where(stance, u / d, 0.0)
    c, dc = _stance_profile(spec, s)
    r = np.where(stance, 0.0, (u - d) / (1 - d))
    angle = np.where(stance, -sweep / 2 + sweep * c, sweep / 2 + (TWO_PI - sweep) * r)
    rate = spec.frequency * np.where(stance, sweep * dc / d, (TWO_PI - sweep) / (1 - d))
    return angle, rate, stance


def buehler_clock(spec: GaitSpec, t):
    """Per-leg shaft angle, in ``[-sweep/2, 2 pi - sweep/2)``.

    Stance sweeps ``stance_sweep`` at constant rate over the duty fraction
    of the cycle; the swing covers the rest of the turn, faster.
    """
    if spec.kind is GaitKind.METACHRONAL_CUBIC:
        raise ValueError("buehler_clock needs a piecewise-linear gait")
    return _shaft(spec, t)[0]


def metachronal_cubic(spec: GaitSpec, t):
    """Per-leg shaft angle with a cubic stance profile and linear swing.

    The stance profile ``c(s) = s + s(1-s)(1-2s)/2`` keeps the angle and
    its rate continuous at both stance boundaries while slowing the foot in
    mid-stance.
    """
    if spec.kind is not GaitKind.METACHRONAL_CUBIC:
        raise ValueError("metachronal_cubic needs a metachronal gait")
    return _shaft(spec, t)[0]


def shaft_angle(spec: GaitSpec, t):
    return _shaft(spec, t)[0]


def shaft_rate(spec: GaitSpec, t):
    return _shaft(spec, t)[1]


def in_stance(spec: GaitSpec, t):
    return _shaft(spec, t)[2]


HEXAPOD_HIPS = np.array([
    [0.5, 0.35, -0.3], [0.0, 0.35, -0.3], [-0.5, 0.35, -0.3],
    [0.5, -0.35, -0.3], [0.0, -0.35, -0.3], [-0.5, -0.35, -0.3],
])
CRANK_RADIUS = 0.15


def leg_forward_kinematics(shaft_angle, hip=(0.0, 0.0, -0.3), radius=CRANK_RADIUS):
    """Crank stand-in for the leg linkage.

    The foot runs on a circle of ``radius`` in the sagittal plane about
    ``hip``; angle 0 is the lowest point and increasing angle moves the foot
    backwards along the bottom of the circle.
    """
    phi = np.asarray(shaft_angle, float)
    hip = np.asarray(hip, float)
    off = np.stack([-np.sin(phi), np.zeros_like(phi), -np.cos(phi)], axis=-1)
    return hip + radius * off


def leg_velocity(shaft_angle, rate, radius=CRANK_RADIUS):
    phi = np.asarray(shaft_angle, float)
    rate = np.asarray(rate, float)
    d = np.stack([-np.cos(phi), np.zeros_like(phi), np.sin(phi)], axis=-1)
    return radius * rate[..., None] * d


def gait_trajectory(spec: GaitSpec, cycles=1.0, dt=0.01, hips=None, radius=CRANK_RADIUS):
    """Sample a gait into a ShapeTrajectory with analytic foot velocities."""
    if not dt > 0 or not cycles > 0:
        raise ValueError("cycles and dt must be > 0")
    hips = HEXAPOD_HIPS if hips is None else np.asarray(hips, float)
    if hips.shape != (spec.n_legs, 3):
        raise ValueError(f"need {spec.n_legs} hips, got shape {hips.shape}")
    n = int(round(cycles / (spec.frequency * dt)))
    if n < 1:
        raise ValueError("gait sampling yields no frames")
    t = np.arange(n) * dt
    angle, rate, _ = _shaft(spec, t)
    q = leg_forward_kinematics(angle, hip=(0.0, 0.0, 0.0), radius=radius) + hips[None]
    qd = leg_velocity(angle, rate, radius)
    return ShapeTrajectory(t, q, qd)


# --------------------------------------------------------------------------
# simulation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryLog:
    """Per-frame solver output, as stacked arrays indexed by frame then leg.

    ``poses`` rows are ``(x, y, theta, z0, alpha_x, alpha_y)`` at each
    frame time; ``vel`` rows are world-frame ``(vx, vy, omega)``.  Planar
    forces are world frame.  Optional fields are ``None`` when absent.
    """

    times: np.ndarray
    poses: np.ndarray
    vel: np.ndarray
    normal_forces: np.ndarray
    planar_forces: np.ndarray
    contacts: np.ndarray
    failed: np.ndarray
    status: np.ndarray | None = None
    final_pose: np.ndarray | None = None
    q: np.ndarray | None = None
    qdot: np.ndarray | None = None
    measured_forces: np.ndarray | None = None  # (F, N, 3) world (Fx, Fy, Fz)
    foot_velocities: np.ndarray | None = None  # (F, N, 2) world slip
    stages: np.ndarray | None = None
    fallback: np.ndarray | None = None

    def __len__(self):
        return len(self.times)

    @property
    def n_legs(self):
        return self.normal_forces.shape[1]

    def pose(self, k) -> PoseState:
        x, y, th, z, ax, ay = self.poses[k]
        return PoseState(ax, ay, z, th, (x, y))

    def support(self, k) -> SupportSolution:
        x, y, th, z, ax, ay = self.poses[k]
        return SupportSolution(SupportState(ax, ay, z),
                               frozenset(np.flatnonzero(self.contacts[k]).tolist()),
                               self.normal_forces[k].copy(), 0)

    def planar(self, k):
        from .connection import PlanarSolution

        F = self.planar_forces[k]
        q = self.q[k] if self.q is not None else np.zeros((self.n_legs, 3))
        R = rot2(self.poses[k, 2])
        qw = q[:, :2] @ R.T
        resid = np.array([F[:, 0].sum(), F[:, 1].sum(), np.sum(qw[:, 0] * F[:, 1] - qw[:, 1] * F[:, 0])])
        return PlanarSolution(BodyVelocity(self.vel[k, :2], self.vel[k, 2]), F.copy(), resid)

    def body_velocities(self):
        """``(heading, side, turning)`` velocities in the body frame."""
        th = self.poses[:, 2]
        c, s = np.cos(th), np.sin(th)
        vx, vy = self.vel[:, 0], self.vel[:, 1]
        return np.stack([c * vx + s * vy, -s * vx + c * vy, self.vel[:, 2]], axis=1)

    def with_measured(self, forces):
        forces = np.asarray(forces, float)
        if forces.shape != (len(self), self.n_legs, 3):
            raise ValueError(f"measured forces must have shape {(len(self), self.n_legs, 3)}")
        return replace(self, measured_forces=forces)

    def model_forces(self):
        """Model forces stacked as (F, N, 3) in the measured-force layout."""
        return np.concatenate([self.planar_forces, self.normal_forces[..., None]], axis=2)


def _solve_frames(robot: RobotModel, traj: ShapeTrajectory, model: FrictionModel,
                  sched: HomotopySchedule):
    Q = np.ascontiguousarray(traj.q)
    QD = np.ascontiguousarray(traj.qdot)
    K, mu, Mg = robot.stiffness, robot.mu, float(robot.weight)
    cap = max_events(robot.n_legs)
    if model.is_linear:
        w = robot.traction_dir if model.kind is FrictionKind.ANISOTROPIC_VISCOUS_COULOMB \
            else np.zeros((robot.n_legs, 2))
        S_, MASK, FZ, X, FXY, ST = kernels.viscous_batch(Q, QD, K, Mg, mu, np.ascontiguousarray(w), cap)
        return S_, MASK, FZ, X, FXY, ST, None, None
    return kernels.coulomb_batch(Q, QD, K, Mg, mu, cap, float(sched.eps0), float(sched.shrink),
                                 float(sched.rel_tol), int(sched.max_stages), INNER_MAX_ITER,
                                 INNER_STEP_TOL, RESIDUAL_RTOL)


def simulate(robot: RobotModel, traj: ShapeTrajectory, model: FrictionModel | None = None,
             initial_pose: PoseState | None = None, schedule: HomotopySchedule | None = None,
             dt: float | None = None) -> TrajectoryLog:
    """Solve every frame and integrate the planar pose.

    Frames whose solve fails are flagged in ``failed``; they carry the
    previous frame's body twist (zero before the first success) so the pose
    stays continuous.  ``dt`` defaults to the trajectory's sample interval
    and must be given for single-frame trajectories.
    """
    model = model or FrictionModel.viscous()
    if traj.n_legs != robot.n_legs:
        raise ValueError(f"trajectory has {traj.n_legs} legs, robot has {robot.n_legs}")
    if len(traj) == 0:
        raise ValueError("no frames")
    if dt is None:
        dt = traj.dt
    sched = None
    if not model.is_linear:
        sched = schedule or default_schedule(eps0=model.epsilon)
    S_, MASK, FZ, X, FXY, ST, STAGES, FB = _solve_frames(robot, traj, model, sched)
    failed = ST != kernels.OK

    # carry the last good body twist through failed frames
    Xc = X.copy()
    last = np.zeros(3)
    for k in range(len(Xc)):
        if failed[k]:
            Xc[k] = last
        else:
            last = Xc[k]

    p0 = initial_pose or PoseState()
    start = np.array([p0.p0_xy[0], p0.p0_xy[1], p0.theta])
    P = kernels.compose_sequential(start, kernels.twist_displacement(Xc, float(dt)))

    th = P[:-1, 2]
    c, s = np.cos(th), np.sin(th)
    vel = np.stack([c * Xc[:, 0] - s * Xc[:, 1], s * Xc[:, 0] + c * Xc[:, 1], Xc[:, 2]], axis=1)
    Fw = np.empty_like(FXY)
    Fw[..., 0] = c[:, None] * FXY[..., 0] - s[:, None] * FXY[..., 1]
    Fw[..., 1] = s[:, None] * FXY[..., 0] + c[:, None] * FXY[..., 1]

    # body-frame slip J x + qdot, rotated to world
    qxy, qdxy = traj.q[..., :2], traj.qdot[..., :2]
    ub = Xc[:, None, :2] + Xc[:, None, 2:3] * (qxy @ S.T) + qdxy
    slip = np.empty_like(ub)
    slip[..., 0] = c[:, None] * ub[..., 0] - s[:, None] * ub[..., 1]
    slip[..., 1] = s[:, None] * ub[..., 0] + c[:, None] * ub[..., 1]

    poses = np.column_stack([P[:-1], S_[:, 2], S_[:, 0], S_[:, 1]])
    return TrajectoryLog(
        times=traj.times.copy(), poses=poses, vel=vel, normal_forces=FZ, planar_forces=Fw,
        contacts=MASK, failed=failed, status=ST, final_pose=P[-1].copy(),
        q=np.array(traj.q), qdot=np.array(traj.qdot), foot_velocities=slip,
        stages=STAGES, fallback=FB,
    )


# --------------------------------------------------------------------------
# log I/O
# --------------------------------------------------------------------------

_POSE_COLS = ["t", "x", "y", "theta", "z", "alpha_x", "alpha_y", "vx", "vy", "omega"]


def _log_header(n, extras):
    cols = list(_POSE_COLS)
    cols += [f"Fz{j}" for j in range(n)]
    cols += [f"Fx{j}" for j in range(n)]
    cols += [f"Fy{j}" for j in range(n)]
    cols += [f"contact{j}" for j in range(n)]
    cols.append("failed")
    for name in extras:
        cols += _extra_cols(name, n)
    return cols


def _extra_cols(name, n):
    if name == "shape":
        return ([f"q{j}{a}" for j in range(n) for a in "xyz"]
                + [f"qd{j}{a}" for j in range(n) for a in "xyz"])
    if name == "measured":
        return ([f"mFx{j}" for j in range(n)] + [f"mFy{j}" for j in range(n)]
                + [f"mFz{j}" for j in range(n)])
    if name == "slip":
        return [f"vf{j}{a}" for j in range(n) for a in "xy"]
    raise KeyError(name)


def write_log_csv(path, log: TrajectoryLog):
    """Write a log; shape, measured-force and slip columns follow the fixed
    columns when present."""
    n = log.n_legs
    extras = [name for name, v in (("shape", log.q), ("measured", log.measured_forces),
                                   ("slip", log.foot_velocities)) if v is not None]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(_log_header(n, extras))
        for k in range(len(log)):
            row = [log.times[k], *log.poses[k], *log.vel[k], *log.normal_forces[k],
                   *log.planar_forces[k, :, 0], *log.planar_forces[k, :, 1]]
            vals = [f"{v:.17g}" for v in row]
            vals += [str(int(b)) for b in log.contacts[k]]
            vals.append(str(int(log.failed[k])))
            if "shape" in extras:
                vals += [f"{v:.17g}" for v in (*log.q[k].ravel(), *log.qdot[k].ravel())]
            if "measured" in extras:
                m = log.measured_forces[k]
                vals += [f"{v:.17g}" for v in (*m[:, 0], *m[:, 1], *m[:, 2])]
            if "slip" in extras:
                vals += [f"{v:.17g}" for v in log.foot_velocities[k].ravel()]
            w.writerow(vals)


def read_log_csv(path) -> TrajectoryLog:
    header, data = _read_table(path)
    if header[:len(_POSE_COLS)] != _POSE_COLS:
        raise ValueError(f"{path}: not a trajectory log")
    n_fixed_per_leg = 4
    rest = len(header) - len(_POSE_COLS) - 1
    n = 0
    while n_fixed_per_leg * (n + 1) <= rest and header[len(_POSE_COLS) + n] == f"Fz{n}":
        n += 1
    base = _log_header(n, [])
    if n == 0 or header[:len(base)] != base:
        raise ValueError(f"{path}: malformed log header")
    pos = len(base)
    found = {}
    for name in ("shape", "measured", "slip"):
        cols = _extra_cols(name, n)
        if header[pos:pos + len(cols)] == cols:
            found[name] = data[:, pos:pos + len(cols)]
            pos += len(cols)
    if pos != len(header):
        raise ValueError(f"{path}: unknown columns {header[pos:]}")
    if len(data) == 0:
        raise ValueError("no frames")
    i = len(_POSE_COLS)
    Fz = data[:, i:i + n]
    Fx = data[:, i + n:i + 2 * n]
    Fy = data[:, i + 2 * n:i + 3 * n]
    contacts = data[:, i + 3 * n:i + 4 * n] != 0
    failed = data[:, i + 4 * n] != 0
    q = qd = meas = slip = None
    if "shape" in found:
        q = found["shape"][:, :3 * n].reshape(-1, n, 3)
        qd = found["shape"][:, 3 * n:].reshape(-1, n, 3)
    if "measured" in found:
        m = found["measured"]
        meas = np.stack([m[:, :n], m[:, n:2 * n], m[:, 2 * n:]], axis=2)
    if "slip" in found:
        slip = found["slip"].reshape(-1, n, 2)
    return TrajectoryLog(
        times=data[:, 0], poses=data[:, 1:7], vel=data[:, 7:10], normal_forces=Fz,
        planar_forces=np.stack([Fx, Fy], axis=2), contacts=contacts, failed=failed,
        q=q, qdot=qd, measured_forces=meas, foot_velocities=slip,
    )


# --------------------------------------------------------------------------
# filtering and statistics
# --------------------------------------------------------------------------

def lowpass(series, gamma):
    """First-order IIR filter ``y_n = gamma y_(n-1) + (1 - gamma) x_n`` with ``y_0 = x_0``.

    Filters along the first axis.
    """
    if not 0 <= gamma < 1:
        raise ValueError("gamma must lie in [0, 1)")
    x = np.asarray(series, float)
    if x.shape[0] == 0:
        return x.copy()
    zi = gamma * x[:1]
    y, _ = lfilter([1.0 - gamma], [1.0, -gamma], x, axis=0, zi=zi)
    return y


def fit_sigma(predicted, measured):
    """Least-squares scale ``sigma`` minimising ``sum (sigma |F_hat| - |F|)^2``.

    Inputs are per-leg magnitudes, or per-leg force vectors along the last
    axis.
    """
    p = np.asarray(predicted, float)
    m = np.asarray(measured, float)
    if p.ndim > 1:
        p = np.linalg.norm(p, axis=-1)
        m = np.linalg.norm(m, axis=-1)
    if p.shape != m.shape:
        raise LengthMismatch(f"{p.shape} predictions vs {m.shape} measurements")
    den = float(np.dot(p, p))
    if den == 0.0:
        raise DegenerateFit("all predicted forces are zero")
    return float(np.dot(p, m)) / den


def _rmse(a, b):
    return np.sqrt(np.mean((np.asarray(a) - np.asarray(b)) ** 2, axis=0))


def error_stats(log: TrajectoryLog, reference: TrajectoryLog):
    """RMSE per channel: body-frame heading, side and turning velocity,
    roll, pitch, and per-leg force components."""
    if len(log) != len(reference):
        raise LengthMismatch(f"{len(log)} frames vs {len(reference)} frames")
    if log.n_legs != reference.n_legs:
        raise LengthMismatch(f"{log.n_legs} legs vs {reference.n_legs} legs")
    vb, vr = log.body_velocities(), reference.body_velocities()
    return {
        "heading": float(_rmse(vb[:, 0], vr[:, 0])),
        "side": float(_rmse(vb[:, 1], vr[:, 1])),
        "turning": float(_rmse(vb[:, 2], vr[:, 2])),
        "roll": float(_rmse(log.poses[:, 5], reference.poses[:, 5])),
        "pitch": float(_rmse(log.poses[:, 4], reference.poses[:, 4])),
        "Fx": _rmse(log.planar_forces[..., 0], reference.planar_forces[..., 0]),
        "Fy": _rmse(log.planar_forces[..., 1], reference.planar_forces[..., 1]),
        "Fz": _rmse(log.normal_forces, reference.normal_forces),
    }
