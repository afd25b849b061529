"""Force balance under smoothed Coulomb friction.

Coulomb friction is non-smooth at zero slip, so the balance is solved for a
decreasing sequence of smoothing parameters ``eps``, each solve starting
from the previous solution, until consecutive solutions agree to a
relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import BodyVelocity, RobotModel, ShapeFrame, rot2
from .errors import NoConvergence, SingularBalance
from .support import SupportSolution

INNER_MAX_ITER = 100
INNER_STEP_TOL = 1e-12
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class HomotopySchedule:
    eps0: float = 1e-5
    shrink: float = 0.1
    rel_tol: float = 1e-3
    max_stages: int = 10

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError("eps0 must be > 0")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.max_stages < 1:
            raise ValueError("max_stages must be >= 1")

    def epsilons(self):
        return self.eps0 * self.shrink ** np.arange(self.max_stages)


def default_schedule(**overrides) -> HomotopySchedule:
    return HomotopySchedule(**overrides)


@dataclass(frozen=True)
class CoulombSolution:
    vel: BodyVelocity
    foot_forces: np.ndarray  # (N, 2) world frame
    stages: int
    converged: bool
    epsilon: float
    balance_residual: np.ndarray
    fell_back: bool = False


def _contact_data(robot, frame, support):
    idx = np.array(sorted(support.contacts), dtype=np.int64)
    qxy = np.ascontiguousarray(frame.q[idx, :2])
    qdxy = np.ascontiguousarray(frame.qdot[idx, :2])
    muFz = robot.mu[idx] * support.normal_forces[idx]
    return idx, qxy, qdxy, muFz


def balance_residual(robot: RobotModel, frame: ShapeFrame, support: SupportSolution,
                     theta, vel: BodyVelocity, epsilon):
    """Net world-frame planar force and z-moment for a trial body velocity."""
    _, qxy, qdxy, muFz = _contact_data(robot, frame, support)
    r, _ = kernels.coulomb_residual(vel.to_body(theta), qxy, qdxy, muFz, float(epsilon), False)
    return np.array([*(rot2(theta) @ r[:2]), r[2]])


def _viscous_start(qxy, qdxy, muFz):
    n = len(muFz)
    Hq = kernels.traction_body(np.ones(n), muFz, np.zeros((n, 2)))
    x, _, ok = kernels.planar_solve(qxy, qdxy, Hq)
    if not ok:
        raise SingularBalance("planar balance matrix is singular")
    return x


def solve_coulomb(robot: RobotModel, frame: ShapeFrame, support: SupportSolution,
                  theta=0.0, init: BodyVelocity | None = None,
                  sched: HomotopySchedule | None = None, fallback=True) -> CoulombSolution:
    """Smoothed-Coulomb balance by epsilon continuation.

    ``init`` defaults to the viscous-Coulomb solution.  If the continuation
    fails from a user-supplied ``init`` and ``fallback`` is set, it is
    retried once from the viscous-Coulomb solution.
    """
    sched = sched or default_schedule()
    idx, qxy, qdxy, muFz = _contact_data(robot, frame, support)
    if len(idx) == 0:
        raise SingularBalance("no loaded contacts")
    xv = _viscous_start(qxy, qdxy, muFz)
    x0 = xv if init is None else init.to_body(theta)
    res_tol = RESIDUAL_RTOL * float(muFz.sum())

    def run(start):
        return kernels.coulomb_homotopy(
            np.ascontiguousarray(start, dtype=float), qxy, qdxy, muFz,
            float(sched.eps0), float(sched.shrink), float(sched.rel_tol),
            int(sched.max_stages), INNER_MAX_ITER, INNER_STEP_TOL, res_tol)

    x, stages, eps, status, _ = run(x0)
    fell_back = False
    if status != kernels.OK and fallback and init is not None:
        fell_back = True
        x, more, eps, status, _ = run(xv)
        stages += more
    if status != kernels.OK:
        raise NoConvergence(f"Coulomb continuation failed after {stages} stages")

    r, _ = kernels.coulomb_residual(x, qxy, qdxy, muFz, eps, False)
    R = rot2(theta)
    forces = np.zeros((robot.n_legs, 2))
    for c, leg in enumerate(idx):
        ux = x[0] - x[2] * qxy[c, 1] + qdxy[c, 0]
        uy = x[1] + x[2] * qxy[c, 0] + qdxy[c, 1]
        v = np.hypot(ux, uy)
        h = -muFz[c] * (eps + v) / (eps + v * v)
        forces[leg] = R @ (h * np.array([ux, uy]))
    return CoulombSolution(
        vel=BodyVelocity.from_body(x, theta),
        foot_forces=forces,
        stages=int(stages),
        converged=True,
        epsilon=float(eps),
        balance_residual=np.array([*(R @ r[:2]), r[2]]),
        fell_back=fell_back,
    )
