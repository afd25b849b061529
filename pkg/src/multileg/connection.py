"""Planar force/moment balance under the viscous-Coulomb ansatz.

With a slip-independent traction matrix per contact the balance equations
are linear in the body velocity and in the shape velocity, so the body
velocity is a linear map of the foot velocities (the local connection).
Everything is assembled in the body frame and rotated into the world
frame at the end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import BodyVelocity, RobotModel, ShapeFrame, rot2
from .errors import SingularBalance
from .friction import FrictionKind, FrictionModel
from .support import SupportSolution, solve_support


@dataclass(frozen=True)
class PlanarSolution:
    vel: BodyVelocity
    foot_forces: np.ndarray  # (N, 2) world frame, zero for legs off the ground
    balance_residual: np.ndarray  # (sum F_x, sum F_y, sum M_z), world frame


@dataclass(frozen=True)
class ConnectionMatrices:
    contacts: tuple
    A_xy: np.ndarray  # (n_contacts, 2, 2)
    A_theta: np.ndarray  # (n_contacts, 2)

    def reconstruct(self, qdot_xy):
        """Body-frame velocity ``(R^-1 pdot0, omega)`` for contact foot velocities.

        ``qdot_xy`` is either (n_contacts, 2) or (N, 2) indexed by leg.
        """
        qd = np.asarray(qdot_xy, float)
        if qd.shape[0] != len(self.contacts):
            qd = qd[list(self.contacts)]
        u = np.einsum("kij,kj->i", self.A_xy, qd)
        omega = -np.einsum("kj,kj->", self.A_theta, qd)
        return np.array([u[0], u[1], omega])


def contact_traction(robot: RobotModel, support: SupportSolution, model: FrictionModel):
    """Body-frame traction matrices for the loaded contacts, in leg order."""
    idx = np.array(sorted(support.contacts), dtype=np.int64)
    w = robot.traction_dir[idx]
    if model.kind is not FrictionKind.ANISOTROPIC_VISCOUS_COULOMB:
        w = np.zeros_like(w)
    Hq = kernels.traction_body(robot.mu[idx], support.normal_forces[idx], np.ascontiguousarray(w))
    return idx, Hq


def assemble_balance(qxy, Hq):
    """Balance matrix (3x3) and per-contact right-hand-side blocks (n, 3, 2).

    Unknowns are ``(R^-1 pdot0, omega)``; the balance reads
    ``M x + sum_k B_k qdot_k = 0``.
    """
    qxy = np.ascontiguousarray(qxy, dtype=float).reshape(-1, 2)
    Hq = np.ascontiguousarray(Hq, dtype=float).reshape(-1, 2, 2)
    return kernels.planar_system(qxy, Hq)


def solve_planar(robot: RobotModel, frame: ShapeFrame, support: SupportSolution,
                 theta=0.0, model: FrictionModel | None = None):
    model = model or FrictionModel.viscous()
    if not model.is_linear:
        raise ValueError("solve_planar needs a linear friction model; use coulomb.solve_coulomb")
    idx, Hq = contact_traction(robot, support, model)
    if len(idx) == 0:
        raise SingularBalance("no loaded contacts")
    qxy = np.ascontiguousarray(frame.q[idx, :2])
    qdxy = np.ascontiguousarray(frame.qdot[idx, :2])
    x, C, ok = kernels.planar_solve(qxy, qdxy, Hq)
    if not ok:
        raise SingularBalance("planar balance matrix is singular")
    F_body, r_body = kernels.planar_forces(x, qxy, qdxy, Hq)
    planar = _planar_solution(robot.n_legs, idx, x, F_body, r_body, theta)
    nc = len(idx)
    Ck = C.reshape(3, nc, 2).transpose(1, 0, 2)
    conn = ConnectionMatrices(tuple(idx.tolist()), -Ck[:, :2, :].copy(), Ck[:, 2, :].copy())
    return planar, conn


def _planar_solution(n_legs, idx, x, F_body, r_body, theta):
    R = rot2(theta)
    forces = np.zeros((n_legs, 2))
    forces[idx] = F_body @ R.T
    resid = np.array([*(R @ r_body[:2]), r_body[2]])
    return PlanarSolution(BodyVelocity.from_body(x, theta), forces, resid)


def full_frame_solve(robot: RobotModel, frame: ShapeFrame, theta=0.0,
                     model: FrictionModel | None = None, schedule=None, init=None):
    """Support solve followed by the planar velocity solve for one frame.

    Returns ``(support, planar, connection)``; ``connection`` is None for
    the nonlinear Coulomb model.
    """
    model = model or FrictionModel.viscous()
    support = solve_support(robot, frame)
    if model.is_linear:
        planar, conn = solve_planar(robot, frame, support, theta, model)
        return support, planar, conn
    from .coulomb import default_schedule, solve_coulomb

    sched = schedule or default_schedule(eps0=model.epsilon)
    sol = solve_coulomb(robot, frame, support, theta, init, sched)
    planar = PlanarSolution(sol.vel, sol.foot_forces, sol.balance_residual)
    return support, planar, None
