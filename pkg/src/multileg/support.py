"""Spring-support model: contacts, body height/pitch/roll and normal loads.

Each leg is a vertical linear spring hanging from a rigid body plane whose
origin is the centre of mass.  The contact set is found by walking through
the piecewise-linear contact regions of the state ``(alpha_x, alpha_y, z0)``
until the force/moment balance solution stays in the region it was computed
for.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import RobotModel, ShapeFrame
from .errors import (
    DegenerateTilt,
    NoConvergence,
    NoSupport,
    SingularSupport,
)

_ERRORS = {
    kernels.NO_SUPPORT: NoSupport,
    kernels.SINGULAR_SUPPORT: SingularSupport,
    kernels.DEGENERATE_TILT: DegenerateTilt,
    kernels.NO_CONVERGENCE: NoConvergence,
}


def raise_for_status(status, what="support solve"):
    if status != kernels.OK:
        exc = _ERRORS.get(status, NoConvergence)
        raise exc(f"{what} failed: {exc.__name__}")


@dataclass(frozen=True)
class SupportState:
    alpha_x: float = 0.0
    alpha_y: float = 0.0
    z0: float = 0.0

    def as_array(self):
        return np.array([self.alpha_x, self.alpha_y, self.z0])

    @classmethod
    def from_array(cls, s):
        return cls(float(s[0]), float(s[1]), float(s[2]))


@dataclass(frozen=True)
class SupportSolution:
    state: SupportState
    contacts: frozenset
    normal_forces: np.ndarray
    iterations: int
    trace: np.ndarray | None = None

    @property
    def contact_mask(self):
        mask = np.zeros(len(self.normal_forces), bool)
        mask[list(self.contacts)] = True
        return mask


def max_events(n_legs):
    return 4 * n_legs + 8


def initial_height_scan(robot: RobotModel, frame: ShapeFrame):
    """Flat-body height ``z*`` at which the compressed springs carry ``Mg``."""
    frame.check_robot(robot)
    z, mask, ok = kernels.height_scan(
        np.ascontiguousarray(frame.q[:, 2]), robot.stiffness, float(robot.weight))
    if not ok:
        raise NoSupport("spring forces never reach the robot weight")
    return float(z), frozenset(np.flatnonzero(mask).tolist())


def balance_step(robot: RobotModel, frame: ShapeFrame, contacts) -> SupportState:
    """Solve F_z = Mg, M_x = M_y = 0 with the contact set held fixed."""
    frame.check_robot(robot)
    mask = np.zeros(robot.n_legs, bool)
    mask[list(contacts)] = True
    if mask.sum() < 3:
        raise SingularSupport("balance needs at least three contacts")
    A, b = kernels.balance_system(np.ascontiguousarray(frame.q), robot.stiffness,
                                  float(robot.weight), mask)
    sol, ok = kernels.solve_small(A, b)
    if not ok:
        raise SingularSupport("contacts are collinear or coincident in the plane")
    return SupportState.from_array(sol[:, 0])


def line_search_contact_change(robot, frame, s0, s1, contacts=None, t_max=1.0):
    """First leg whose contact state flips moving from ``s0`` towards ``s1``.

    ``contacts`` defaults to the legs below ground at ``s0``.  With
    ``t_max=inf`` the segment is a ray and only legs touching down count.
    Returns ``(t, leg)`` or ``None``.
    """
    frame.check_robot(robot)
    q = np.ascontiguousarray(frame.q)
    a0 = s0.as_array() if isinstance(s0, SupportState) else np.asarray(s0, float)
    a1 = s1.as_array() if isinstance(s1, SupportState) else np.asarray(s1, float)
    if contacts is None:
        mask = kernels.foot_heights(q, a0) < -kernels.CONTACT_TOL
    else:
        mask = np.zeros(robot.n_legs, bool)
        mask[list(contacts)] = True
    joins_only = not np.isfinite(t_max)
    t, leg = kernels.line_search(q, a0, a1, mask, float(t_max), kernels.CONTACT_TOL, joins_only)
    if leg < 0:
        return None
    return float(t), int(leg)


def tilt_one_contact(robot, frame, s, leg):
    """Tilt direction in (alpha_x, alpha_y, z0) pivoting about a single contact."""
    q = frame.q[leg]
    d, status = kernels.tilt_one(float(q[0]), float(q[1]))
    if status != kernels.OK:
        raise DegenerateTilt("contact lies under the centre of mass")
    return d


def tilt_two_contacts(robot, frame, s, legs):
    """Tilt direction rotating about the line through two contacts."""
    i, j = legs
    p1, p2 = frame.q[i], frame.q[j]
    if np.allclose(p1[:2], p2[:2], rtol=0.0, atol=1e-12):
        raise DegenerateTilt("contact points coincide")
    d, status = kernels.tilt_two(float(p1[0]), float(p1[1]), float(p2[0]), float(p2[1]))
    if status != kernels.OK:
        raise DegenerateTilt("centre of mass lies on the contact line")
    return d


def solve_support(robot: RobotModel, frame: ShapeFrame, keep_trace=False) -> SupportSolution:
    frame.check_robot(robot)
    n = robot.n_legs
    cap = max_events(n)
    trace = np.zeros((cap + 2, 3))
    s, mask, forces, events, n_trace, status = kernels.support_solve(
        np.ascontiguousarray(frame.q), robot.stiffness, float(robot.weight), cap, trace)
    raise_for_status(status)
    return SupportSolution(
        state=SupportState.from_array(s),
        contacts=frozenset(np.flatnonzero(mask).tolist()),
        normal_forces=forces,
        iterations=int(events),
        trace=trace[:n_trace].copy() if keep_trace else None,
    )


def support_residual(robot, frame, solution):
    """``(sum F_z - Mg, M_x, M_y)`` for a solution."""
    F = solution.normal_forces
    q = frame.q
    return np.array([F.sum() - robot.weight, -(q[:, 1] * F).sum(), (q[:, 0] * F).sum()])
