"""Domain types and the small-angle rigid-body kinematics.

Lengths and forces are dimensionless after normalising the weight to
``Mg = 1``; angles are radians.  Legs are identified by their index in
``RobotModel.legs`` everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

S = np.array([[0.0, -1.0], [1.0, 0.0]])


def rot2(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class LegParam:
    stiffness: float
    mu: float = 1.0
    traction_dir: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.stiffness > 0:
            raise ValueError(f"stiffness must be > 0, got {self.stiffness}")
        if not self.mu >= 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        w = tuple(float(v) for v in self.traction_dir)
        if len(w) != 2 or not all(np.isfinite(w)):
            raise ValueError(f"traction_dir must be a finite 2-vector, got {self.traction_dir}")
        object.__setattr__(self, "traction_dir", w)


@dataclass(frozen=True)
class RobotModel:
    legs: tuple[LegParam, ...]
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))
        if len(self.legs) < 1:
            raise ValueError("a robot needs at least one leg")
        if not self.weight > 0:
            raise ValueError(f"weight must be > 0, got {self.weight}")

    @classmethod
    def uniform(cls, n_legs, stiffness=1.0, mu=1.0, weight=1.0):
        return cls(tuple(LegParam(stiffness, mu) for _ in range(n_legs)), weight)

    @classmethod
    def from_arrays(cls, stiffness, mu, traction_dir=None, weight=1.0):
        stiffness = np.asarray(stiffness, float)
        mu = np.broadcast_to(np.asarray(mu, float), stiffness.shape)
        if traction_dir is None:
            traction_dir = np.zeros((len(stiffness), 2))
        legs = tuple(
            LegParam(float(k), float(m), tuple(w))
            for k, m, w in zip(stiffness, mu, np.asarray(traction_dir, float))
        )
        return cls(legs, float(weight))

    @property
    def n_legs(self):
        return len(self.legs)

    @cached_property
    def stiffness(self):
        return np.array([leg.stiffness for leg in self.legs])

    @cached_property
    def mu(self):
        return np.array([leg.mu for leg in self.legs])

    @cached_property
    def traction_dir(self):
        return np.array([leg.traction_dir for leg in self.legs], dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class ShapeFrame:
    """Body-frame foot positions ``q`` (N, 3) and velocities ``qdot`` (N, 3)."""

    q: np.ndarray
    qdot: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1, 3)
        qd = np.array(self.qdot, dtype=float).reshape(-1, 3)
        if q.shape != qd.shape:
            raise ValueError(f"q {q.shape} and qdot {qd.shape} differ in shape")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(qd))):
            raise ValueError("frame contains non-finite entries")
        q.flags.writeable = False
        qd.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", qd)

    @property
    def n_legs(self):
        return self.q.shape[0]

    def check_robot(self, robot: RobotModel):
        if self.n_legs != robot.n_legs:
            raise ValueError(f"frame has {self.n_legs} legs, robot has {robot.n_legs}")


@dataclass(frozen=True)
class PoseState:
    alpha_x: float = 0.0
    alpha_y: float = 0.0
    z0: float = 0.0
    theta: float = 0.0
    p0_xy: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "p0_xy", tuple(float(v) for v in self.p0_xy))


@dataclass(frozen=True)
class BodyVelocity:
    v_xy: tuple[float, float] = (0.0, 0.0)
    omega: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "v_xy", tuple(float(v) for v in self.v_xy))
        object.__setattr__(self, "omega", float(self.omega))

    def as_array(self):
        return np.array([self.v_xy[0], self.v_xy[1], self.omega])

    @classmethod
    def from_body(cls, x, theta):
        """From body-frame unknowns ``(R^-1 pdot0, omega)``."""
        v = rot2(theta) @ np.asarray(x[:2], float)
        return cls((v[0], v[1]), x[2])

    def to_body(self, theta):
        u = rot2(theta).T @ np.asarray(self.v_xy)
        return np.array([u[0], u[1], self.omega])


def body_transform(pose: PoseState):
    """First-order homogeneous transform of the body (not an exact SE(3) element)."""
    c, s = np.cos(pose.theta), np.sin(pose.theta)
    return np.array(
        [
            [c, -s, pose.alpha_x, pose.p0_xy[0]],
            [s, c, -pose.alpha_y, pose.p0_xy[1]],
            [-pose.alpha_x, pose.alpha_y, 1.0, pose.z0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def foot_height(pose: PoseState, q):
    """World height of a body-frame foot; negative means in contact."""
    return -pose.alpha_x * q[0] + pose.alpha_y * q[1] + q[2] + pose.z0


def foot_planar_kinematics(pose: PoseState, vel: BodyVelocity, q, qdot):
    R = rot2(pose.theta)
    q = np.asarray(q, float)
    qdot = np.asarray(qdot, float)
    p_xy = R @ q[:2] + np.asarray(pose.p0_xy)
    spin = vel.omega * (R.T @ S @ R @ q[:2])
    pdot_xy = (
        R @ (spin + qdot[:2])
        + np.asarray(vel.v_xy)
        + np.array([pose.alpha_y, -pose.alpha_x]) * q[2]
    )
    return p_xy, pdot_xy
