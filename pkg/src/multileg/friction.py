"""Friction laws: smoothed Coulomb, its viscous-Coulomb limit, and the
anisotropic viscous-Coulomb variant.

A friction law is written as a traction matrix ``H`` acting on the foot
slip velocity, ``F = H pdot``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import rot2
from .errors import ZeroVelocity


class FrictionKind(enum.Enum):
    VISCOUS_COULOMB = "viscous"
    SMOOTHED_COULOMB = "coulomb"
    ANISOTROPIC_VISCOUS_COULOMB = "anisotropic"


@dataclass(frozen=True)
class FrictionModel:
    kind: FrictionKind = FrictionKind.VISCOUS_COULOMB
    epsilon: float = math.inf

    def __post_init__(self):
        if self.kind is FrictionKind.SMOOTHED_COULOMB and not (0 < self.epsilon < math.inf):
            raise ValueError(f"smoothed Coulomb needs 0 < epsilon < inf, got {self.epsilon}")

    @classmethod
    def viscous(cls):
        return cls(FrictionKind.VISCOUS_COULOMB)

    @classmethod
    def anisotropic(cls):
        return cls(FrictionKind.ANISOTROPIC_VISCOUS_COULOMB)

    @classmethod
    def coulomb(cls, epsilon=1e-5):
        return cls(FrictionKind.SMOOTHED_COULOMB, float(epsilon))

    @classmethod
    def parse(cls, name):
        kind = FrictionKind(name)
        if kind is FrictionKind.SMOOTHED_COULOMB:
            return cls.coulomb()
        return cls(kind)

    @property
    def is_linear(self):
        return self.kind is not FrictionKind.SMOOTHED_COULOMB


def h_scalar(mu, Fz, speed, epsilon=math.inf):
    """Scalar traction coefficient ``-mu Fz (eps + v) / (eps + v^2)``.

    ``epsilon=inf`` is the viscous-Coulomb limit and returns ``-mu Fz``
    exactly.
    """
    if math.isinf(epsilon):
        return -mu * Fz
    return -mu * Fz * (epsilon + speed) / (epsilon + speed * speed)


def h_anisotropic(mu, w, Fz, theta):
    w = np.asarray(w, float)
    R = rot2(theta)
    return -mu * Fz * (R @ (np.eye(2) + np.outer(w, w)) @ R.T)


def h_body(mu, w, Fz):
    """Body-frame traction matrix; ``h_anisotropic`` is its rotation."""
    w = np.asarray(w, float)
    return -mu * Fz * (np.eye(2) + np.outer(w, w))


def friction_force(H, pdot):
    return np.asarray(H, float) @ np.asarray(pdot, float)


def coulomb_force_exact(mu, Fz, pdot):
    pdot = np.asarray(pdot, float)
    v = np.hypot(pdot[0], pdot[1])
    if v == 0.0:
        raise ZeroVelocity("Coulomb friction direction is undefined at zero slip")
    return -pdot / v * mu * Fz


def traction_matrix(model: FrictionModel, mu, Fz, theta=0.0, w=(0.0, 0.0), pdot=None):
    """World-frame ``H`` for any friction model."""
    if model.kind is FrictionKind.ANISOTROPIC_VISCOUS_COULOMB:
        return h_anisotropic(mu, w, Fz, theta)
    if model.kind is FrictionKind.VISCOUS_COULOMB:
        return -mu * Fz * np.eye(2)
    if pdot is None:
        raise ValueError("smoothed Coulomb traction depends on the slip velocity")
    v = float(np.hypot(*np.asarray(pdot, float)[:2]))
    return h_scalar(mu, Fz, v, model.epsilon) * np.eye(2)


# --------------------------------------------------------------------------
# viscous vs Coulomb comparison map
# --------------------------------------------------------------------------

def local_viscous_force(v, v0=(1.0, 0.0)):
    """Linear drag model fitted to unit Coulomb friction at ``v0``.

    The drag matrix is the Coulomb Jacobian at ``v0`` and the offset makes
    the forces agree at ``v0``.
    """
    v0 = np.asarray(v0, float)
    s0 = np.hypot(*v0)
    e = v0 / s0
    D = -(np.eye(2) - np.outer(e, e)) / s0
    v = np.asarray(v, float)
    return -e + (v - v0) @ D.T


def relative_error_map(vx, vy, v0=(1.0, 0.0)):
    """Relative error of the local viscous model against Coulomb friction.

    Both laws are positively homogeneous in the slip velocity, so each grid
    velocity is first rescaled to the speed ``|v0|`` before comparing.
    ``vx``/``vy`` broadcast together; the origin must be excluded.
    """
    vx, vy = np.broadcast_arrays(np.asarray(vx, float), np.asarray(vy, float))
    v = np.stack([vx, vy], axis=-1)
    speed = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(speed == 0):
        raise ZeroVelocity("relative error map is undefined at zero slip")
    s0 = np.hypot(*np.asarray(v0, float))
    v_n = v / speed * s0
    Fc = -v_n / s0
    Fv = local_viscous_force(v_n, v0)
    return np.linalg.norm(Fv - Fc, axis=-1) / np.linalg.norm(Fc, axis=-1)


def error_grid(half_width=0.5, n=101, v0=(1.0, 0.0)):
    """Square grid of velocities ``v0 + dv`` with ``|dv_i| <= half_width``."""
    d = np.linspace(-half_width, half_width, n)
    dx, dy = np.meshgrid(d, d, indexing="xy")
    return v0[0] + dx.ravel(), v0[1] + dy.ravel()


def write_error_map_csv(path, vx, vy, err):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["vx", "vy", "rel_err"])
        for row in zip(vx, vy, err):
            w.writerow([f"{x:.17g}" for x in row])
