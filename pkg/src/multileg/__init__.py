"""Quasi-static multi-legged locomotion with slipping feet."""

from ._jit import backend_name
from .connection import (
    ConnectionMatrices,
    PlanarSolution,
    assemble_balance,
    full_frame_solve,
    solve_planar,
)
from .core import (
    BodyVelocity,
    LegParam,
    PoseState,
    RobotModel,
    ShapeFrame,
    body_transform,
    foot_height,
    foot_planar_kinematics,
)
from .coulomb import CoulombSolution, HomotopySchedule, default_schedule, solve_coulomb
from .errors import (
    DegenerateFit,
    DegenerateTilt,
    InsufficientData,
    LengthMismatch,
    MultilegError,
    NoConvergence,
    NoSupport,
    SingularBalance,
    SingularSupport,
    SolverError,
    ZeroVelocity,
)
from .friction import FrictionKind, FrictionModel
from .support import SupportSolution, SupportState, solve_support
from .trajectory import GaitKind, GaitSpec, ShapeTrajectory, TrajectoryLog, simulate

__version__ = "0.1.0"

__all__ = [
    "BodyVelocity", "ConnectionMatrices", "CoulombSolution", "DegenerateFit", "DegenerateTilt",
    "FrictionKind", "FrictionModel", "GaitKind", "GaitSpec", "HomotopySchedule", "InsufficientData",
    "LegParam", "LengthMismatch", "MultilegError", "NoConvergence", "NoSupport", "PlanarSolution",
    "PoseState", "RobotModel", "ShapeFrame", "ShapeTrajectory", "SingularBalance",
    "SingularSupport", "SolverError", "SupportSolution", "SupportState", "TrajectoryLog",
    "ZeroVelocity", "assemble_balance", "backend_name", "body_transform", "default_schedule",
    "foot_height", "foot_planar_kinematics", "full_frame_solve", "simulate", "solve_coulomb",
    "solve_planar", "solve_support",
]
