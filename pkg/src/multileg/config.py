"""Robot configuration files (JSON, strict schema)."""

from __future__ import annotations

import json
from dataclasses import dataclass

import jsonschema

from .core import LegParam, RobotModel
from .coulomb import HomotopySchedule, default_schedule
from .friction import FrictionModel
from .trajectory import GaitKind, GaitSpec

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["legs"],
    "properties": {
        "weight": _POS,
        "legs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["stiffness"],
                "properties": {
                    "stiffness": _POS,
                    "mu": {"type": "number", "minimum": 0},
                    "traction_dir": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                },
            },
        },
        "gait": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": [k.value for k in GaitKind]},
                "frequency": _POS,
                "duty": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "stance_sweep": _POS,
                "phase_offsets": {"type": "array", "items": _NUM, "minItems": 1},
            },
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "friction_model": {"enum": ["viscous", "coulomb", "anisotropic"]},
                "homotopy": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "eps0": _POS,
                        "shrink": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                        "rel_tol": _POS,
                        "max_stages": {"type": "integer", "minimum": 1},
                    },
                },
            },
        },
    },
}


@dataclass(frozen=True)
class RobotConfig:
    robot: RobotModel
    gait: GaitSpec | None = None
    friction_model: str = "viscous"
    schedule: HomotopySchedule = default_schedule()

    def model(self, name=None) -> FrictionModel:
        m = FrictionModel.parse(name or self.friction_model)
        if not m.is_linear:
            m = FrictionModel.coulomb(self.schedule.eps0)
        return m


def parse_config(doc) -> RobotConfig:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValueError(f"config error at {where}: {exc.message}") from None
    legs = tuple(LegParam(l["stiffness"], l.get("mu", 1.0), tuple(l.get("traction_dir", (0.0, 0.0))))
                 for l in doc["legs"])
    robot = RobotModel(legs, doc.get("weight", 1.0))
    gait = None
    if "gait" in doc:
        g = dict(doc["gait"])
        kind = GaitKind(g.pop("kind", "tripod"))
        base = GaitSpec.metachronal() if kind is GaitKind.METACHRONAL_CUBIC else GaitSpec.tripod()
        gait = GaitSpec(kind, g.get("frequency", base.frequency), g.get("duty", base.duty),
                        g.get("stance_sweep", base.stance_sweep),
                        g.get("phase_offsets", base.phase_offsets))
    solver = doc.get("solver", {})
    sched = HomotopySchedule(**solver.get("homotopy", {}))
    return RobotConfig(robot, gait, solver.get("friction_model", "viscous"), sched)


def load_config(path) -> RobotConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(doc)


def config_document(cfg: RobotConfig):
    doc = {
        "weight": float(cfg.robot.weight),
        "legs": [{"stiffness": float(l.stiffness), "mu": float(l.mu),
                  "traction_dir": [float(v) for v in l.traction_dir]} for l in cfg.robot.legs],
    }
    if cfg.gait is not None:
        g = cfg.gait
        doc["gait"] = {"kind": g.kind.value, "frequency": g.frequency, "duty": g.duty,
                       "stance_sweep": g.stance_sweep, "phase_offsets": list(g.phase_offsets)}
    s = cfg.schedule
    doc["solver"] = {"friction_model": cfg.friction_model,
                     "homotopy": {"eps0": s.eps0, "shrink": s.shrink, "rel_tol": s.rel_tol,
                                  "max_stages": s.max_stages}}
    return doc


def save_config(path, cfg: RobotConfig):
    # json writes floats with the shortest repr that round-trips exactly
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_document(cfg), fh, indent=2)
        fh.write("\n")
