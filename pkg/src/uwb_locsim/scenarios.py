"""Scenario configuration I/O and built-in deployment presets.

The JSON layout::

    {
      "area": {"w": 9.0, "h": 20.0},
      "anchors": [{"id": "a1", "x": 0.0, "y": 0.0, "z": 3.0}, ...],
      "walls": [{"ax": 0.0, "ay": 13.0, "bx": 9.0, "by": 13.0,
                 "material": "concrete"}],
      "grid_step": 0.25,
      "tag_height": 1.2,
      "runs": 5,
      "seed": 42,
      "models": {"los": {"family": "gaussian",
                         "params": {"mu": 0.004, "sigma": 0.071}}, ...},
      "solver": {"delta": 0.001, "k_max": 10, "c": 0.1,
                 "x_r_mode": "median"},
      "diversity": null
    }

All lengths are meters. The presets ``paper-los``, ``paper-drywall``
and ``paper-concrete`` describe a 9 x 20 m floor with four ceiling
anchors (two opposing corners at 3.0 m, the others at 2.7 m) and, for
the NLOS variants, a dividing wall at y = 13 m that splits the floor
into 9 x 13 m and 9 x 7 m rooms. The tag grid default of 1.2 m above
the floor approximates a hand-held device; the grid height affects the
vertical dilution of precision, so override it when modeling other
carry positions.
"""

from __future__ import annotations

import json

from . import distributions
from .distributions import BurrXII, Gaussian
from .errors import DataError
from .geometry import Anchor, Point3, Wall
from .simulator import DiversityConfig, Scenario
from .solver import SolverConfig

PRESETS = ("paper-los", "paper-drywall", "paper-concrete")

_DEFAULT_MODELS = {
    "los": Gaussian(mu=0.004, sigma=0.071),
    "drywall": Gaussian(mu=-0.043, sigma=0.092),
    "concrete": BurrXII(c=9.64, d=0.98, mu=-0.46, sigma=0.72),
    "human": BurrXII(c=32.84, d=0.24, mu=-1.63, sigma=1.66),
}


def preset_scenario(name: str) -> Scenario:
    """One of the built-in floor deployments; see the module docstring."""
    if name not in PRESETS:
        raise DataError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    walls: tuple[Wall, ...] = ()
    if name == "paper-drywall":
        walls = (Wall(a=(0.0, 13.0), b=(9.0, 13.0), material="drywall"),)
    elif name == "paper-concrete":
        walls = (Wall(a=(0.0, 13.0), b=(9.0, 13.0), material="concrete"),)
    return Scenario(
        area=(9.0, 20.0),
        anchors=(
            Anchor("a1", Point3(0.0, 0.0, 3.0)),
            Anchor("a2", Point3(9.0, 0.0, 2.7)),
            Anchor("a3", Point3(9.0, 20.0, 3.0)),
            Anchor("a4", Point3(0.0, 20.0, 2.7)),
        ),
        walls=walls,
        grid_step=0.25,
        tag_height=1.2,
        runs=5,
        seed=42,
        model_table=dict(_DEFAULT_MODELS),
        solver=SolverConfig(),
        diversity=None,
    )


def _need(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise DataError(f"scenario config: missing {key!r} in {context}")
    return mapping[key]


def scenario_from_dict(config: dict) -> Scenario:
    """Build a scenario from its JSON form, naming any offending field."""
    if not isinstance(config, dict):
        raise DataError("scenario config must be a JSON object")
    area_cfg = _need(config, "area", "scenario")
    area = (float(_need(area_cfg, "w", "area")), float(_need(area_cfg, "h", "area")))

    anchors = []
    for i, spec in enumerate(_need(config, "anchors", "scenario")):
        anchors.append(
            Anchor(
                id=str(_need(spec, "id", f"anchors[{i}]")),
                position=Point3(
                    float(_need(spec, "x", f"anchors[{i}]")),
                    float(_need(spec, "y", f"anchors[{i}]")),
                    float(_need(spec, "z", f"anchors[{i}]")),
                ),
            )
        )

    walls = []
    for i, spec in enumerate(config.get("walls", [])):
        walls.append(
            Wall(
                a=(float(_need(spec, "ax", f"walls[{i}]")), float(_need(spec, "ay", f"walls[{i}]"))),
                b=(float(_need(spec, "bx", f"walls[{i}]")), float(_need(spec, "by", f"walls[{i}]"))),
                material=str(_need(spec, "material", f"walls[{i}]")),
            )
        )

    models = {
        condition: distributions.from_dict(spec)
        for condition, spec in _need(config, "models", "scenario").items()
    }

    solver_cfg = config.get("solver", {})
    solver = SolverConfig(
        delta=float(solver_cfg.get("delta", 1e-3)),
        k_max=int(solver_cfg.get("k_max", 10)),
        c=float(solver_cfg.get("c", 0.1)),
        x_r_mode=str(solver_cfg.get("x_r_mode", "median")),
        weights=tuple(solver_cfg["weights"]) if "weights" in solver_cfg else None,
    )

    diversity_cfg = config.get("diversity")
    diversity = None
    if diversity_cfg:
        diversity = DiversityConfig(
            channels=int(_need(diversity_cfg, "channels", "diversity")),
            strategy=str(_need(diversity_cfg, "strategy", "diversity")),
        )

    return Scenario(
        area=area,
        anchors=tuple(anchors),
        walls=tuple(walls),
        grid_step=float(_need(config, "grid_step", "scenario")),
        tag_height=float(_need(config, "tag_height", "scenario")),
        runs=int(_need(config, "runs", "scenario")),
        seed=int(_need(config, "seed", "scenario")),
        model_table=models,
        solver=solver,
        diversity=diversity,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    out = {
        "area": {"w": scenario.area[0], "h": scenario.area[1]},
        "anchors": [
            {"id": a.id, "x": a.position.x, "y": a.position.y, "z": a.position.z}
            for a in scenario.anchors
        ],
        "walls": [
            {"ax": w.a[0], "ay": w.a[1], "bx": w.b[0], "by": w.b[1], "material": w.material}
            for w in scenario.walls
        ],
        "grid_step": scenario.grid_step,
        "tag_height": scenario.tag_height,
        "runs": scenario.runs,
        "seed": scenario.seed,
        "models": {
            condition: distributions.to_dict(model)
            for condition, model in sorted(scenario.model_table.items())
        },
        "solver": {
            "delta": scenario.solver.delta,
            "k_max": scenario.solver.k_max,
            "c": scenario.solver.c,
            "x_r_mode": scenario.solver.x_r_mode,
        },
        "diversity": None,
    }
    if scenario.solver.weights is not None:
        out["solver"]["weights"] = list(scenario.solver.weights)
    if scenario.diversity is not None:
        out["diversity"] = {
            "channels": scenario.diversity.channels,
            "strategy": scenario.diversity.strategy,
        }
    return out


def load_scenario(path: str) -> Scenario:
    """Read a scenario config file (JSON)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            config = json.load(handle)
    except OSError as exc:
        raise DataError(f"cannot read scenario config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return scenario_from_dict(config)
