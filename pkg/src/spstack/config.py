"""JSON configuration: geometry, masses, initializer and optimizer settings,
plus per-scenario overrides.

Every section is optional; omitted values fall back to the library
defaults.  Geometry is given either parametrically (circle radius, cluster
half-angle, leg limits) or as explicit anchor tables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .initializer import InitializerParams
from .optimize import OptimizerConfig
from .platform import PlatformGeometry, default_geometry
from .scenarios import ScenarioSpec, builtin_scenarios
from .spatial import TaaPose, Transform
from .stack import PlatformStack
from .statics import MassModel


@dataclass(frozen=True)
class Config:
    geometry: PlatformGeometry = field(default_factory=default_geometry)
    n_platforms: int = 4
    masses: MassModel = field(
        default_factory=lambda: MassModel(payload_mass=5.0, payload_offset=0.2)
    )
    initializer: InitializerParams = field(default_factory=InitializerParams)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    scenario_overrides: dict = field(default_factory=dict)
    extra_scenarios: tuple[ScenarioSpec, ...] = ()

    def stack(self) -> PlatformStack:
        return PlatformStack(
            platforms=(self.geometry,) * self.n_platforms,
            base=Transform.identity(),
            payload_mass=self.masses.payload_mass,
            payload_offset=self.masses.payload_offset,
        )

    def scenarios(self) -> list[ScenarioSpec]:
        specs = []
        for spec in builtin_scenarios():
            spec = replace(
                spec,
                masses=self.masses,
                config=self.optimizer,
                initializer=self.initializer,
            )
            override = self.scenario_overrides.get(spec.name)
            if override:
                spec = _apply_scenario_override(spec, override, self)
            specs.append(spec)
        specs.extend(self.extra_scenarios)
        return specs


def _filtered_kwargs(cls, data: dict) -> dict:
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return dict(data)


def _geometry_from_dict(data: dict) -> PlatformGeometry:
    if "bottom_anchors" in data or "top_anchors" in data:
        return PlatformGeometry(**_filtered_kwargs(PlatformGeometry, data))
    known = dict(data)
    if "cluster_half_angle_deg" in known:
        known["cluster_half_angle"] = np.deg2rad(known.pop("cluster_half_angle_deg"))
    if "deviation_max_deg" in known:
        known["deviation_max"] = np.deg2rad(known.pop("deviation_max_deg"))
    return default_geometry(**known)


def _scenario_from_dict(data: dict, config: Config) -> ScenarioSpec:
    goal = TaaPose.from_dict(data["goal"])
    masses = config.masses
    if "masses" in data:
        masses = replace(masses, **_filtered_kwargs(MassModel, data["masses"]))
    optimizer = config.optimizer
    if "optimizer" in data:
        optimizer = replace(optimizer, **_filtered_kwargs(OptimizerConfig, data["optimizer"]))
    return ScenarioSpec(
        name=data["name"],
        goal=goal,
        masses=masses,
        config=optimizer,
        initializer=config.initializer,
        init_swing=float(data.get("init_swing", 0.0)),
        description=data.get("description", ""),
    )


def _apply_scenario_override(spec: ScenarioSpec, override: dict, config: Config) -> ScenarioSpec:
    data = dict(override)
    if "goal" in data:
        spec = replace(spec, goal=TaaPose.from_dict(data.pop("goal")))
    if "masses" in data:
        spec = replace(
            spec, masses=replace(spec.masses, **_filtered_kwargs(MassModel, data.pop("masses")))
        )
    if "optimizer" in data:
        spec = replace(
            spec,
            config=replace(spec.config, **_filtered_kwargs(OptimizerConfig, data.pop("optimizer"))),
        )
    if "init_swing" in data:
        spec = replace(spec, init_swing=float(data.pop("init_swing")))
    if "description" in data:
        spec = replace(spec, description=str(data.pop("description")))
    if data:
        raise ValueError(f"unknown scenario override keys: {sorted(data)}")
    return spec


def load_config(path: str | Path | None) -> Config:
    """Load settings from a JSON file; None gives the library defaults."""
    if path is None:
        return Config()
    data = json.loads(Path(path).read_text())
    config = Config(
        geometry=_geometry_from_dict(data.get("geometry", {})),
        n_platforms=int(data.get("n_platforms", 4)),
        masses=MassModel(**_filtered_kwargs(MassModel, data.get("masses", {}))),
        initializer=InitializerParams(
            **_filtered_kwargs(InitializerParams, data.get("initializer", {}))
        ),
        optimizer=OptimizerConfig(
            **_filtered_kwargs(OptimizerConfig, data.get("optimizer", {}))
        ),
        scenario_overrides=data.get("scenario_overrides", {}),
    )
    extras = tuple(
        _scenario_from_dict(entry, config) for entry in data.get("scenarios", [])
    )
    return replace(config, extra_scenarios=extras)
