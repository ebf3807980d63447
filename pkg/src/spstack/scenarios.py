"""Built-in demonstration scenarios and the end-to-end pipeline driver.

A scenario bundles a goal end-effector pose with mass and optimizer
settings; running one chains the initializer, the constrained optimizer
and the statics solve, and collects force statistics for both poses.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .initializer import InitResult, InitializerParams, initial_condition
from .optimize import OptimizerConfig, OptimizationResult, evaluate_pose, optimize_pose
from .platform import default_geometry
from .spatial import TaaPose, Transform, transform_from_taa
from .stack import PlatformStack, StackPose, stack_leg_matrix
from .statics import ForceMatrix, MassModel, stack_leg_forces

# Goal poses below (heights, reaches, tilt magnitudes) are fixed artifact
# constants chosen to be feasible under the default geometry; only the
# headline numbers (0.8 m lateral travel, the 90 degree tilt, the 5 kg
# payload at 0.2 m) are externally specified.
DEFAULT_PAYLOAD = dict(payload_mass=5.0, payload_offset=0.2)


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    goal: TaaPose
    masses: MassModel = field(default_factory=lambda: MassModel(**DEFAULT_PAYLOAD))
    config: OptimizerConfig = field(default_factory=OptimizerConfig)
    initializer: InitializerParams = field(default_factory=InitializerParams)
    init_swing: float = 0.0  # deliberate lateral bow of the initial pose, meters
    description: str = ""


@dataclass(frozen=True)
class ScenarioReport:
    spec: ScenarioSpec
    init_feasible: bool
    pose_initial: StackPose
    pose_final: StackPose | None
    init_forces: ForceMatrix | None
    final_forces: ForceMatrix | None
    max_abs_initial: float | None
    max_abs_final: float | None
    mean_abs_initial: float | None
    mean_abs_final: float | None
    objective_initial: float | None
    objective_final: float | None
    constraint_worst: dict | None
    converged: bool
    iterations: int
    runtime_s: float

    def to_dict(self, include_runtime: bool = True) -> dict:
        out = {
            "scenario": self.spec.name,
            "goal": self.spec.goal.to_dict(),
            "init_feasible": self.init_feasible,
            "pose_initial": self.pose_initial.to_dict(),
            "pose_final": self.pose_final.to_dict() if self.pose_final else None,
            "forces_initial": self.init_forces.values.tolist() if self.init_forces else None,
            "forces_final": self.final_forces.values.tolist() if self.final_forces else None,
            "max_abs_initial": self.max_abs_initial,
            "max_abs_final": self.max_abs_final,
            "mean_abs_initial": self.mean_abs_initial,
            "mean_abs_final": self.mean_abs_final,
            "objective_initial": self.objective_initial,
            "objective_final": self.objective_final,
            "constraint_worst_margins": self.constraint_worst,
            "converged": self.converged,
            "iterations": self.iterations,
        }
        if include_runtime:
            out["runtime_s"] = self.runtime_s
        return out


def default_stack(masses: MassModel | None = None, n: int = 4) -> PlatformStack:
    geom = default_geometry()
    if masses is None:
        masses = MassModel(**DEFAULT_PAYLOAD)
    return PlatformStack(
        platforms=(geom,) * n,
        base=Transform.identity(),
        payload_mass=masses.payload_mass,
        payload_offset=masses.payload_offset,
    )


def builtin_scenarios() -> list[ScenarioSpec]:
    """The five demonstration poses for the default 4-platform stack."""
    height = 4 * default_geometry().home_height  # home end-effector height
    return [
        ScenarioSpec(
            name="horizontal-translation",
            goal=TaaPose([0.8, 0.0, 0.78 * height], [0.0, 0.0, 0.0]),
            init_swing=0.25,
            description="End effector level, 0.8 m to the side; the initial "
            "pose is deliberately bowed sideways.",
        ),
        ScenarioSpec(
            name="tilt-90deg",
            goal=TaaPose([0.2, 0.0, 0.62 * height], [0.0, np.pi / 2, 0.0]),
            description="End effector pitched 90 degrees from the base "
            "plate, 0.2 m ahead of the origin.",
        ),
        ScenarioSpec(
            name="inchworm-precontact",
            goal=TaaPose([0.72, 0.0, 0.22 * height], [0.0, 1.75, 0.0]),
            description="Reach-down toward the floor ahead of the base, "
            "just before end-effector contact.",
        ),
        ScenarioSpec(
            name="vertical-lift",
            goal=TaaPose([0.0, 0.0, 0.66 * height], [0.0, 0.0, 0.0]),
            description="End effector dropped straight down, staying "
            "upright, to pick an object off the floor.",
        ),
        ScenarioSpec(
            name="orientation-transition",
            goal=TaaPose([0.3, 0.0, 0.8 * height], [0.0, 0.9, 0.0]),
            description="Rotated end effector while elevated, as when "
            "turning a carried object over.",
        ),
    ]


def scenario_by_name(name: str) -> ScenarioSpec:
    for spec in builtin_scenarios():
        if spec.name == name:
            return spec
    raise KeyError(f"unknown scenario {name!r}")


def swung_out_variant(
    stack: PlatformStack,
    masses: MassModel,
    config: OptimizerConfig,
    goal: Transform,
    init: InitResult,
    amount: float,
) -> InitResult:
    """Bow the interior plates sideways while staying feasible.

    Mimics the worst-case initial poses a helper-arm solution can produce;
    the offset is halved until the constraint suite passes, and the
    original result is returned if no feasible bow exists.
    """
    if amount <= 0.0 or not init.feasible:
        return init
    lateral = goal.translation - stack.base.translation
    lateral = np.array([lateral[0], lateral[1], 0.0])
    norm = np.linalg.norm(lateral)
    direction = lateral / norm if norm > 1e-9 else np.array([1.0, 0.0, 0.0])
    perp = np.cross([0.0, 0.0, 1.0], direction)
    n = stack.n
    scale = amount
    for _ in range(10):
        plates = [init.pose.plates[0]]
        for k in range(1, n):
            bump = scale * np.sin(np.pi * k / n)
            old = init.pose.plates[k]
            plates.append(Transform(old.rotation, old.translation + bump * perp))
        plates.append(init.pose.plates[n])
        pose = StackPose(tuple(plates))
        ev = evaluate_pose(stack, masses, config, pose, goal)
        if ev.report.satisfied():
            return InitResult(
                pose=pose,
                leg_matrix=stack_leg_matrix(stack, pose),
                feasible=True,
                link_length=init.link_length,
                attempts=init.attempts,
            )
        scale *= 0.5
    return init


def run_scenario(spec: ScenarioSpec, stack: PlatformStack | None = None) -> ScenarioReport:
    """Initialize, optimize and solve forces for one scenario.

    Deterministic for fixed inputs.  An infeasible initialization flags
    the report and skips the optimization.
    """
    if stack is None:
        stack = default_stack(spec.masses)
    goal = transform_from_taa(spec.goal.canonical())
    start = time.perf_counter()
    init = initial_condition(stack, goal, spec.initializer)
    if not init.feasible:
        runtime = time.perf_counter() - start
        return ScenarioReport(
            spec=spec,
            init_feasible=False,
            pose_initial=init.pose,
            pose_final=None,
            init_forces=None,
            final_forces=None,
            max_abs_initial=None,
            max_abs_final=None,
            mean_abs_initial=None,
            mean_abs_final=None,
            objective_initial=None,
            objective_final=None,
            constraint_worst=None,
            converged=False,
            iterations=0,
            runtime_s=runtime,
        )
    if spec.init_swing > 0.0:
        init = swung_out_variant(
            stack, spec.masses, spec.config, goal, init, spec.init_swing
        )
    result = optimize_pose(stack, spec.masses, spec.config, goal, init)
    runtime = time.perf_counter() - start
    return ScenarioReport(
        spec=spec,
        init_feasible=True,
        pose_initial=init.pose,
        pose_final=result.pose,
        init_forces=result.forces_initial,
        final_forces=result.forces,
        max_abs_initial=result.forces_initial.max_abs(),
        max_abs_final=result.forces.max_abs(),
        mean_abs_initial=result.forces_initial.mean_abs(),
        mean_abs_final=result.forces.mean_abs(),
        objective_initial=result.objective_initial,
        objective_final=result.objective_final,
        constraint_worst=result.constraint_report.to_dict(),
        converged=result.converged,
        iterations=result.iterations,
        runtime_s=runtime,
    )


def format_force_csv(initial: ForceMatrix, final: ForceMatrix | None) -> str:
    """Two-block CSV: initial then final forces, 3 decimal places.

    Columns are platforms SP1..SPn, rows are legs 1..6 within each block.
    """
    n = initial.n
    lines = ["pose,leg," + ",".join(f"SP{k + 1}" for k in range(n))]
    blocks = [("initial", initial)]
    if final is not None:
        blocks.append(("final", final))
    for label, matrix in blocks:
        for leg in range(6):
            cells = ",".join(f"{v:.3f}" for v in matrix.values[leg])
            lines.append(f"{label},{leg + 1},{cells}")
    return "\n".join(lines) + "\n"


def parse_force_csv(text: str) -> dict[str, np.ndarray]:
    """Inverse of format_force_csv: block label to 6 x n array."""
    rows: dict[str, list[list[float]]] = {}
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    for line in lines[1:]:
        cells = line.split(",")
        rows.setdefault(cells[0], []).append([float(v) for v in cells[2:]])
    return {label: np.array(vals) for label, vals in rows.items()}


def render_force_table(report: ScenarioReport) -> str:
    """Force CSV for a scenario report (initial block, then final)."""
    if report.init_forces is None:
        raise ValueError("report has no force data (initialization failed)")
    return format_force_csv(report.init_forces, report.final_forces)
