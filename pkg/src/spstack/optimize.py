"""Constraint evaluation, the weighted force/deviation objective, and the
constrained minimization that refines an initial stack pose.

The decision vector holds the 6-vector poses of the interior plates; the
end plate stays pinned at the goal.  Minimization runs scipy's SLSQP with
central-difference gradients; every candidate the solver touches is
screened so the returned pose is always feasible and never worse than the
starting point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateConfigurationError, SingularConfigurationError
from .initializer import InitResult
from .spatial import Transform, taa_from_transform
from .stack import PlatformStack, StackPose, pack_decision, stack_arrays, unpack_decision
from .statics import ForceMatrix, MassModel, forces_from_arrays

PENALTY_OBJECTIVE = 1e9  # stands in for the objective at singular poses
_FAIL_MARGIN = -1e6  # force margins reported when the statics solve fails

_DEFAULT_TOL = (1e-3, 1e-3, 1e-3, 1e-2, 1e-2, 1e-2)


@dataclass(frozen=True)
class OptimizerConfig:
    force_weight: float = 1.0
    deviation_weight: float = 1.0
    pose_tolerances: np.ndarray = _DEFAULT_TOL  # 3 meters then 3 radians
    f_tension_max: float = 200.0  # N
    f_compression_max: float = 200.0  # N
    max_iterations: int = 150
    constraint_tolerance: float = 1e-6
    convergence_tolerance: float = 1e-8  # objective delta for termination
    smooth_max_beta: float | None = None  # softmax temperature; None = hard max
    gradient_step: float = 1e-6

    def __post_init__(self):
        tol = np.array(self.pose_tolerances, dtype=float)
        if tol.shape != (6,):
            raise ValueError("pose_tolerances must be a 6-vector")
        if np.any(tol <= 0.0):
            raise ValueError("pose_tolerances must be positive")
        tol.setflags(write=False)
        object.__setattr__(self, "pose_tolerances", tol)
        if self.force_weight < 0.0 or self.deviation_weight < 0.0:
            raise ValueError("weights must be nonnegative")


@dataclass(frozen=True)
class ConstraintReport:
    """Constraint margins by group; nonnegative means satisfied."""

    leg_min: np.ndarray  # (6, n) meters above the short limit
    leg_max: np.ndarray  # (6, n) meters below the long limit
    deviation: np.ndarray  # (6, n) radians below the max leg angle
    tension: np.ndarray  # (6, n) N below the tension limit
    compression: np.ndarray  # (6, n) N above the negative compression limit
    z_continuity: np.ndarray  # (6, n) meters of top-over-bottom separation
    pose: np.ndarray  # (6,) end-effector tolerance minus error, per DOF

    def groups(self) -> dict[str, np.ndarray]:
        return {
            "leg_min": self.leg_min,
            "leg_max": self.leg_max,
            "deviation": self.deviation,
            "tension": self.tension,
            "compression": self.compression,
            "z_continuity": self.z_continuity,
            "pose": self.pose,
        }

    def as_vector(self) -> np.ndarray:
        return np.concatenate([g.ravel() for g in self.groups().values()])

    def min_margin(self) -> float:
        return float(self.as_vector().min())

    def worst(self) -> dict[str, float]:
        return {name: float(g.min()) for name, g in self.groups().items()}

    def satisfied(self, tolerance: float = 0.0) -> bool:
        return self.min_margin() >= -tolerance

    def to_dict(self) -> dict:
        return {name: float(g.min()) for name, g in self.groups().items()}


@dataclass(frozen=True)
class OptimizationResult:
    pose: StackPose
    leg_matrix: np.ndarray
    forces: ForceMatrix
    forces_initial: ForceMatrix
    objective_initial: float
    objective_final: float
    constraint_report: ConstraintReport
    converged: bool
    iterations: int

    def to_dict(self) -> dict:
        return {
            "pose": self.pose.to_dict(),
            "leg_matrix": self.leg_matrix.tolist(),
            "forces": self.forces.values.tolist(),
            "forces_initial": self.forces_initial.values.tolist(),
            "objective_initial": self.objective_initial,
            "objective_final": self.objective_final,
            "constraint_worst_margins": self.constraint_report.to_dict(),
            "converged": self.converged,
            "iterations": self.iterations,
        }


def plate_deviation_angles(stack: PlatformStack, pose: StackPose) -> np.ndarray:
    """Angle of each plate's displacement from its rest direction.

    Plate i rests straight along the local z of the plate below it, so the
    angle is measured between that axis and the actual plate-to-plate
    displacement.  Raises on coincident plate origins.
    """
    out = np.empty(stack.n)
    for i in range(1, stack.n + 1):
        prev = pose.plates[i - 1]
        vec = pose.plates[i].translation - prev.translation
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            raise DegenerateConfigurationError(
                f"plates {i - 1} and {i} have coincident origins"
            )
        cosv = float(np.dot(vec / norm, prev.local_z()))
        out[i - 1] = np.arccos(np.clip(cosv, -1.0, 1.0))
    return out


def _max_force(values: np.ndarray, beta: float | None) -> float:
    mags = np.abs(values)
    if beta is None:
        return float(mags.max())
    # Softmax upper bound on the hard max; tighter as beta grows.
    peak = mags.max()
    return float(peak + np.log(np.exp(beta * (mags - peak)).sum()) / beta)


@dataclass(frozen=True)
class PoseEvaluation:
    pose: StackPose
    leg_matrix: np.ndarray
    forces: ForceMatrix | None
    objective: float
    report: ConstraintReport


def evaluate_pose(
    stack: PlatformStack,
    masses: MassModel,
    config: OptimizerConfig,
    pose: StackPose,
    goal: Transform,
) -> PoseEvaluation:
    """One pass computing objective and all constraint margins for a pose."""
    arrays = stack_arrays(stack, pose)
    n = stack.n
    leg_min = np.empty((6, n))
    leg_max = np.empty((6, n))
    deviation = np.empty((6, n))
    for k, geom in enumerate(stack.platforms):
        leg_min[:, k] = arrays.lengths[:, k] - geom.leg_min
        leg_max[:, k] = geom.leg_max - arrays.lengths[:, k]
        deviation[:, k] = geom.deviation_max - arrays.deviations[:, k]
    try:
        forces = forces_from_arrays(stack, pose, masses, arrays)
        tension = config.f_tension_max - forces.values
        compression = forces.values + config.f_compression_max
        peak = _max_force(forces.values, config.smooth_max_beta)
    except SingularConfigurationError:
        forces = None
        tension = np.full((6, n), _FAIL_MARGIN)
        compression = np.full((6, n), _FAIL_MARGIN)
        peak = None
    err = taa_from_transform(pose.end_effector).canonical().as_vector() - (
        taa_from_transform(goal).canonical().as_vector()
    )
    pose_margin = config.pose_tolerances - np.abs(err)
    report = ConstraintReport(
        leg_min=leg_min,
        leg_max=leg_max,
        deviation=deviation,
        tension=tension,
        compression=compression,
        z_continuity=arrays.z_margins.copy(),
        pose=pose_margin,
    )
    if peak is None:
        objective = PENALTY_OBJECTIVE
    else:
        try:
            sway = plate_deviation_angles(stack, pose)
            objective = config.force_weight * peak + config.deviation_weight * float(
                np.sqrt(np.sum(sway**2))
            )
        except DegenerateConfigurationError:
            objective = PENALTY_OBJECTIVE
    return PoseEvaluation(pose, arrays.lengths.copy(), forces, objective, report)


def objective(
    stack: PlatformStack,
    masses: MassModel,
    config: OptimizerConfig,
    x,
    goal: Transform,
) -> float:
    """Weighted sum of the peak force magnitude and the root-sum-square
    plate deviation, evaluated at a decision vector."""
    pose = unpack_decision(stack, x, goal)
    return evaluate_pose(stack, masses, config, pose, goal).objective


def constraints(
    stack: PlatformStack,
    masses: MassModel,
    config: OptimizerConfig,
    x,
    goal: Transform,
) -> ConstraintReport:
    """All constraint margins at a decision vector; degenerate poses give
    negative margins instead of raising."""
    pose = unpack_decision(stack, x, goal)
    return evaluate_pose(stack, masses, config, pose, goal).report


class _CachedProblem:
    """Shared objective/constraint evaluation with gradient helpers.

    SLSQP asks for the objective, the margin vector and both Jacobians at
    overlapping points; caching by the decision-vector bytes makes each
    pipeline evaluation happen once.  Feasible iterates are tracked so the
    final answer can fall back to the best point seen.
    """

    def __init__(self, stack, masses, config, goal):
        self.stack = stack
        self.masses = masses
        self.config = config
        self.goal = goal
        self.cache: dict[bytes, tuple[float, np.ndarray]] = {}
        self.best_x: np.ndarray | None = None
        self.best_objective = np.inf

    def evaluate(self, x) -> tuple[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        pose = unpack_decision(self.stack, x, self.goal)
        ev = evaluate_pose(self.stack, self.masses, self.config, pose, self.goal)
        margins = ev.report.as_vector()
        out = (ev.objective, margins)
        self.cache[key] = out
        if (
            margins.min() >= -self.config.constraint_tolerance
            and ev.objective < self.best_objective
        ):
            self.best_objective = ev.objective
            self.best_x = x.copy()
        return out

    def fun(self, x) -> float:
        return self.evaluate(x)[0]

    def margins(self, x) -> np.ndarray:
        return self.evaluate(x)[1]

    def grad(self, x) -> np.ndarray:
        h = self.config.gradient_step
        out = np.empty(len(x))
        for i in range(len(x)):
            probe = np.zeros(len(x))
            probe[i] = h
            out[i] = (self.fun(x + probe) - self.fun(x - probe)) / (2.0 * h)
        return out

    def margins_jac(self, x) -> np.ndarray:
        h = self.config.gradient_step
        cols = []
        for i in range(len(x)):
            probe = np.zeros(len(x))
            probe[i] = h
            cols.append((self.margins(x + probe) - self.margins(x - probe)) / (2.0 * h))
        return np.column_stack(cols)


def optimize_pose(
    stack: PlatformStack,
    masses: MassModel,
    config: OptimizerConfig,
    goal: Transform,
    init: InitResult,
) -> OptimizationResult:
    """Refine a feasible initial pose, minimizing the force/deviation
    objective subject to every platform constraint.

    The end plate stays pinned at the goal.  The returned pose is the best
    feasible iterate encountered; if the solver cannot improve on the
    initial point, that point is returned unchanged with ``converged``
    set from its own feasibility.
    """
    if not init.feasible:
        raise ValueError("optimize_pose needs a feasible initial result")
    problem = _CachedProblem(stack, masses, config, goal)
    x0 = pack_decision(init.pose)
    objective_initial, margins0 = problem.evaluate(x0)
    initial_feasible = margins0.min() >= -config.constraint_tolerance

    result = minimize(
        problem.fun,
        x0,
        jac=problem.grad,
        method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": problem.margins, "jac": problem.margins_jac}
        ],
        options={
            "maxiter": config.max_iterations,
            "ftol": config.convergence_tolerance,
        },
    )

    final_x = problem.best_x if problem.best_x is not None else x0
    if problem.best_x is None and not initial_feasible:
        # No feasible point found anywhere; report the initial pose honestly.
        final_x = x0
    objective_final, _ = problem.evaluate(final_x)
    if objective_final > objective_initial:
        final_x, objective_final = x0, objective_initial

    pose = unpack_decision(stack, final_x, goal)
    detail = evaluate_pose(stack, masses, config, pose, goal)
    forces = detail.forces
    if forces is None:
        raise SingularConfigurationError("final pose has a singular platform")
    init_detail = evaluate_pose(stack, masses, config, init.pose, goal)
    if init_detail.forces is None:
        raise SingularConfigurationError("initial pose has a singular platform")
    return OptimizationResult(
        pose=pose,
        leg_matrix=detail.leg_matrix,
        forces=forces,
        forces_initial=init_detail.forces,
        objective_initial=objective_initial,
        objective_final=detail.objective,
        constraint_report=detail.report,
        converged=detail.report.satisfied(config.constraint_tolerance),
        iterations=int(result.nit),
    )
