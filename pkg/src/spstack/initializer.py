"""Feasible initial stack poses via a virtual "helper" serial arm.

The helper arm replaces the n-platform stack with a 3n-DOF serial chain:
one co-located x/y/z revolute joint cluster per platform, clusters spaced
one link length apart along +z.  Solving the arm's IK for the goal pose and
placing the real plates at the midpoints between neighboring cluster frames
yields a stack pose that tends to respect the platform constraints.  When
it does not, the link length is rescanned outward from the home spacing
until a valid pose appears or the attempt budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .platform import PlatformGeometry
from .spatial import (
    Transform,
    axis_angle_from_rotation,
    rotation_from_axis_angle,
)
from .stack import (
    PlatformStack,
    StackPose,
    home_pose,
    stack_arrays,
    stack_leg_matrix,
)


@dataclass(frozen=True)
class HelperArm:
    """3n-DOF serial arm: n clusters of x/y/z revolute joints.

    The first cluster sits half a link above the arm base and the tip half a
    link beyond the last cluster, so plate midpoints line up with the home
    plate spacing and the straight arm reaches ``n_clusters * link_length``.
    """

    n_clusters: int
    link_length: float
    joint_angles: np.ndarray  # home configuration, (3n,)
    joint_limits: np.ndarray  # (3n, 2) min/max radians

    def __post_init__(self):
        angles = np.array(self.joint_angles, dtype=float)
        limits = np.array(self.joint_limits, dtype=float)
        dof = 3 * self.n_clusters
        if angles.shape != (dof,):
            raise ValueError(f"joint_angles must have shape ({dof},)")
        if limits.shape != (dof, 2):
            raise ValueError(f"joint_limits must have shape ({dof}, 2)")
        angles.setflags(write=False)
        limits.setflags(write=False)
        object.__setattr__(self, "joint_angles", angles)
        object.__setattr__(self, "joint_limits", limits)

    @property
    def dof(self) -> int:
        return 3 * self.n_clusters

    @property
    def reach(self) -> float:
        return self.n_clusters * self.link_length


@dataclass(frozen=True)
class InitializerParams:
    link_step: float = 0.02  # meters added/removed per scan step
    recursion_limit: int = 30  # total link lengths tried, home spacing included
    tol_translation: float = 1e-3  # meters
    tol_rotation: float = 1e-2  # radians
    joint_limit_margin: float = 0.0  # shrinks helper joint limits, radians

    def __post_init__(self):
        if self.link_step <= 0.0:
            raise ValueError("link_step must be positive")
        if self.recursion_limit < 1:
            raise ValueError("recursion_limit must be at least 1")


@dataclass(frozen=True)
class InitResult:
    pose: StackPose
    leg_matrix: np.ndarray  # 6 x n
    feasible: bool
    link_length: float  # helper-arm link length that produced the pose
    attempts: int


@dataclass(frozen=True)
class HelperIkResult:
    angles: np.ndarray | None
    translation_error: float
    rotation_error: float
    converged: bool
    iterations: int


def build_helper_arm(n: int, d: float, joint_limit: float = np.pi) -> HelperArm:
    """Arm with n x/y/z joint clusters spaced d apart along +z from the base;
    zero angles reach straight up."""
    if n < 1:
        raise ValueError("need at least one cluster")
    if not d > 0.0:
        raise ValueError("link length must be positive")
    dof = 3 * n
    limits = np.column_stack([np.full(dof, -joint_limit), np.full(dof, joint_limit)])
    return HelperArm(n, float(d), np.zeros(dof), limits)


def _rot_x(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_y(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rot_z(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def arm_kinematics(arm: HelperArm, angles):
    """Forward kinematics of the helper arm in its base frame.

    Returns (cluster_frames, tip, joint_axes, joint_origins): the
    post-rotation frame of every cluster, the tip transform, and per-joint
    world axes/origins for the geometric Jacobian.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (arm.dof,):
        raise ValueError(f"expected {arm.dof} joint angles")
    rot = np.eye(3)
    pos = np.zeros(3)
    half = 0.5 * arm.link_length
    axes = np.empty((arm.dof, 3))
    origins = np.empty((arm.dof, 3))
    frames = []
    for k in range(arm.n_clusters):
        step = half if k == 0 else arm.link_length
        pos = pos + rot[:, 2] * step
        base_rot = rot
        axes[3 * k] = base_rot[:, 0]
        rot = base_rot @ _rot_x(angles[3 * k])
        axes[3 * k + 1] = rot[:, 1]
        rot = rot @ _rot_y(angles[3 * k + 1])
        axes[3 * k + 2] = rot[:, 2]
        rot = rot @ _rot_z(angles[3 * k + 2])
        origins[3 * k : 3 * k + 3] = pos
        frames.append(Transform(rot, pos))
    tip = Transform(rot, pos + rot[:, 2] * half)
    return frames, tip, axes, origins


def arm_tip(arm: HelperArm, angles) -> Transform:
    return arm_kinematics(arm, angles)[1]


def _pose_error(tip: Transform, goal: Transform) -> np.ndarray:
    rot_err = axis_angle_from_rotation(goal.rotation @ tip.rotation.T)
    return np.concatenate([goal.translation - tip.translation, rot_err])


def helper_arm_ik(
    arm: HelperArm,
    goal: Transform,
    seed,
    tol_translation: float = 1e-3,
    tol_rotation: float = 1e-2,
    damping: float = 0.05,
    step_clamp: float = 0.2,
    max_iterations: int = 300,
) -> HelperIkResult:
    """Damped least-squares IK with per-step clamping to the joint limits.

    Non-convergence is reported through the result flag, not an exception;
    the link-length scan consumes failures routinely.
    """
    q = np.array(seed, dtype=float)
    if q.shape != (arm.dof,):
        raise ValueError(f"seed must have shape ({arm.dof},)")
    lo = arm.joint_limits[:, 0]
    hi = arm.joint_limits[:, 1]
    q = np.clip(q, lo, hi)
    lam2 = damping * damping
    best = None
    for it in range(max_iterations + 1):
        _, tip, axes, origins = arm_kinematics(arm, q)
        err = _pose_error(tip, goal)
        t_err = float(np.linalg.norm(err[:3]))
        r_err = float(np.linalg.norm(err[3:]))
        if best is None or t_err + r_err < best[0]:
            best = (t_err + r_err, t_err, r_err)
        if t_err <= tol_translation and r_err <= tol_rotation:
            return HelperIkResult(q, t_err, r_err, True, it)
        if it == max_iterations:
            break
        jac = np.empty((6, arm.dof))
        lever = tip.translation - origins
        jac[:3] = np.cross(axes, lever).T
        jac[3:] = axes.T
        core = jac @ jac.T + lam2 * np.eye(6)
        dq = jac.T @ np.linalg.solve(core, err)
        dq = np.clip(dq, -step_clamp, step_clamp)
        q = np.clip(q + dq, lo, hi)
    return HelperIkResult(None, best[1], best[2], False, max_iterations)


def _half_rotation(rot_a: np.ndarray, rot_b: np.ndarray) -> np.ndarray:
    """Geodesic midpoint orientation between two rotation matrices."""
    rel = axis_angle_from_rotation(rot_a.T @ rot_b)
    return rot_a @ rotation_from_axis_angle(0.5 * rel)


def place_plates(arm: HelperArm, angles, goal: Transform) -> StackPose:
    """Plates from a solved arm: base at the arm base, end plate at the
    goal, interior plates midway between neighboring cluster frames.

    Interior translations are arithmetic midpoints; orientations are the
    geodesic half-interpolation between the two cluster frames, which is
    the orientation minimizing the worst deviation from either neighbor.
    """
    frames, _, _, _ = arm_kinematics(arm, angles)
    plates = [Transform.identity()]
    for k in range(1, arm.n_clusters):
        a, b = frames[k - 1], frames[k]
        mid = 0.5 * (a.translation + b.translation)
        plates.append(Transform(_half_rotation(a.rotation, b.rotation), mid))
    plates.append(goal)
    return StackPose(tuple(plates))


def _scan_lengths(d0: float, step: float, budget: int):
    """Link lengths to try: home spacing first, then symmetric steps out."""
    values = [d0]
    k = 1
    while len(values) < budget:
        values.append(d0 + k * step)
        if len(values) < budget:
            values.append(d0 - k * step)
        k += 1
    return [d for d in values if d > 1e-9]


def _pose_within_limits(stack: PlatformStack, pose: StackPose) -> bool:
    arrays = stack_arrays(stack, pose)
    for k, geom in enumerate(stack.platforms):
        lens = arrays.lengths[:, k]
        if np.min(lens) < geom.leg_min or np.max(lens) > geom.leg_max:
            return False
        if np.max(arrays.deviations[:, k]) > geom.deviation_max:
            return False
    return bool(np.all(arrays.z_margins > 0.0))


def initial_condition(
    stack: PlatformStack, goal: Transform, params: InitializerParams | None = None
) -> InitResult:
    """Feasible stack pose for a goal end-effector transform, or the home
    pose with ``feasible=False`` when the scan budget runs out.

    Deterministic: identical inputs give identical outputs.
    """
    if params is None:
        params = InitializerParams()
    n = stack.n
    d0 = stack.total_home_height / n
    goal_local = stack.base.inverse() @ goal
    limit = min(g.deviation_max for g in stack.platforms) - params.joint_limit_margin
    limit = max(limit, 1e-3)
    attempts = 0
    for d in _scan_lengths(d0, params.link_step, params.recursion_limit):
        attempts += 1
        arm = build_helper_arm(n, d, joint_limit=limit)
        ik = helper_arm_ik(
            arm,
            goal_local,
            np.zeros(arm.dof),
            tol_translation=params.tol_translation,
            tol_rotation=params.tol_rotation,
        )
        if not ik.converged:
            continue
        local = place_plates(arm, ik.angles, goal_local)
        pose = StackPose(tuple(stack.base @ p for p in local.plates))
        if _pose_within_limits(stack, pose):
            return InitResult(
                pose=pose,
                leg_matrix=stack_leg_matrix(stack, pose),
                feasible=True,
                link_length=d,
                attempts=attempts,
            )
    fallback = home_pose(stack)
    return InitResult(
        pose=fallback,
        leg_matrix=stack_leg_matrix(stack, fallback),
        feasible=False,
        link_length=d0,
        attempts=attempts,
    )
