"""The n-platform stack: plate bookkeeping, serialized forward kinematics,
the aggregate leg matrix, decision-vector packing and the z-continuity
predicate.

Consecutive platforms share a plate: an n-platform stack has n+1 plates,
plate 0 being the base and plate n the end effector.  A stack pose stores
every plate transform in the global frame; a relative entry form is
accepted and normalized on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .platform import PlatformGeometry, PlatformState
from .spatial import Transform, TaaPose, taa_from_transform, transform_from_taa


@dataclass(frozen=True)
class PlatformStack:
    """Ordered platform geometries on a base transform, plus the payload
    carried at the end effector."""

    platforms: tuple[PlatformGeometry, ...]
    base: Transform = field(default_factory=Transform.identity)
    payload_mass: float = 0.0
    payload_offset: float = 0.0  # along end-effector local z, meters

    def __post_init__(self):
        platforms = tuple(self.platforms)
        if len(platforms) < 1:
            raise ValueError("a stack needs at least one platform")
        object.__setattr__(self, "platforms", platforms)
        if self.payload_mass < 0.0:
            raise ValueError("payload_mass must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.platforms)

    @property
    def total_home_height(self) -> float:
        return float(sum(p.home_height for p in self.platforms))

    def home_end_effector(self) -> Transform:
        lift = Transform(np.eye(3), [0.0, 0.0, self.total_home_height])
        return self.base @ lift


@dataclass(frozen=True)
class StackPose:
    """Global plate transforms, plate 0 (base) through plate n (end
    effector)."""

    plates: tuple[Transform, ...]

    def __post_init__(self):
        object.__setattr__(self, "plates", tuple(self.plates))
        if len(self.plates) < 2:
            raise ValueError("a stack pose needs at least two plates")

    @staticmethod
    def from_relative(base: Transform, relative) -> "StackPose":
        """Build from plate-to-plate transforms: plate k = base * rel_1 * ... * rel_k."""
        plates = [base]
        for rel in relative:
            plates.append(plates[-1] @ rel)
        return StackPose(tuple(plates))

    def relative_transforms(self) -> list[Transform]:
        return [
            self.plates[k].inverse() @ self.plates[k + 1]
            for k in range(len(self.plates) - 1)
        ]

    @property
    def end_effector(self) -> Transform:
        return self.plates[-1]

    def platform_state(self, k: int) -> PlatformState:
        return PlatformState(bottom=self.plates[k], top=self.plates[k + 1])

    def to_dict(self) -> dict:
        return {
            "plates": [taa_from_transform(p).to_dict() for p in self.plates]
        }

    @staticmethod
    def from_dict(data: dict) -> "StackPose":
        plates = [
            transform_from_taa(TaaPose.from_dict(entry)) for entry in data["plates"]
        ]
        return StackPose(tuple(plates))


def check_pose(stack: PlatformStack, pose: StackPose, base_tol: float = 1e-9):
    """Sanity-check a pose against a stack (plate count, base plate match)."""
    if len(pose.plates) != stack.n + 1:
        raise ValueError(
            f"pose has {len(pose.plates)} plates, stack needs {stack.n + 1}"
        )
    if not pose.plates[0].allclose(stack.base, tol=base_tol):
        raise ValueError("pose plate 0 does not match the stack base")


def home_pose(stack: PlatformStack) -> StackPose:
    """All platforms at half extension, stacked straight up from the base."""
    plates = [stack.base]
    height = 0.0
    for geom in stack.platforms:
        height += geom.home_height
        lift = Transform(np.eye(3), [0.0, 0.0, height])
        plates.append(stack.base @ lift)
    return StackPose(tuple(plates))


def stack_fk(stack: PlatformStack, pose: StackPose) -> Transform:
    """End-effector transform of a stack pose (the last plate)."""
    check_pose(stack, pose)
    return pose.end_effector


def stack_leg_matrix(stack: PlatformStack, pose: StackPose) -> np.ndarray:
    """6 x n leg lengths; column k holds platform k's legs."""
    return stack_arrays(stack, pose).lengths


def pack_decision(pose: StackPose) -> np.ndarray:
    """Decision vector: canonical 6-vector poses of the interior plates.

    For an n-platform stack this is 6(n-1) numbers; base and end-effector
    plates are excluded (the end effector is pinned to the goal).
    """
    interior = pose.plates[1:-1]
    if not interior:
        return np.zeros(0)
    return np.concatenate(
        [taa_from_transform(p).canonical().as_vector() for p in interior]
    )


def unpack_decision(stack: PlatformStack, x, goal: Transform) -> StackPose:
    """Rebuild a stack pose from a decision vector and a pinned goal plate."""
    x = np.asarray(x, dtype=float)
    expected = 6 * (stack.n - 1)
    if x.shape != (expected,):
        raise ValueError(f"decision vector must have shape ({expected},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("decision vector must be finite")
    plates = [stack.base]
    for k in range(stack.n - 1):
        plates.append(transform_from_taa(TaaPose.from_vector(x[6 * k : 6 * k + 6])))
    plates.append(goal)
    return StackPose(tuple(plates))


def z_continuity_ok(stack: PlatformStack, pose: StackPose) -> tuple[bool, np.ndarray]:
    """True when every top anchor sits above its bottom anchor, measured
    along the bottom plate's local z; also returns the 6 x n margins."""
    margins = stack_arrays(stack, pose).z_margins
    return bool(np.all(margins > 0.0)), margins


@dataclass(frozen=True)
class StackArrays:
    """Per-platform geometry arrays computed in one pass over a pose.

    Shared by the leg-matrix, z-continuity, statics and optimizer paths so
    the anchor transforms are only evaluated once per pose.
    """

    top_points: np.ndarray  # (n, 6, 3) global top anchors
    bottom_points: np.ndarray  # (n, 6, 3) global bottom anchors
    lengths: np.ndarray  # (6, n)
    units: np.ndarray  # (n, 6, 3) bottom-to-top leg directions
    deviations: np.ndarray  # (6, n) angles from rest directions
    z_margins: np.ndarray  # (6, n)


def stack_arrays(stack: PlatformStack, pose: StackPose) -> StackArrays:
    check_pose(stack, pose)
    n = stack.n
    top_points = np.empty((n, 6, 3))
    bottom_points = np.empty((n, 6, 3))
    lengths = np.empty((6, n))
    units = np.empty((n, 6, 3))
    deviations = np.empty((6, n))
    z_margins = np.empty((6, n))
    for k, geom in enumerate(stack.platforms):
        bottom = pose.plates[k]
        top = pose.plates[k + 1]
        t_pts, b_pts, lens, us = _kernels.platform_leg_geometry(
            bottom.rotation,
            bottom.translation,
            top.rotation,
            top.translation,
            geom.bottom_anchors,
            geom.top_anchors,
        )
        top_points[k] = t_pts
        bottom_points[k] = b_pts
        lengths[:, k] = lens
        units[k] = us
        deviations[:, k] = _kernels.deviation_angles(
            us, bottom.rotation, geom.rest_directions
        )
        z_margins[:, k] = _kernels.z_margins(t_pts, b_pts, bottom.rotation)
    return StackArrays(top_points, bottom_points, lengths, units, deviations, z_margins)
