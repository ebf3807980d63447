"""Static truss force model for a platform stack.

Each platform is treated as an independent section cut through its six
legs at the top anchor joints: the free body is everything from the
platform's top plate upward.  Gravity loads of that free body (plates,
actuator motors and shafts of the platforms above, plus the payload) are
collected into a wrench about the top-plate origin, and the six signed
axial leg forces balancing it are solved from the 6x6 equilibrium system.

Sign convention: positive force = tension, negative = compression.  Legs
are two-force members; motor mass loads the actuator's bottom anchor and
shaft mass its top anchor so that convention is preserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import SingularConfigurationError
from .platform import PlatformGeometry, PlatformState
from .stack import PlatformStack, StackPose, StackArrays, stack_arrays

_RCOND_LIMIT = 1e-12  # reciprocal condition below this is singular

DEFAULT_GRAVITY = (0.0, 0.0, -9.81)


@dataclass(frozen=True)
class MassModel:
    """Uniform part masses, payload and gravity used by the force solve."""

    plate_mass: float = 0.2
    motor_mass: float = 0.1
    shaft_mass: float = 0.04
    payload_mass: float = 0.0
    payload_offset: float = 0.0  # along end-effector local z, meters
    gravity: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_GRAVITY))

    def __post_init__(self):
        g = np.array(self.gravity, dtype=float)
        if g.shape != (3,):
            raise ValueError(f"gravity must be a 3-vector, got shape {g.shape}")
        g.setflags(write=False)
        object.__setattr__(self, "gravity", g)
        if min(self.plate_mass, self.motor_mass, self.shaft_mass, self.payload_mass) < 0.0:
            raise ValueError("masses must be nonnegative")

    @staticmethod
    def from_stack(stack: PlatformStack, gravity=DEFAULT_GRAVITY) -> "MassModel":
        """Mass model taken from the stack's first platform geometry and its
        payload fields."""
        geom = stack.platforms[0]
        return MassModel(
            plate_mass=geom.plate_mass,
            motor_mass=geom.motor_mass,
            shaft_mass=geom.shaft_mass,
            payload_mass=stack.payload_mass,
            payload_offset=stack.payload_offset,
            gravity=gravity,
        )

    def scaled(self, factor: float) -> "MassModel":
        return MassModel(
            plate_mass=factor * self.plate_mass,
            motor_mass=factor * self.motor_mass,
            shaft_mass=factor * self.shaft_mass,
            payload_mass=factor * self.payload_mass,
            payload_offset=self.payload_offset,
            gravity=self.gravity,
        )


@dataclass(frozen=True)
class Wrench:
    """Force and moment about an explicit reference point, global frame."""

    force: np.ndarray  # N
    moment: np.ndarray  # N*m, about ref_point
    ref_point: np.ndarray

    def __post_init__(self):
        for name in ("force", "moment", "ref_point"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def shifted(self, new_ref) -> "Wrench":
        """Same wrench expressed about a different reference point."""
        new_ref = np.asarray(new_ref, dtype=float)
        moment = self.moment + np.cross(self.ref_point - new_ref, self.force)
        return Wrench(self.force, moment, new_ref)


@dataclass(frozen=True)
class ForceMatrix:
    """Signed axial actuator forces, 6 rows (legs) by n columns (platforms).

    Negative entries are compression.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != 6:
            raise ValueError(f"force matrix must be 6 x n, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean_abs(self) -> float:
        return float(np.mean(np.abs(self.values)))

    def to_csv(self) -> str:
        """One row per leg, one column per platform, 3 decimal places."""
        header = ",".join(f"SP{k + 1}" for k in range(self.n))
        rows = [",".join(f"{v:.3f}" for v in row) for row in self.values]
        return "\n".join([header, *rows]) + "\n"


def _mass_points_above(
    stack: PlatformStack,
    pose: StackPose,
    masses: MassModel,
    k: int,
    arrays: StackArrays,
) -> tuple[np.ndarray, np.ndarray]:
    """Point masses of the free body above platform k's section cut.

    Returns (masses (m,), points (m, 3)).  The free body holds plate k+1 and
    everything higher: plates k+1..n, both anchor loads of every actuator of
    platforms k+1..n-1, and the payload point.
    """
    n = stack.n
    ms = []
    pts = []
    for j in range(k + 1, n + 1):
        ms.append(masses.plate_mass)
        pts.append(pose.plates[j].translation)
    for j in range(k + 1, n):
        for i in range(6):
            ms.append(masses.motor_mass)
            pts.append(arrays.bottom_points[j, i])
            ms.append(masses.shaft_mass)
            pts.append(arrays.top_points[j, i])
    ms.append(masses.payload_mass)
    ee = pose.plates[-1]
    pts.append(ee.translation + masses.payload_offset * ee.local_z())
    return np.array(ms), np.array(pts)


def accumulate_wrench_above(
    stack: PlatformStack,
    pose: StackPose,
    masses: MassModel,
    platform_index: int,
    arrays: StackArrays | None = None,
) -> Wrench:
    """Gravity wrench on platform ``platform_index``'s free body, about its
    top-plate origin."""
    if not 0 <= platform_index < stack.n:
        raise ValueError(f"platform_index {platform_index} out of range")
    if arrays is None:
        arrays = stack_arrays(stack, pose)
    ms, pts = _mass_points_above(stack, pose, masses, platform_index, arrays)
    ref = pose.plates[platform_index + 1].translation
    forces = ms[:, None] * masses.gravity
    total_force = forces.sum(axis=0)
    total_moment = np.cross(pts - ref, forces).sum(axis=0)
    return Wrench(total_force, total_moment, ref)


def platform_leg_forces(
    geometry: PlatformGeometry, state: PlatformState, applied: Wrench
) -> np.ndarray:
    """Six signed axial forces balancing ``applied`` on the top plate.

    Solves sum f_i u_i = F and sum (a_i x f_i u_i) = M with u_i the unit
    bottom-to-top leg direction and a_i the top anchor relative to the
    wrench reference; positive f_i is tension.
    """
    top, _, lengths, units = _kernels.platform_leg_geometry(
        state.bottom.rotation,
        state.bottom.translation,
        state.top.rotation,
        state.top.translation,
        geometry.bottom_anchors,
        geometry.top_anchors,
    )
    return _solve_cut(units, top, applied, platform_index=None)


def _solve_cut(units, top_points, applied: Wrench, platform_index) -> np.ndarray:
    f, rcond = _kernels.solve_leg_forces(
        units, top_points, applied.ref_point, applied.force, applied.moment
    )
    if rcond < _RCOND_LIMIT:
        where = "" if platform_index is None else f" (platform {platform_index + 1})"
        raise SingularConfigurationError(
            f"equilibrium matrix is singular{where}: rcond {rcond:.3e}",
            platform_index=platform_index,
        )
    return f


def stack_leg_forces(
    stack: PlatformStack, pose: StackPose, masses: MassModel
) -> ForceMatrix:
    """Force matrix for the whole stack, one section cut per platform."""
    arrays = stack_arrays(stack, pose)
    return forces_from_arrays(stack, pose, masses, arrays)


def forces_from_arrays(
    stack: PlatformStack, pose: StackPose, masses: MassModel, arrays: StackArrays
) -> ForceMatrix:
    """Same as stack_leg_forces but reusing precomputed geometry arrays."""
    n = stack.n
    out = np.empty((6, n))
    for k in range(n):
        wrench = accumulate_wrench_above(stack, pose, masses, k, arrays=arrays)
        out[:, k] = _solve_cut(arrays.units[k], arrays.top_points[k], wrench, k)
    return ForceMatrix(out)
