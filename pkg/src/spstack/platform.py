"""Single Stewart platform: geometry, closed-form leg IK, leg deviation
angles, and a numerical FK utility used for verification.

A platform is two plates joined by six linear actuators ("legs").  Anchor
tables are stored in each plate's local frame and are index-matched: leg i
runs from ``bottom_anchors[i]`` to ``top_anchors[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import ConvergenceFailureError, DegenerateConfigurationError
from .spatial import Transform, transform_from_taa, taa_from_transform

_HOME_LEG_TOL = 1e-9


@dataclass(frozen=True)
class PlatformGeometry:
    """Anchor layout, actuator limits, home height and part masses.

    At the home pose (top plate ``home_height`` straight above the bottom
    plate, no rotation) every leg sits at half extension, i.e. at
    ``(leg_min + leg_max) / 2``.
    """

    bottom_anchors: np.ndarray  # (6, 3), bottom-plate frame, meters
    top_anchors: np.ndarray  # (6, 3), top-plate frame, meters
    leg_min: float
    leg_max: float
    deviation_max: float  # max leg angle from its rest direction, radians
    home_height: float
    motor_mass: float = 0.1
    shaft_mass: float = 0.04
    plate_mass: float = 0.2

    def __post_init__(self):
        for name in ("bottom_anchors", "top_anchors"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (6, 3):
                raise ValueError(f"{name} must have shape (6, 3), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not 0.0 < self.leg_min < self.leg_max:
            raise ValueError("need 0 < leg_min < leg_max")
        if not 0.0 < self.deviation_max < np.pi / 2:
            raise ValueError("deviation_max must lie in (0, pi/2)")
        if self.home_height <= 0.0:
            raise ValueError("home_height must be positive")
        if min(self.motor_mass, self.shaft_mass, self.plate_mass) < 0.0:
            raise ValueError("masses must be nonnegative")
        err = np.abs(self._home_leg_vectors_norm() - self.midstroke)
        if np.max(err) > _HOME_LEG_TOL:
            raise ValueError(
                "home pose legs must all equal (leg_min + leg_max)/2; "
                f"worst mismatch {np.max(err):.3e} m"
            )

    def _home_leg_vectors(self) -> np.ndarray:
        offset = np.array([0.0, 0.0, self.home_height])
        return self.top_anchors + offset - self.bottom_anchors

    def _home_leg_vectors_norm(self) -> np.ndarray:
        return np.linalg.norm(self._home_leg_vectors(), axis=1)

    @property
    def midstroke(self) -> float:
        return 0.5 * (self.leg_min + self.leg_max)

    @cached_property
    def rest_directions(self) -> np.ndarray:
        """Unit leg directions at the home pose, bottom-plate frame."""
        vecs = self._home_leg_vectors()
        out = vecs / np.linalg.norm(vecs, axis=1)[:, None]
        out.setflags(write=False)
        return out

    @property
    def actuator_mass(self) -> float:
        return self.motor_mass + self.shaft_mass


@dataclass(frozen=True)
class PlatformState:
    """Bottom and top plate transforms, both in the same (global) frame."""

    bottom: Transform
    top: Transform


def default_geometry(
    radius: float = 0.15,
    cluster_half_angle: float = np.deg2rad(12.0),
    leg_min: float = 0.25,
    leg_max: float = 0.45,
    deviation_max: float = np.deg2rad(30.0),
    motor_mass: float = 0.1,
    shaft_mass: float = 0.04,
    plate_mass: float = 0.2,
) -> PlatformGeometry:
    """Conventional 6-6 layout: three anchor clusters per plate on a circle,
    top pattern rotated 60 degrees so the legs alternate.

    The home height is chosen so that every home leg is exactly at half
    extension.
    """
    delta = cluster_half_angle
    sign = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
    # Leg i pairs bottom_angles[i] with top_angles[i]; every leg then spans
    # the same 60 - 2*delta chord, so all home legs are equal by symmetry.
    bottom_angles = np.deg2rad([0, 120, 120, 240, 240, 360]) + delta * sign
    top_angles = np.deg2rad([60, 60, 180, 180, 300, 300]) - delta * sign
    bottom = _circle_points(radius, bottom_angles)
    top = _circle_points(radius, top_angles)
    midstroke = 0.5 * (leg_min + leg_max)
    chord = np.linalg.norm(top[0, :2] - bottom[0, :2])
    height = float(np.sqrt(midstroke**2 - chord**2))
    return PlatformGeometry(
        bottom_anchors=bottom,
        top_anchors=top,
        leg_min=leg_min,
        leg_max=leg_max,
        deviation_max=deviation_max,
        home_height=height,
        motor_mass=motor_mass,
        shaft_mass=shaft_mass,
        plate_mass=plate_mass,
    )


def _circle_points(radius: float, angles: np.ndarray) -> np.ndarray:
    return np.column_stack(
        [radius * np.cos(angles), radius * np.sin(angles), np.zeros(len(angles))]
    )


def home_state(geometry: PlatformGeometry, bottom: Transform | None = None) -> PlatformState:
    """Platform state at the home pose, optionally on a moved bottom plate."""
    if bottom is None:
        bottom = Transform.identity()
    lift = Transform(np.eye(3), [0.0, 0.0, geometry.home_height])
    return PlatformState(bottom=bottom, top=bottom @ lift)


def anchor_positions_global(
    geometry: PlatformGeometry, state: PlatformState
) -> tuple[np.ndarray, np.ndarray]:
    """Anchor points in the global frame: (top six, bottom six)."""
    top, bot, _, _ = _kernels.platform_leg_geometry(
        state.bottom.rotation,
        state.bottom.translation,
        state.top.rotation,
        state.top.translation,
        geometry.bottom_anchors,
        geometry.top_anchors,
    )
    return top, bot


def ik_leg_lengths(geometry: PlatformGeometry, state: PlatformState) -> np.ndarray:
    """Closed-form leg lengths: distance between matched anchor points.

    Limits are not enforced here; they enter as optimizer constraints.
    """
    _, _, lengths, _ = _kernels.platform_leg_geometry(
        state.bottom.rotation,
        state.bottom.translation,
        state.top.rotation,
        state.top.translation,
        geometry.bottom_anchors,
        geometry.top_anchors,
    )
    return lengths


def deviation_angles(geometry: PlatformGeometry, state: PlatformState) -> np.ndarray:
    """Angle of each leg from its home-pose direction, in [0, pi].

    The rest direction rides with the bottom plate, so a rigidly moved
    platform still reports zero deviation.
    """
    _, _, lengths, units = _kernels.platform_leg_geometry(
        state.bottom.rotation,
        state.bottom.translation,
        state.top.rotation,
        state.top.translation,
        geometry.bottom_anchors,
        geometry.top_anchors,
    )
    if np.min(lengths) < 1e-12:
        raise DegenerateConfigurationError(
            f"zero-length leg (shortest {np.min(lengths):.3e} m)"
        )
    return _kernels.deviation_angles(units, state.bottom.rotation, geometry.rest_directions)


def fk_numeric(
    geometry: PlatformGeometry,
    bottom: Transform,
    legs,
    guess: Transform,
    max_iterations: int = 200,
    tolerance: float = 1e-10,
) -> Transform:
    """Numerical forward kinematics: top-plate transform matching six leg
    lengths, found by damped least squares from ``guess``.

    This is a verification utility (the optimization pipeline never needs
    platform FK).  Raises ConvergenceFailureError when the residual does not
    drop below ``tolerance`` within the iteration budget.
    """
    target = np.asarray(legs, dtype=float)
    if target.shape != (6,):
        raise ValueError(f"expected 6 leg lengths, got shape {target.shape}")

    def residual(x):
        state = PlatformState(bottom, transform_from_taa_vector(x))
        return ik_leg_lengths(geometry, state) - target

    x = taa_from_transform(guess).as_vector()
    damping = 1e-6
    step = 1e-7
    res = residual(x)
    for _ in range(max_iterations):
        if np.max(np.abs(res)) < tolerance:
            return transform_from_taa_vector(x)
        jac = np.empty((6, 6))
        for j in range(6):
            probe = np.zeros(6)
            probe[j] = step
            jac[:, j] = (residual(x + probe) - residual(x - probe)) / (2.0 * step)
        lhs = jac.T @ jac + damping * np.eye(6)
        dx = np.linalg.solve(lhs, -jac.T @ res)
        x = x + dx
        res = residual(x)
    if np.max(np.abs(res)) < tolerance:
        return transform_from_taa_vector(x)
    raise ConvergenceFailureError(
        f"platform FK did not converge (residual {np.max(np.abs(res)):.3e} m)",
        residual=res,
    )


def transform_from_taa_vector(vec) -> Transform:
    from .spatial import TaaPose

    return transform_from_taa(TaaPose.from_vector(vec))
