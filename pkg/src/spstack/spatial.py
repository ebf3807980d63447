"""Rigid transforms and the translation/axis-angle 6-vector pose form.

The matrix form (rotation matrix + translation) is the working
representation inside the library; the 6-vector form is what the optimizer
decision vector and the serialized pose files use.  Both describe the same
rigid motion and convert losslessly up to the usual axis-angle
canonicalization (angle in [0, pi]).

All values are immutable; instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

_ORTHO_TOL = 1e-6


def _as_readonly(value, shape, name):
    arr = np.array(value, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Transform:
    """Rigid transform: 3x3 rotation matrix plus translation in meters."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = _as_readonly(self.rotation, (3, 3), "rotation")
        tr = _as_readonly(self.translation, (3,), "translation")
        err = rot.T @ rot - np.eye(3)
        if np.max(np.abs(err)) > _ORTHO_TOL or abs(np.linalg.det(rot) - 1.0) > _ORTHO_TOL:
            raise ValueError("rotation must be a proper orthonormal matrix")
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tr)

    @staticmethod
    def identity() -> "Transform":
        return Transform(np.eye(3), np.zeros(3))

    @staticmethod
    def from_matrix(matrix) -> "Transform":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
        return Transform(m[:3, :3], m[:3, 3])

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def compose(self, other: "Transform") -> "Transform":
        """This transform followed by ``other`` in this frame (self @ other)."""
        return Transform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def __matmul__(self, other: "Transform") -> "Transform":
        return self.compose(other)

    def inverse(self) -> "Transform":
        rt = self.rotation.T
        return Transform(rt, -(rt @ self.translation))

    def apply(self, points) -> np.ndarray:
        """Map a point (3,) or points (N, 3) into the parent frame."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation

    def local_z(self) -> np.ndarray:
        return self.rotation[:, 2]

    def allclose(self, other: "Transform", tol: float = 1e-9) -> bool:
        return bool(
            np.max(np.abs(self.rotation - other.rotation)) <= tol
            and np.max(np.abs(self.translation - other.translation)) <= tol
        )


@dataclass(frozen=True)
class TaaPose:
    """Pose as 6 numbers: translation plus axis-angle rotation vector.

    The rotation 3-vector points along the rotation axis and has the
    rotation angle as its magnitude (radians).
    """

    translation: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "translation", _as_readonly(self.translation, (3,), "translation")
        )
        object.__setattr__(
            self, "rotation", _as_readonly(self.rotation, (3,), "rotation")
        )

    @staticmethod
    def identity() -> "TaaPose":
        return TaaPose(np.zeros(3), np.zeros(3))

    @staticmethod
    def from_vector(vec) -> "TaaPose":
        v = np.asarray(vec, dtype=float)
        if v.shape != (6,):
            raise ValueError(f"expected a 6-vector, got shape {v.shape}")
        return TaaPose(v[:3], v[3:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.translation, self.rotation])

    def canonical(self) -> "TaaPose":
        """Equivalent pose with rotation angle in [0, pi].

        Angles above pi are re-expressed with the axis flipped; at exactly
        pi the axis is chosen so its first nonzero component is positive.
        """
        return TaaPose(self.translation, canonical_axis_angle(self.rotation))

    def to_dict(self) -> dict:
        return {
            "translation": [float(v) for v in self.translation],
            "rotation_axis_angle": [float(v) for v in self.rotation],
        }

    @staticmethod
    def from_dict(data: dict) -> "TaaPose":
        return TaaPose(data["translation"], data["rotation_axis_angle"])


def canonical_axis_angle(r) -> np.ndarray:
    """Canonical axis-angle representative: angle in [0, pi], deterministic
    axis sign at exactly pi."""
    r = np.asarray(r, dtype=float)
    angle = float(np.linalg.norm(r))
    if angle == 0.0:
        return np.zeros(3)
    axis = r / angle
    angle = angle % (2.0 * np.pi)
    if angle > np.pi:
        angle = 2.0 * np.pi - angle
        axis = -axis
    if angle == np.pi:
        for comp in axis:
            if comp != 0.0:
                if comp < 0.0:
                    axis = -axis
                break
    return angle * axis


def rotation_from_axis_angle(r) -> np.ndarray:
    """Rotation matrix for an axis-angle 3-vector; zero maps to identity."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise ValueError("axis-angle vector must be finite")
    return _kernels.rot_from_axis_angle(r)


def axis_angle_from_rotation(rot) -> np.ndarray:
    """Axis-angle 3-vector of a rotation matrix, canonical (angle in [0, pi])."""
    return _kernels.axis_angle_from_rot(np.asarray(rot, dtype=float))


def transform_from_taa(pose: TaaPose) -> Transform:
    return Transform(rotation_from_axis_angle(pose.rotation), pose.translation)


def taa_from_transform(t: Transform) -> TaaPose:
    return TaaPose(t.translation, axis_angle_from_rotation(t.rotation))
