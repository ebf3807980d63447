"""Pure NumPy implementation of the numeric hot-path kernels.

This module mirrors the compiled extension in ``_fast.pyx`` one to one; the
package picks whichever is importable (see ``__init__``).  Any change here
must be mirrored there.

Conventions: rotations are 3x3 row-major matrices acting on column vectors,
points are (..., 3) arrays in meters, anchor tables are (6, 3).
"""

import numpy as np

_EYE3 = np.eye(3)


def rot_from_axis_angle(r):
    """Rotation matrix for an axis-angle 3-vector (magnitude = angle, rad)."""
    r = np.asarray(r, dtype=float)
    angle = float(np.linalg.norm(r))
    if angle == 0.0:
        return _EYE3.copy()
    x, y, z = r / angle
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return _EYE3 + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def axis_angle_from_rot(rot):
    """Axis-angle 3-vector of a rotation matrix, angle in [0, pi].

    At angle pi the axis sign is fixed so its first nonzero component is
    positive.
    """
    rot = np.asarray(rot, dtype=float)
    v = 0.5 * np.array(
        [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
    )
    s = float(np.linalg.norm(v))  # |sin(angle)|
    c = 0.5 * (rot[0, 0] + rot[1, 1] + rot[2, 2] - 1.0)
    angle = np.arctan2(s, c)
    if angle < 1e-10:
        return v  # first-order: v = axis*angle + O(angle^3), here ~0
    if angle < np.pi - 1e-4:
        return (angle / s) * v
    # Near pi the antisymmetric part loses the axis; recover it from the
    # symmetric part, (R + R^T)/2 = c*I + (1-c) * w w^T.
    outer = (0.5 * (rot + rot.T) - c * _EYE3) / (1.0 - c)
    diag = np.sqrt(np.clip(np.diag(outer), 0.0, None))
    k = int(np.argmax(diag))
    w = outer[k] / diag[k]
    w = w / np.linalg.norm(w)
    if s > 1e-12:
        if float(np.dot(w, v)) < 0.0:
            w = -w
    else:
        for comp in w:
            if comp != 0.0:
                if comp < 0.0:
                    w = -w
                break
    return angle * w


def platform_leg_geometry(b_rot, b_tr, t_rot, t_tr, bottom_local, top_local):
    """Global anchor points, leg lengths and unit leg directions.

    Returns (top_points, bottom_points, lengths, units), with units the
    bottom-to-top directions.  A zero-length leg yields a zero unit vector;
    callers that need directions must check lengths first.
    """
    bot = bottom_local @ np.asarray(b_rot).T + b_tr
    top = top_local @ np.asarray(t_rot).T + t_tr
    d = top - bot
    lengths = np.sqrt(np.einsum("ij,ij->i", d, d))
    safe = np.where(lengths > 0.0, lengths, 1.0)
    units = d / safe[:, None]
    return top, bot, lengths, units


def deviation_angles(units, b_rot, rest_local):
    """Angle of each leg from its rest direction, in [0, pi].

    ``rest_local`` holds the rest-pose unit leg directions expressed in the
    bottom plate's local frame; the dot product argument is clamped to
    [-1, 1] before arccos.  Self-comparison roundoff can leave the dot a
    few ulp under 1, where arccos cannot resolve the angle anyway, so
    cosines that close to 1 count as exactly 1.
    """
    rest_global = rest_local @ np.asarray(b_rot).T
    dots = np.einsum("ij,ij->i", units, rest_global)
    dots = np.where(dots >= 1.0 - 1e-15, 1.0, dots)
    return np.arccos(np.clip(dots, -1.0, 1.0))


def z_margins(top_points, bottom_points, b_rot):
    """Per-leg separation of top vs bottom anchor along the bottom plate's z."""
    return (top_points - bottom_points) @ np.asarray(b_rot)[:, 2]


def solve_leg_forces(units, top_points, ref, force, moment):
    """Signed axial leg forces balancing a wrench applied to the top plate.

    Solves sum_i f_i u_i = force and sum_i (a_i x f_i u_i) = moment with
    a_i the top anchor relative to ``ref``; positive f_i is tension.
    Returns (forces, rcond) where rcond is the reciprocal 1-norm condition
    number of the 6x6 equilibrium matrix (0.0 when exactly singular).
    """
    a = np.empty((6, 6))
    a[:3] = units.T
    a[3:] = np.cross(top_points - ref, units).T
    b = np.concatenate([force, moment])
    try:
        inv = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        return np.zeros(6), 0.0
    f = inv @ b
    norm1 = np.abs(a).sum(axis=0).max() * np.abs(inv).sum(axis=0).max()
    rcond = 1.0 / norm1 if norm1 > 0.0 else 0.0
    return f, rcond
