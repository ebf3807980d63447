# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementation of the numeric hot-path kernels.

Mirrors pyref.py one to one (same signatures, same conventions); any change
there must be reflected here.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport acos, atan2, cos, fabs, sin, sqrt

cnp.import_array()


cdef inline double _clamp(double v, double lo, double hi) nogil:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


def rot_from_axis_angle(r):
    """Rotation matrix for an axis-angle 3-vector (magnitude = angle, rad)."""
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    out = np.empty((3, 3))
    cdef double[:, ::1] m = out
    cdef double angle = sqrt(rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2])
    cdef double x, y, z, c, s, v
    if angle == 0.0:
        m[0, 0] = 1.0; m[0, 1] = 0.0; m[0, 2] = 0.0
        m[1, 0] = 0.0; m[1, 1] = 1.0; m[1, 2] = 0.0
        m[2, 0] = 0.0; m[2, 1] = 0.0; m[2, 2] = 1.0
        return out
    x = rv[0] / angle
    y = rv[1] / angle
    z = rv[2] / angle
    c = cos(angle)
    s = sin(angle)
    v = 1.0 - c
    m[0, 0] = c + x * x * v
    m[0, 1] = x * y * v - z * s
    m[0, 2] = x * z * v + y * s
    m[1, 0] = x * y * v + z * s
    m[1, 1] = c + y * y * v
    m[1, 2] = y * z * v - x * s
    m[2, 0] = x * z * v - y * s
    m[2, 1] = y * z * v + x * s
    m[2, 2] = c + z * z * v
    return out


def axis_angle_from_rot(rot):
    """Axis-angle 3-vector of a rotation matrix, angle in [0, pi]."""
    cdef const double[:, ::1] R = np.ascontiguousarray(rot, dtype=np.float64)
    out = np.empty(3)
    cdef double[::1] o = out
    cdef double v0, v1, v2, s, c, angle, denom, norm, dot
    cdef double d0, d1, d2, w0, w1, w2, comp
    cdef int k, i
    v0 = 0.5 * (R[2, 1] - R[1, 2])
    v1 = 0.5 * (R[0, 2] - R[2, 0])
    v2 = 0.5 * (R[1, 0] - R[0, 1])
    s = sqrt(v0 * v0 + v1 * v1 + v2 * v2)
    c = 0.5 * (R[0, 0] + R[1, 1] + R[2, 2] - 1.0)
    angle = atan2(s, c)
    if angle < 1e-10:
        o[0] = v0; o[1] = v1; o[2] = v2
        return out
    if angle < 3.141592653589793 - 1e-4:
        o[0] = (angle / s) * v0
        o[1] = (angle / s) * v1
        o[2] = (angle / s) * v2
        return out
    # Near pi: recover the axis from the symmetric part.
    denom = 1.0 - c
    d0 = sqrt(_clamp((R[0, 0] - c) / denom, 0.0, 1e300))
    d1 = sqrt(_clamp((R[1, 1] - c) / denom, 0.0, 1e300))
    d2 = sqrt(_clamp((R[2, 2] - c) / denom, 0.0, 1e300))
    k = 0
    if d1 > d0 and d1 >= d2:
        k = 1
    elif d2 > d0 and d2 > d1:
        k = 2
    if k == 0:
        w0 = (R[0, 0] - c) / denom / d0
        w1 = 0.5 * (R[0, 1] + R[1, 0]) / denom / d0
        w2 = 0.5 * (R[0, 2] + R[2, 0]) / denom / d0
    elif k == 1:
        w0 = 0.5 * (R[1, 0] + R[0, 1]) / denom / d1
        w1 = (R[1, 1] - c) / denom / d1
        w2 = 0.5 * (R[1, 2] + R[2, 1]) / denom / d1
    else:
        w0 = 0.5 * (R[2, 0] + R[0, 2]) / denom / d2
        w1 = 0.5 * (R[2, 1] + R[1, 2]) / denom / d2
        w2 = (R[2, 2] - c) / denom / d2
    norm = sqrt(w0 * w0 + w1 * w1 + w2 * w2)
    w0 /= norm; w1 /= norm; w2 /= norm
    if s > 1e-12:
        dot = w0 * v0 + w1 * v1 + w2 * v2
        if dot < 0.0:
            w0 = -w0; w1 = -w1; w2 = -w2
    else:
        comp = w0
        if comp == 0.0:
            comp = w1
        if comp == 0.0:
            comp = w2
        if comp < 0.0:
            w0 = -w0; w1 = -w1; w2 = -w2
    o[0] = angle * w0
    o[1] = angle * w1
    o[2] = angle * w2
    return out


def platform_leg_geometry(b_rot, b_tr, t_rot, t_tr, bottom_local, top_local):
    """Global anchors, leg lengths and unit directions; see pyref."""
    cdef const double[:, ::1] bR = np.ascontiguousarray(b_rot, dtype=np.float64)
    cdef const double[::1] bt = np.ascontiguousarray(b_tr, dtype=np.float64)
    cdef const double[:, ::1] tR = np.ascontiguousarray(t_rot, dtype=np.float64)
    cdef const double[::1] tt = np.ascontiguousarray(t_tr, dtype=np.float64)
    cdef const double[:, ::1] bl = np.ascontiguousarray(bottom_local, dtype=np.float64)
    cdef const double[:, ::1] tl = np.ascontiguousarray(top_local, dtype=np.float64)
    top = np.empty((6, 3))
    bot = np.empty((6, 3))
    lengths = np.empty(6)
    units = np.empty((6, 3))
    cdef double[:, ::1] topv = top
    cdef double[:, ::1] botv = bot
    cdef double[::1] lenv = lengths
    cdef double[:, ::1] univ = units
    cdef int i, j
    cdef double dx, dy, dz, ln, safe
    for i in range(6):
        for j in range(3):
            botv[i, j] = bR[j, 0] * bl[i, 0] + bR[j, 1] * bl[i, 1] + bR[j, 2] * bl[i, 2] + bt[j]
            topv[i, j] = tR[j, 0] * tl[i, 0] + tR[j, 1] * tl[i, 1] + tR[j, 2] * tl[i, 2] + tt[j]
        dx = topv[i, 0] - botv[i, 0]
        dy = topv[i, 1] - botv[i, 1]
        dz = topv[i, 2] - botv[i, 2]
        ln = sqrt(dx * dx + dy * dy + dz * dz)
        lenv[i] = ln
        safe = ln if ln > 0.0 else 1.0
        univ[i, 0] = dx / safe
        univ[i, 1] = dy / safe
        univ[i, 2] = dz / safe
    return top, bot, lengths, units


def deviation_angles(units, b_rot, rest_local):
    """Angle of each leg from its rest direction, in [0, pi]."""
    cdef const double[:, ::1] u = np.ascontiguousarray(units, dtype=np.float64)
    cdef const double[:, ::1] bR = np.ascontiguousarray(b_rot, dtype=np.float64)
    cdef const double[:, ::1] rl = np.ascontiguousarray(rest_local, dtype=np.float64)
    out = np.empty(6)
    cdef double[::1] o = out
    cdef int i
    cdef double g0, g1, g2, dot
    for i in range(6):
        g0 = bR[0, 0] * rl[i, 0] + bR[0, 1] * rl[i, 1] + bR[0, 2] * rl[i, 2]
        g1 = bR[1, 0] * rl[i, 0] + bR[1, 1] * rl[i, 1] + bR[1, 2] * rl[i, 2]
        g2 = bR[2, 0] * rl[i, 0] + bR[2, 1] * rl[i, 1] + bR[2, 2] * rl[i, 2]
        dot = u[i, 0] * g0 + u[i, 1] * g1 + u[i, 2] * g2
        # Self-comparison roundoff guard, mirrored from pyref.
        if dot >= 1.0 - 1e-15:
            dot = 1.0
        o[i] = acos(_clamp(dot, -1.0, 1.0))
    return out


def z_margins(top_points, bottom_points, b_rot):
    """Per-leg separation of top vs bottom anchor along the bottom plate's z."""
    cdef const double[:, ::1] tp = np.ascontiguousarray(top_points, dtype=np.float64)
    cdef const double[:, ::1] bp = np.ascontiguousarray(bottom_points, dtype=np.float64)
    cdef const double[:, ::1] bR = np.ascontiguousarray(b_rot, dtype=np.float64)
    out = np.empty(6)
    cdef double[::1] o = out
    cdef int i
    for i in range(6):
        o[i] = (
            (tp[i, 0] - bp[i, 0]) * bR[0, 2]
            + (tp[i, 1] - bp[i, 1]) * bR[1, 2]
            + (tp[i, 2] - bp[i, 2]) * bR[2, 2]
        )
    return out


cdef int _lu_factor(double* a, int* piv) nogil:
    """In-place LU with partial pivoting for a 6x6 row-major matrix.

    Returns 0 on success, -1 when a pivot is exactly zero.
    """
    cdef int i, j, k, p
    cdef double best, tmp, factor
    for k in range(6):
        p = k
        best = fabs(a[6 * k + k])
        for i in range(k + 1, 6):
            if fabs(a[6 * i + k]) > best:
                best = fabs(a[6 * i + k])
                p = i
        if best == 0.0:
            return -1
        piv[k] = p
        if p != k:
            for j in range(6):
                tmp = a[6 * k + j]
                a[6 * k + j] = a[6 * p + j]
                a[6 * p + j] = tmp
        for i in range(k + 1, 6):
            factor = a[6 * i + k] / a[6 * k + k]
            a[6 * i + k] = factor
            for j in range(k + 1, 6):
                a[6 * i + j] -= factor * a[6 * k + j]
    return 0


cdef void _lu_solve(double* lu, int* piv, double* b) nogil:
    cdef int i, j
    cdef double tmp, acc
    for i in range(6):
        if piv[i] != i:
            tmp = b[i]
            b[i] = b[piv[i]]
            b[piv[i]] = tmp
    for i in range(6):
        acc = b[i]
        for j in range(i):
            acc -= lu[6 * i + j] * b[j]
        b[i] = acc
    for i in range(5, -1, -1):
        acc = b[i]
        for j in range(i + 1, 6):
            acc -= lu[6 * i + j] * b[j]
        b[i] = acc / lu[6 * i + i]


def solve_leg_forces(units, top_points, ref, force, moment):
    """Signed axial leg forces balancing a wrench; see pyref for the system."""
    cdef const double[:, ::1] u = np.ascontiguousarray(units, dtype=np.float64)
    cdef const double[:, ::1] tp = np.ascontiguousarray(top_points, dtype=np.float64)
    cdef const double[::1] rf = np.ascontiguousarray(ref, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(force, dtype=np.float64)
    cdef const double[::1] mv = np.ascontiguousarray(moment, dtype=np.float64)
    out = np.empty(6)
    cdef double[::1] o = out
    cdef double a[36]
    cdef double lu[36]
    cdef double inv[36]
    cdef double col[6]
    cdef double b[6]
    cdef int piv[6]
    cdef int i, j
    cdef double ax, ay, az, norm_a, norm_inv, colsum, rcond
    for i in range(6):
        a[i] = u[i, 0]
        a[6 + i] = u[i, 1]
        a[12 + i] = u[i, 2]
        ax = tp[i, 0] - rf[0]
        ay = tp[i, 1] - rf[1]
        az = tp[i, 2] - rf[2]
        a[18 + i] = ay * u[i, 2] - az * u[i, 1]
        a[24 + i] = az * u[i, 0] - ax * u[i, 2]
        a[30 + i] = ax * u[i, 1] - ay * u[i, 0]
    for i in range(36):
        lu[i] = a[i]
    if _lu_factor(lu, piv) != 0:
        for i in range(6):
            o[i] = 0.0
        return out, 0.0
    # Explicit inverse (6 solves) for the 1-norm condition estimate.
    for j in range(6):
        for i in range(6):
            col[i] = 1.0 if i == j else 0.0
        _lu_solve(lu, piv, col)
        for i in range(6):
            inv[6 * i + j] = col[i]
    for i in range(3):
        b[i] = fv[i]
        b[3 + i] = mv[i]
    for i in range(6):
        o[i] = (
            inv[6 * i] * b[0]
            + inv[6 * i + 1] * b[1]
            + inv[6 * i + 2] * b[2]
            + inv[6 * i + 3] * b[3]
            + inv[6 * i + 4] * b[4]
            + inv[6 * i + 5] * b[5]
        )
    norm_a = 0.0
    norm_inv = 0.0
    for j in range(6):
        colsum = 0.0
        for i in range(6):
            colsum += fabs(a[6 * i + j])
        if colsum > norm_a:
            norm_a = colsum
        colsum = 0.0
        for i in range(6):
            colsum += fabs(inv[6 * i + j])
        if colsum > norm_inv:
            norm_inv = colsum
    rcond = 0.0
    if norm_a * norm_inv > 0.0:
        rcond = 1.0 / (norm_a * norm_inv)
    return out, rcond
