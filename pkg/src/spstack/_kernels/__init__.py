"""Numeric hot-path kernels: compiled core with a pure NumPy fallback.

The backend is chosen once at import time.  Set ``SPSTACK_BACKEND=python``
or ``SPSTACK_BACKEND=cython`` to force one; when unset, the compiled
extension is used if it imports.
"""

import os

_requested = os.environ.get("SPSTACK_BACKEND", "").strip().lower()

if _requested in ("python", "numpy", "pyref"):
    from . import pyref as _impl

    backend = "python"
elif _requested in ("cython", "compiled", "fast"):
    from . import _fast as _impl

    backend = "cython"
elif _requested:
    raise ValueError(f"unknown SPSTACK_BACKEND {_requested!r}")
else:
    try:
        from . import _fast as _impl

        backend = "cython"
    except ImportError:
        from . import pyref as _impl

        backend = "python"

rot_from_axis_angle = _impl.rot_from_axis_angle
axis_angle_from_rot = _impl.axis_angle_from_rot
platform_leg_geometry = _impl.platform_leg_geometry
deviation_angles = _impl.deviation_angles
z_margins = _impl.z_margins
solve_leg_forces = _impl.solve_leg_forces


def load_backend(name):
    """Import a backend module by name, for parity tests and benchmarks."""
    if name == "python":
        from . import pyref

        return pyref
    if name == "cython":
        from . import _fast

        return _fast
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    names = []
    try:
        from . import _fast  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names
