import numpy as np
import pytest

from spstack import MassModel, PlatformGeometry, PlatformStack, Transform, default_geometry


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def geometry():
    return default_geometry()


@pytest.fixture(scope="session")
def paired_geometry():
    """Degenerate test layout: top anchors sit straight above the bottom
    ones, so every leg is vertical at the home pose."""
    angles = np.deg2rad([0, 60, 120, 180, 240, 300])
    pts = np.column_stack([0.1 * np.cos(angles), 0.1 * np.sin(angles), np.zeros(6)])
    return PlatformGeometry(
        bottom_anchors=pts,
        top_anchors=pts.copy(),
        leg_min=0.2,
        leg_max=0.4,
        deviation_max=np.deg2rad(30.0),
        home_height=0.3,
    )


@pytest.fixture(scope="session")
def stack4(geometry):
    return PlatformStack(platforms=(geometry,) * 4, base=Transform.identity(),
                         payload_mass=5.0, payload_offset=0.2)


@pytest.fixture(scope="session")
def masses():
    return MassModel(payload_mass=5.0, payload_offset=0.2)


def random_rotation(rng):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, np.pi)
    from spstack import rotation_from_axis_angle

    return rotation_from_axis_angle(angle * axis)


def random_transform(rng, translation_scale=1.0):
    return Transform(random_rotation(rng), rng.uniform(-1, 1, 3) * translation_scale)
