import numpy as np
import pytest

from spstack import (
    TaaPose,
    Transform,
    rotation_from_axis_angle,
    taa_from_transform,
    transform_from_taa,
)
from spstack.spatial import axis_angle_from_rotation, canonical_axis_angle

from conftest import random_rotation, random_transform


class TestRotationFromAxisAngle:
    def test_zero_vector_is_identity(self):
        assert np.array_equal(rotation_from_axis_angle([0.0, 0.0, 0.0]), np.eye(3))

    def test_quarter_turn_about_z_maps_x_to_y(self):
        rot = rotation_from_axis_angle([0.0, 0.0, np.pi / 2])
        assert np.allclose(rot @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-12)

    def test_trace_matches_rodrigues_identity(self, rng):
        # Independent oracle: trace(R) = 1 + 2 cos(angle) for any unit axis.
        for _ in range(20):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            rot = rotation_from_axis_angle(0.7 * axis)
            assert np.trace(rot) == pytest.approx(1.0 + 2.0 * np.cos(0.7), abs=1e-12)

    def test_output_is_orthonormal_with_unit_det(self, rng):
        for _ in range(200):
            r = rng.normal(size=3) * rng.uniform(0.0, 4.0)
            rot = rotation_from_axis_angle(r)
            assert np.max(np.abs(rot.T @ rot - np.eye(3))) < 1e-9
            assert np.linalg.det(rot) == pytest.approx(1.0, abs=1e-9)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            rotation_from_axis_angle([np.nan, 0.0, 0.0])
        with pytest.raises(ValueError):
            rotation_from_axis_angle([np.inf, 0.0, 0.0])


class TestTransformTaaBridge:
    def test_pure_translation(self):
        t = transform_from_taa(TaaPose([1.0, 2.0, 3.0], [0.0, 0.0, 0.0]))
        assert np.array_equal(t.rotation, np.eye(3))
        assert np.array_equal(t.translation, [1.0, 2.0, 3.0])

    def test_identity_pose(self):
        t = transform_from_taa(TaaPose.identity())
        assert t.allclose(Transform.identity(), tol=0.0)

    def test_action_on_origin_equals_translation(self, rng):
        # Oracle: applying the transform to the origin must land on the
        # translation component, whatever the rotation does.
        for _ in range(20):
            pose = TaaPose(rng.uniform(-2, 2, 3), rng.normal(size=3))
            t = transform_from_taa(pose)
            assert np.allclose(t.apply([0.0, 0.0, 0.0]), pose.translation, atol=1e-12)


class TestTaaFromTransform:
    def test_identity(self):
        pose = taa_from_transform(Transform.identity())
        assert np.array_equal(pose.as_vector(), np.zeros(6))

    def test_quarter_turn_about_z(self):
        t = transform_from_taa(TaaPose([0, 0, 0], [0, 0, np.pi / 2]))
        pose = taa_from_transform(t)
        assert np.allclose(pose.rotation, [0.0, 0.0, np.pi / 2], atol=1e-12)

    def test_round_trip_100_random_transforms(self, rng):
        for _ in range(100):
            t = random_transform(rng)
            back = transform_from_taa(taa_from_transform(t))
            assert back.allclose(t, tol=1e-9)

    def test_round_trip_near_pi(self, rng):
        for _ in range(50):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = np.pi - 10.0 ** rng.uniform(-14, -3)
            t = Transform(rotation_from_axis_angle(angle * axis), np.zeros(3))
            back = transform_from_taa(taa_from_transform(t))
            assert back.allclose(t, tol=1e-9)

    def test_angle_exactly_pi_axis_sign_deterministic(self):
        for axis in ([1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]):
            t = Transform(rotation_from_axis_angle(np.pi * np.asarray(axis)), np.zeros(3))
            r = taa_from_transform(t).rotation
            first_nonzero = r[np.nonzero(r)[0][0]]
            assert first_nonzero > 0.0
            assert np.linalg.norm(r) == pytest.approx(np.pi, abs=1e-9)

    def test_canonical_angle_range(self, rng):
        for _ in range(100):
            pose = taa_from_transform(random_transform(rng))
            assert np.linalg.norm(pose.rotation) <= np.pi + 1e-12


class TestCanonicalAxisAngle:
    def test_angle_above_pi_is_reexpressed(self):
        r = canonical_axis_angle([0.0, 0.0, 1.5 * np.pi])
        assert np.allclose(r, [0.0, 0.0, -0.5 * np.pi], atol=1e-12)

    def test_same_rotation_after_canonicalization(self, rng):
        for _ in range(50):
            raw = rng.normal(size=3) * rng.uniform(0.0, 8.0)
            a = rotation_from_axis_angle(raw)
            b = rotation_from_axis_angle(canonical_axis_angle(raw))
            assert np.max(np.abs(a - b)) < 1e-9


class TestTransform:
    def test_compose_with_inverse_is_identity(self, rng):
        for _ in range(50):
            t = random_transform(rng)
            assert (t @ t.inverse()).allclose(Transform.identity(), tol=1e-9)
            assert (t.inverse() @ t).allclose(Transform.identity(), tol=1e-9)

    def test_composition_associative(self, rng):
        for _ in range(20):
            a, b, c = (random_transform(rng) for _ in range(3))
            assert ((a @ b) @ c).allclose(a @ (b @ c), tol=1e-9)

    def test_rejects_non_orthonormal_rotation(self):
        with pytest.raises(ValueError):
            Transform(np.eye(3) * 2.0, np.zeros(3))
        with pytest.raises(ValueError):
            Transform(-np.eye(3), np.zeros(3))  # det -1

    def test_matrix_round_trip(self, rng):
        t = random_transform(rng)
        assert Transform.from_matrix(t.as_matrix()).allclose(t, tol=0.0)

    def test_values_are_immutable(self):
        t = Transform.identity()
        with pytest.raises(ValueError):
            t.rotation[0, 0] = 2.0


class TestSerialization:
    def test_dict_round_trip_full_precision(self, rng):
        pose = TaaPose(rng.uniform(-1, 1, 3), rng.normal(size=3))
        back = TaaPose.from_dict(pose.to_dict())
        assert np.array_equal(back.as_vector(), pose.as_vector())

    def test_dict_keys(self):
        d = TaaPose.identity().to_dict()
        assert set(d) == {"translation", "rotation_axis_angle"}
