import numpy as np
import pytest

from spstack import (
    PlatformStack,
    StackPose,
    Transform,
    home_pose,
    ik_leg_lengths,
    pack_decision,
    rotation_from_axis_angle,
    stack_fk,
    stack_leg_matrix,
    unpack_decision,
    z_continuity_ok,
)
from spstack.spatial import TaaPose, transform_from_taa

from conftest import random_transform


def perturbed_home(stack, rng, t_scale=0.03, r_scale=0.05):
    plates = [stack.base]
    for k, plate in enumerate(home_pose(stack).plates[1:]):
        shift = rng.uniform(-t_scale, t_scale, 3)
        twist = rotation_from_axis_angle(rng.normal(size=3) * r_scale)
        plates.append(Transform(twist @ plate.rotation, plate.translation + shift))
    return StackPose(tuple(plates))


class TestStackFk:
    def test_home_pose_end_effector(self, stack4, geometry):
        ee = stack_fk(stack4, home_pose(stack4))
        assert np.allclose(ee.translation, [0, 0, 4 * geometry.home_height], atol=1e-12)
        assert np.array_equal(ee.rotation, np.eye(3))

    def test_base_translation_equivariance(self, geometry):
        moved = Transform(np.eye(3), [0.5, -0.2, 0.1])
        stack = PlatformStack(platforms=(geometry,) * 4, base=moved)
        ee = stack_fk(stack, home_pose(stack))
        assert np.allclose(
            ee.translation, [0.5, -0.2, 0.1 + 4 * geometry.home_height], atol=1e-12
        )

    def test_relative_form_matches_product_oracle(self, stack4, rng):
        rels = [
            Transform(
                rotation_from_axis_angle(rng.normal(size=3) * 0.1),
                [rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), 0.33],
            )
            for _ in range(4)
        ]
        pose = StackPose.from_relative(stack4.base, rels)
        # Oracle: accumulate the 4x4 matrix product directly.
        m = stack4.base.as_matrix()
        for rel in rels:
            m = m @ rel.as_matrix()
        assert np.max(np.abs(stack_fk(stack4, pose).as_matrix() - m)) < 1e-9

    def test_relative_round_trip(self, stack4, rng):
        pose = perturbed_home(stack4, rng)
        rels = pose.relative_transforms()
        back = StackPose.from_relative(stack4.base, rels)
        for a, b in zip(back.plates, pose.plates):
            assert a.allclose(b, tol=1e-12)


class TestStackLegMatrix:
    def test_home_pose_all_midstroke(self, stack4, geometry):
        legs = stack_leg_matrix(stack4, home_pose(stack4))
        assert legs.shape == (6, 4)
        assert np.allclose(legs, geometry.midstroke, atol=1e-9)

    def test_columns_match_per_platform_ik(self, stack4, rng):
        pose = perturbed_home(stack4, rng)
        legs = stack_leg_matrix(stack4, pose)
        for k, geom in enumerate(stack4.platforms):
            want = ik_leg_lengths(geom, pose.platform_state(k))
            assert np.allclose(legs[:, k], want, atol=1e-12)

    def test_single_platform_stack(self, geometry):
        stack = PlatformStack(platforms=(geometry,))
        legs = stack_leg_matrix(stack, home_pose(stack))
        assert legs.shape == (6, 1)
        want = ik_leg_lengths(geometry, home_pose(stack).platform_state(0))
        assert np.array_equal(legs[:, 0], want)

    def test_invariant_under_common_rigid_transform(self, stack4, rng):
        pose = perturbed_home(stack4, rng)
        ref = stack_leg_matrix(stack4, pose)
        move = random_transform(rng)
        moved_stack = PlatformStack(
            platforms=stack4.platforms,
            base=move @ stack4.base,
            payload_mass=stack4.payload_mass,
            payload_offset=stack4.payload_offset,
        )
        moved = StackPose(tuple(move @ p for p in pose.plates))
        assert np.allclose(stack_leg_matrix(moved_stack, moved), ref, atol=1e-9)


class TestDecisionVector:
    def test_length_for_four_platforms(self, stack4):
        x = pack_decision(home_pose(stack4))
        assert x.shape == (18,)

    def test_home_pose_packs_interior_taa(self, stack4, geometry):
        x = pack_decision(home_pose(stack4))
        h = geometry.home_height
        want = np.concatenate(
            [[0, 0, (k + 1) * h, 0, 0, 0] for k in range(3)]
        )
        assert np.allclose(x, want, atol=1e-12)

    def test_round_trip_random_vector(self, stack4, rng):
        goal = stack4.home_end_effector()
        for _ in range(20):
            x = np.concatenate(
                [
                    np.concatenate(
                        [rng.uniform(-1, 1, 3), rng.normal(size=3) * rng.uniform(0, 0.9)]
                    )
                    for _ in range(3)
                ]
            )
            pose = unpack_decision(stack4, x, goal)
            assert np.max(np.abs(pack_decision(pose) - x)) < 1e-12

    def test_unpack_pins_base_and_goal(self, stack4, rng):
        goal = random_transform(rng)
        pose = unpack_decision(stack4, np.zeros(18) + 0.3, goal)
        assert pose.plates[0].allclose(stack4.base, tol=0.0)
        assert pose.plates[-1].allclose(goal, tol=0.0)

    def test_dimension_mismatch_raises(self, stack4):
        with pytest.raises(ValueError):
            unpack_decision(stack4, np.zeros(17), stack4.home_end_effector())

    def test_non_finite_raises(self, stack4):
        x = np.zeros(18)
        x[3] = np.nan
        with pytest.raises(ValueError):
            unpack_decision(stack4, x, stack4.home_end_effector())


class TestZContinuity:
    def test_home_pose_margins_near_home_height(self, stack4, geometry):
        ok, margins = z_continuity_ok(stack4, home_pose(stack4))
        assert ok
        assert np.allclose(margins, geometry.home_height, atol=1e-12)

    def test_top_plate_below_bottom_is_rejected(self, stack4, geometry):
        plates = list(home_pose(stack4).plates)
        plates[1] = Transform(np.eye(3), [0.0, 0.0, -0.1])
        ok, margins = z_continuity_ok(stack4, StackPose(tuple(plates)))
        assert not ok
        assert margins.min() < 0.0

    def test_margins_match_dot_product_oracle(self, stack4, rng):
        from spstack import anchor_positions_global

        pose = perturbed_home(stack4, rng)
        _, margins = z_continuity_ok(stack4, pose)
        for k, geom in enumerate(stack4.platforms):
            state = pose.platform_state(k)
            top, bottom = anchor_positions_global(geom, state)
            z_axis = state.bottom.rotation[:, 2]
            want = np.array([(t - b) @ z_axis for t, b in zip(top, bottom)])
            assert np.allclose(margins[:, k], want, atol=1e-12)


class TestSerialization:
    def test_stack_pose_dict_round_trip(self, stack4, rng):
        pose = perturbed_home(stack4, rng)
        back = StackPose.from_dict(pose.to_dict())
        for a, b in zip(back.plates, pose.plates):
            assert a.allclose(b, tol=1e-12)

    def test_pose_dict_has_taa_entries(self, stack4):
        d = home_pose(stack4).to_dict()
        assert len(d["plates"]) == 5
        assert set(d["plates"][0]) == {"translation", "rotation_axis_angle"}
