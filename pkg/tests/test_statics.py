import numpy as np
import pytest

from spstack import (
    ForceMatrix,
    MassModel,
    PlatformGeometry,
    PlatformState,
    PlatformStack,
    Transform,
    Wrench,
    accumulate_wrench_above,
    anchor_positions_global,
    home_pose,
    platform_leg_forces,
    stack_leg_forces,
)
from spstack.errors import SingularConfigurationError
from spstack.platform import home_state

from test_stack import perturbed_home

GRAVITY = 9.81


def conical_geometry(bottom_radius=0.12, top_radius=0.06, height=0.3, twist_deg=15.0):
    """Near-vertical legs: top circle smaller, twist alternating per leg.

    A uniform twist would put all six legs on one regulus (rank deficient);
    alternating it keeps the equilibrium matrix full rank.
    """
    angles = np.deg2rad([0, 60, 120, 180, 240, 300])
    bottom = np.column_stack(
        [bottom_radius * np.cos(angles), bottom_radius * np.sin(angles), np.zeros(6)]
    )
    twisted = angles + np.deg2rad(twist_deg) * np.array([1, -1, 1, -1, 1, -1])
    top = np.column_stack(
        [top_radius * np.cos(twisted), top_radius * np.sin(twisted), np.zeros(6)]
    )
    leg = float(np.linalg.norm(top[0] + [0, 0, height] - bottom[0]))
    return PlatformGeometry(
        bottom_anchors=bottom,
        top_anchors=top,
        leg_min=leg - 0.1,
        leg_max=leg + 0.1,
        deviation_max=np.deg2rad(40.0),
        home_height=height,
    )


def bookkeeping_mass_above(stack, k, masses):
    """Free-body mass above platform k's cut, per the load model."""
    n = stack.n
    plates = (n - k) * masses.plate_mass
    actuators = 6 * (n - 1 - k) * (masses.motor_mass + masses.shaft_mass)
    return plates + actuators + masses.payload_mass


class TestAccumulateWrench:
    def test_zero_gravity_zero_wrench(self, stack4):
        masses = MassModel(payload_mass=5.0, payload_offset=0.2, gravity=[0, 0, 0])
        w = accumulate_wrench_above(stack4, home_pose(stack4), masses, 0)
        assert np.array_equal(w.force, np.zeros(3))
        assert np.array_equal(w.moment, np.zeros(3))

    def test_platform_one_vertical_force_bookkeeping(self, stack4, masses):
        # Oracle: payload 5 + three plates above 0.6 + eighteen actuators
        # above 2.52 + own top plate 0.2 = 8.32 kg hanging on the cut.
        w = accumulate_wrench_above(stack4, home_pose(stack4), masses, 0)
        want = GRAVITY * (5.0 + 3 * 0.2 + 18 * (0.1 + 0.04) + 0.2)
        assert w.force[2] == pytest.approx(-want, rel=1e-12)
        assert abs(w.force[0]) < 1e-12 and abs(w.force[1]) < 1e-12

    def test_every_cut_masses(self, stack4, masses):
        pose = home_pose(stack4)
        for k in range(stack4.n):
            w = accumulate_wrench_above(stack4, pose, masses, k)
            want = GRAVITY * bookkeeping_mass_above(stack4, k, masses)
            assert np.linalg.norm(w.force) == pytest.approx(want, rel=1e-12)

    def test_home_pose_lateral_moments_vanish(self, stack4, masses):
        for k in range(stack4.n):
            w = accumulate_wrench_above(stack4, home_pose(stack4), masses, k)
            assert np.max(np.abs(w.moment)) < 1e-9

    def test_matches_independent_point_mass_sum(self, stack4, masses, rng):
        # Oracle: enumerate every point mass of the free body from scratch
        # and integrate force and moment directly.
        pose = perturbed_home(stack4, rng)
        n = stack4.n
        for k in range(n):
            pts, ms = [], []
            for j in range(k + 1, n + 1):
                pts.append(pose.plates[j].translation)
                ms.append(masses.plate_mass)
            for j in range(k + 1, n):
                top, bottom = anchor_positions_global(
                    stack4.platforms[j], pose.platform_state(j)
                )
                for i in range(6):
                    pts.append(bottom[i])
                    ms.append(masses.motor_mass)
                    pts.append(top[i])
                    ms.append(masses.shaft_mass)
            ee = pose.plates[-1]
            pts.append(ee.translation + masses.payload_offset * ee.rotation[:, 2])
            ms.append(masses.payload_mass)
            ref = pose.plates[k + 1].translation
            force = sum(m * masses.gravity for m in ms)
            moment = sum(
                np.cross(p - ref, m * masses.gravity) for p, m in zip(pts, ms)
            )
            w = accumulate_wrench_above(stack4, pose, masses, k)
            assert np.allclose(w.force, force, atol=1e-12)
            assert np.allclose(w.moment, moment, atol=1e-12)

    def test_wrench_reference_shift_rule(self, stack4, masses, rng):
        pose = perturbed_home(stack4, rng)
        w = accumulate_wrench_above(stack4, pose, masses, 1)
        new_ref = rng.uniform(-1, 1, 3)
        shifted = w.shifted(new_ref)
        # Shift back and compare.
        assert np.allclose(shifted.shifted(w.ref_point).moment, w.moment, atol=1e-12)
        assert np.array_equal(shifted.force, w.force)


class TestPlatformLegForces:
    def test_zero_wrench_zero_forces(self, geometry):
        state = home_state(geometry)
        w = Wrench(np.zeros(3), np.zeros(3), state.top.translation)
        assert np.allclose(platform_leg_forces(geometry, state, w), 0.0, atol=1e-15)

    def test_centered_axial_load_symmetric_compression(self, geometry):
        # Oracle: equal legs at angle alpha from vertical share the load as
        # f = -W / (6 cos alpha), all in compression.
        state = home_state(geometry)
        load = 100.0
        w = Wrench([0, 0, -load], np.zeros(3), state.top.translation)
        f = platform_leg_forces(geometry, state, w)
        cos_alpha = geometry.home_height / geometry.midstroke
        assert np.allclose(f, -load / (6 * cos_alpha), atol=1e-9)

    def test_hanging_load_gives_tension(self):
        # Near-vertical legs with the top plate hanging below the bottom one.
        geom = conical_geometry()
        state = PlatformState(
            bottom=Transform.identity(),
            top=Transform(np.eye(3), [0.0, 0.0, -geom.home_height]),
        )
        w = Wrench([0, 0, -50.0], np.zeros(3), state.top.translation)
        f = platform_leg_forces(geom, state, w)
        assert np.all(f > 0.0)

    def test_reconstructed_wrench_matches_applied(self, geometry, rng):
        from spstack.spatial import rotation_from_axis_angle

        for _ in range(20):
            state = PlatformState(
                Transform.identity(),
                Transform(
                    rotation_from_axis_angle(rng.normal(size=3) * 0.1),
                    [rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                     geometry.home_height * rng.uniform(0.9, 1.1)],
                ),
            )
            w = Wrench(rng.uniform(-100, 100, 3), rng.uniform(-20, 20, 3),
                       state.top.translation)
            f = platform_leg_forces(geometry, state, w)
            top, bottom = anchor_positions_global(geometry, state)
            units = (top - bottom) / np.linalg.norm(top - bottom, axis=1)[:, None]
            force = (units * f[:, None]).sum(axis=0)
            moment = np.cross(top - w.ref_point, units * f[:, None]).sum(axis=0)
            assert np.linalg.norm(force - w.force) / max(1, np.linalg.norm(w.force)) < 1e-9
            assert np.linalg.norm(moment - w.moment) / max(1, np.linalg.norm(w.moment)) < 1e-9

    def test_exactly_vertical_legs_are_singular(self, paired_geometry):
        state = home_state(paired_geometry)
        w = Wrench([0, 0, -10.0], np.zeros(3), state.top.translation)
        with pytest.raises(SingularConfigurationError):
            platform_leg_forces(paired_geometry, state, w)


class TestStackLegForces:
    def test_zero_gravity_zero_payload_all_zero(self, stack4):
        masses = MassModel(payload_mass=0.0, gravity=[0, 0, 0])
        forces = stack_leg_forces(stack4, home_pose(stack4), masses)
        assert np.allclose(forces.values, 0.0, atol=1e-15)

    def test_vertical_components_carry_the_weight_above(self, stack4, masses):
        # Oracle: each cut's leg z-components must sum to the free-body
        # weight above that platform.
        pose = home_pose(stack4)
        forces = stack_leg_forces(stack4, pose, masses)
        for k, geom in enumerate(stack4.platforms):
            top, bottom = anchor_positions_global(geom, pose.platform_state(k))
            units = (top - bottom) / np.linalg.norm(top - bottom, axis=1)[:, None]
            carried = float((forces.values[:, k] * units[:, 2]).sum())
            want = -GRAVITY * bookkeeping_mass_above(stack4, k, masses)
            assert carried == pytest.approx(want, rel=1e-9)

    def test_linear_in_masses(self, stack4, masses, rng):
        for _ in range(5):
            pose = perturbed_home(stack4, rng)
            base = stack_leg_forces(stack4, pose, masses).values
            doubled = stack_leg_forces(stack4, pose, masses.scaled(2.0)).values
            assert np.allclose(doubled, 2.0 * base, rtol=1e-9, atol=0)

    def test_forces_vary_smoothly_with_pose(self, stack4, masses):
        pose = home_pose(stack4)
        base = stack_leg_forces(stack4, pose, masses).values
        plates = list(pose.plates)
        moved = plates[2]
        plates[2] = Transform(moved.rotation, moved.translation + [1e-6, 0, 0])
        bumped_pose = type(pose)(tuple(plates))
        bumped = stack_leg_forces(stack4, bumped_pose, masses).values
        delta = np.max(np.abs(bumped - base))
        assert 0.0 < delta < 1e-2

    def test_home_pose_is_compression_dominated(self, stack4, masses):
        forces = stack_leg_forces(stack4, home_pose(stack4), masses)
        assert np.all(forces.values < 0.0)


class TestForceMatrix:
    def test_stats(self):
        fm = ForceMatrix(np.array([[1.0, -4.0]] * 6))
        assert fm.max_abs() == 4.0
        assert fm.mean_abs() == 2.5

    def test_csv_format(self):
        values = np.zeros((6, 2))
        values[0, 0] = -145.609
        values[0, 1] = 69.279
        text = ForceMatrix(values).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "SP1,SP2"
        assert lines[1] == "-145.609,69.279"
        assert lines[2] == "0.000,0.000"
