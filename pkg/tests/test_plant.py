import math

import numpy as np
import pytest

from senseloop.errors import NonPositiveDt
from senseloop.plant import (
    ArmGeometry,
    JointAngles,
    Perturbation,
    Point2,
    WorldState,
    forward_kinematics,
    step_external,
)
from senseloop.rng import RngStream

GEO = ArmGeometry()


def test_fk_extended_along_x():
    p = forward_kinematics(JointAngles((0.0, 0.0)), GEO)
    assert (p.x, p.y) == pytest.approx((1.0, 0.0), abs=1e-15)


def test_fk_extended_along_y():
    p = forward_kinematics(JointAngles((math.pi / 2, 0.0)), GEO)
    assert (p.x, p.y) == pytest.approx((0.0, 1.0), abs=1e-15)


def test_fk_bent_elbow():
    p = forward_kinematics(JointAngles((math.pi / 2, math.pi / 2)), GEO)
    assert (p.x, p.y) == pytest.approx((-0.5, 0.5), abs=1e-15)


def test_step_zero_velocity_advances_time_only():
    state = WorldState(posture=JointAngles((0.3, -0.2)))
    nxt = step_external(state, (0.0, 0.0), 0.1, GEO, RngStream(0))
    assert nxt.posture.theta == state.posture.theta
    assert nxt.time == pytest.approx(0.1)
    assert nxt.objects == state.objects


def test_step_euler_arithmetic():
    state = WorldState(posture=JointAngles((0.0, 0.0)))
    nxt = step_external(state, (1.0, 0.0), 0.1, GEO, RngStream(0))
    assert nxt.posture.theta == pytest.approx((0.1, 0.0), abs=1e-15)


def test_step_gain_scaling():
    state = WorldState(
        posture=JointAngles((0.0, 0.0)), perturbation=Perturbation(gain_scale=0.5)
    )
    nxt = step_external(state, (1.0, 0.0), 0.1, GEO, RngStream(0))
    assert nxt.posture.theta == pytest.approx((0.05, 0.0), abs=1e-15)


def test_step_rejects_nonpositive_dt():
    state = WorldState(posture=JointAngles((0.0, 0.0)))
    with pytest.raises(NonPositiveDt):
        step_external(state, (0.0, 0.0), 0.0, GEO, RngStream(0))


def test_fk_lipschitz_in_joint_angles():
    gen = np.random.default_rng(1)
    bound = sum(GEO.link_lengths)
    for _ in range(200):
        a = JointAngles(tuple(gen.uniform(-3, 3, 2)))
        b = JointAngles(tuple(gen.uniform(-3, 3, 2)))
        pa, pb = forward_kinematics(a, GEO), forward_kinematics(b, GEO)
        dist = math.hypot(pa.x - pb.x, pa.y - pb.y)
        l1 = abs(a.theta[0] - b.theta[0]) + abs(a.theta[1] - b.theta[1])
        assert dist <= bound * l1 + 1e-12


def test_step_seeded_noise_is_bit_identical():
    state = WorldState(
        posture=JointAngles((0.1, 0.2)),
        perturbation=Perturbation(motor_noise_std=0.05),
    )
    a = step_external(state, (0.5, -0.5), 0.01, GEO, RngStream(42, (3,)))
    b = step_external(state, (0.5, -0.5), 0.01, GEO, RngStream(42, (3,)))
    assert a.posture.theta == b.posture.theta


def test_identity_on_posture_for_any_perturbation():
    gen = np.random.default_rng(2)
    for _ in range(20):
        pert = Perturbation(
            frame_rotation=gen.uniform(-1, 1), gain_scale=gen.uniform(0.2, 2)
        )
        state = WorldState(posture=JointAngles((0.4, -0.9)), perturbation=pert)
        nxt = step_external(state, (0.0, 0.0), 0.05, GEO, RngStream(0))
        assert nxt.posture.theta == state.posture.theta


def test_clamping_keeps_posture_in_limits():
    geo = ArmGeometry(joint_limits=((-1.0, 1.0), (-1.0, 1.0)))
    state = WorldState(posture=JointAngles((0.9, -0.9)))
    for v in [(100.0, -100.0), (-100.0, 100.0)]:
        nxt = step_external(state, v, 0.1, geo, RngStream(0))
        for t, (lo, hi) in zip(nxt.posture.theta, geo.joint_limits):
            assert lo <= t <= hi


def test_geometry_validation():
    with pytest.raises(ValueError):
        ArmGeometry(link_lengths=(0.0, 0.5))
    with pytest.raises(ValueError):
        ArmGeometry(joint_limits=((1.0, -1.0), (-1.0, 1.0)))
    with pytest.raises(ValueError):
        Perturbation(gain_scale=0.0)
    with pytest.raises(ValueError):
        Perturbation(motor_noise_std=-0.1)
