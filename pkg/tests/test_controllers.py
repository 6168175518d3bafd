import math

import numpy as np
import pytest

from senseloop.controllers import (
    CerebellarState,
    TargetPose,
    ballistic_controller,
    cerebellar_update,
    displacement_controller,
    run_cerebellar_trials,
    run_reach_trial,
)
from senseloop.errors import OutOfWorkspace
from senseloop.plant import (
    ArmGeometry,
    JointAngles,
    Perturbation,
    Point2,
    forward_kinematics,
)
from senseloop.rng import RngStream

GEO = ArmGeometry()


def test_displacement_zero_error_zero_command():
    t = TargetPose(Point2(0.3, 0.5))
    v = displacement_controller(t, Point2(0.3, 0.5), JointAngles((0.2, 1.0)), GEO, 1.0, 10.0)
    assert np.allclose(v, 0.0)


def test_displacement_matches_analytic_jacobian_transpose():
    # At theta = (pi/2, 0), L = (0.5, 0.5): J = [[-1, -0.5], [0, 0]],
    # so J^T (0.1, 0) = (-0.1, -0.05). Frozen from the analytic Jacobian.
    posture = JointAngles((math.pi / 2, 0.0))
    hand = forward_kinematics(posture, GEO)
    t = TargetPose(Point2(hand.x + 0.1, hand.y))
    v = displacement_controller(t, hand, posture, GEO, 1.0, 100.0)
    assert v == pytest.approx([-0.1, -0.05], abs=1e-12)


def test_displacement_clipped_to_zero_with_zero_max_step():
    t = TargetPose(Point2(0.3, 0.5))
    v = displacement_controller(t, Point2(0.0, 0.0), JointAngles((0.2, 1.0)), GEO, 1.0, 0.0)
    assert np.allclose(v, 0.0)


def test_ballistic_controller_is_stateless(basis):
    target = TargetPose(basis.endpoint(6))
    cmd = ballistic_controller(target, basis)
    assert cmd == ballistic_controller(target, basis)
    with pytest.raises(OutOfWorkspace):
        ballistic_controller(TargetPose(Point2(9.0, 9.0)), basis)


def test_cerebellar_zero_error_only_appends_history():
    state = CerebellarState(learning_rate=1.0)
    nxt = cerebellar_update(state, Point2(0.0, 0.0), JointAngles((0.1, 1.0)), GEO)
    assert nxt.correction == state.correction
    assert nxt.trial_errors == (0.0,)
    again = cerebellar_update(nxt, Point2(0.0, 0.0), JointAngles((0.1, 1.0)), GEO)
    assert again.correction == state.correction


def test_scalar_error_recursion_oracle():
    # Trial-to-trial analogue with plant gain g and learning rate eta:
    # e_{n+1} = e_n (1 - eta g). For eta=1, g=0.8 the error shrinks below
    # 1e-3 of its start within 20 trials.
    e, g, eta = 1.0, 0.8, 1.0
    for _ in range(20):
        e *= 1.0 - eta * g
    assert abs(e) < 1e-3


def test_reach_result_error_consistent_with_fk(cfg, basis, geometry):
    target = TargetPose(Point2(0.25, 0.55))
    res = run_reach_trial(
        "ballistic", target, Perturbation(), basis, geometry,
        cfg.rest_posture(), 100, 0.01, RngStream(0),
    )
    final = res.trajectory.records[-1].world.posture
    hand = forward_kinematics(final, geometry)
    assert res.final_error == pytest.approx(
        math.hypot(hand.x - target.point.x, hand.y - target.point.y), abs=1e-15
    )
    assert res.steps_used == 100
    assert len(res.trajectory) == 101


def test_displacement_with_oracle_feedback_converges(cfg, basis, geometry):
    target = TargetPose(Point2(0.25, 0.55))
    for gain_scale in (0.6, 1.0):
        res = run_reach_trial(
            "displacement", target, Perturbation(gain_scale=gain_scale),
            basis, geometry, cfg.rest_posture(), 600, 0.01, RngStream(0),
            ctrl_gain=20.0,
        )
        assert res.final_error <= 1e-3


def test_fatigue_degrades_ballistic_accuracy(cfg, geometry):
    fine = cfg.basis((9, 9))
    rest = cfg.rest_posture()
    gen = np.random.default_rng(12)
    worse = 0
    total = 0
    while total < 40:
        t = Point2(*gen.uniform(-1.2, 1.2, 2))
        try:
            base = run_reach_trial(
                "ballistic", TargetPose(t), Perturbation(), fine, geometry,
                rest, 100, 0.01, RngStream(0),
            )
        except OutOfWorkspace:
            continue
        perturbed = run_reach_trial(
            "ballistic", TargetPose(t), Perturbation(gain_scale=0.7), fine,
            geometry, rest, 100, 0.01, RngStream(0),
        )
        total += 1
        if perturbed.final_error > base.final_error:
            worse += 1
    assert worse / total >= 0.95


def test_cerebellar_correction_converges_under_fatigue(cfg, basis, geometry):
    target = TargetPose(Point2(0.25, 0.55))
    pert = Perturbation(gain_scale=0.7)
    _, corrected = run_cerebellar_trials(
        target, pert, basis, geometry, cfg.rest_posture(), 50, 100, 0.01,
        RngStream(0), learning_rate=1.0,
    )
    uncorrected = [
        run_reach_trial(
            "ballistic", target, pert, basis, geometry, cfg.rest_posture(),
            100, 0.01, RngStream(trial),
        ).final_error
        for trial in range(5)
    ]
    assert all(
        corrected[i + 1] <= corrected[i] + 1e-12 for i in range(len(corrected) - 1)
    )
    assert corrected[-1] < 1e-3
    assert all(e == uncorrected[0] for e in uncorrected)
    assert uncorrected[0] > corrected[-1]
