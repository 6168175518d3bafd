import json

import numpy as np
import pytest

from senseloop.loop_engine import (
    KernelError,
    KernelSet,
    rollout,
    trajectory_to_jsonl,
)
from senseloop.plant import JointAngles, WorldState
from senseloop.retina import VisualField
from senseloop.rng import RngStream

BLANK = VisualField(np.zeros((3, 3)))


def constant_kernels(log=None):
    def note(name):
        if log is not None:
            log.append(name)

    return KernelSet(
        generative_process=lambda w, u, dt, rng: (note("external"), w)[1],
        measure=lambda w, rng: (note("measure"), BLANK)[1],
        internal_program=lambda s, f, rng: (note("internal"), s)[1],
        command_chain=lambda s, rng: (note("command"), "noop")[1],
    )


def test_zero_steps_returns_initial_record_only():
    world = WorldState(posture=JointAngles((0.1, 0.2)))
    traj = rollout(constant_kernels(), world, "internal", 0, 0.1, RngStream(0))
    assert len(traj) == 1
    rec = traj.records[0]
    assert rec.world is world and rec.internal == "internal"
    assert rec.field is None and rec.command is None


def test_constant_kernels_fixed_point():
    world = WorldState(posture=JointAngles((0.1, 0.2)))
    traj = rollout(constant_kernels(), world, "s", 5, 0.1, RngStream(0))
    assert len(traj) == 6
    for rec in traj.records:
        assert rec.world.posture.theta == (0.1, 0.2)
        assert rec.internal == "s"


def test_update_order_is_sense_think_act_world():
    log = []
    world = WorldState(posture=JointAngles((0.0, 0.0)))
    rollout(constant_kernels(log), world, None, 2, 0.1, RngStream(0))
    assert log == ["measure", "internal", "command", "external"] * 2


def test_equal_seeds_give_bit_identical_trajectories():
    def noisy_external(w, u, dt, rng):
        delta = rng.generator().normal(0, 0.1, 2)
        return WorldState(
            posture=JointAngles(tuple(w.posture.array() + delta)),
            time=w.time + dt,
        )

    kernels = KernelSet(
        generative_process=noisy_external,
        measure=lambda w, rng: BLANK,
        internal_program=lambda s, f, rng: s,
        command_chain=lambda s, rng: None,
    )
    world = WorldState(posture=JointAngles((0.0, 0.0)))
    t1 = rollout(kernels, world, None, 10, 0.1, RngStream(7))
    t2 = rollout(kernels, world, None, 10, 0.1, RngStream(7))
    for a, b in zip(t1.records, t2.records):
        assert a.world.posture.theta == b.world.posture.theta


def test_measure_substream_isolated_from_external_noise():
    def noisy_external(w, u, dt, rng):
        delta = rng.generator().normal(0, 0.1, 2)
        return WorldState(
            posture=JointAngles(tuple(w.posture.array() + delta)),
            time=w.time + dt,
        )

    def thin_measure(w, rng):
        rng.generator().normal(size=1)
        return BLANK

    def greedy_measure(w, rng):
        rng.generator().normal(size=500)
        return BLANK

    world = WorldState(posture=JointAngles((0.0, 0.0)))
    postures = []
    for measure in (thin_measure, greedy_measure):
        kernels = KernelSet(noisy_external, measure, lambda s, f, rng: s, lambda s, rng: None)
        traj = rollout(kernels, world, None, 10, 0.1, RngStream(3))
        postures.append([r.world.posture.theta for r in traj.records])
    assert postures[0] == postures[1]


def test_kernel_errors_carry_step_index():
    def failing_measure(w, rng):
        if w.time > 0.25:
            raise ValueError("sensor broke")
        return BLANK

    kernels = KernelSet(
        generative_process=lambda w, u, dt, rng: WorldState(
            posture=w.posture, time=w.time + dt
        ),
        measure=failing_measure,
        internal_program=lambda s, f, rng: s,
        command_chain=lambda s, rng: None,
    )
    world = WorldState(posture=JointAngles((0.0, 0.0)))
    with pytest.raises(KernelError) as exc:
        rollout(kernels, world, None, 10, 0.1, RngStream(0))
    assert exc.value.step == 3
    assert exc.value.kernel == "measure"


def test_jsonl_serialization_round_trip():
    world = WorldState(posture=JointAngles((0.1, -0.2)))
    traj = rollout(constant_kernels(), world, None, 2, 0.1, RngStream(0))
    lines = trajectory_to_jsonl(traj).strip().split("\n")
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert first["step"] == 0
    assert first["posture"] == [0.1, -0.2]
    assert len(first["image"]) == 9
    bare = json.loads(trajectory_to_jsonl(traj, include_images=False).split("\n")[0])
    assert "image" not in bare
