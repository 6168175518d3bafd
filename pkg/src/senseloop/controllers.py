"""Reaching control laws and the perturbation / correction harness.

Two laws are compared: error-based displacement control (Jacobian-
transpose feedback on the task-space error, with oracle hand-position
feedback) and open-loop ballistic control (solve the target into
primitive weights, let the blended field settle). A cerebellar-style
offset learns, across trials, to cancel the residual error the ballistic
law accumulates under plant perturbations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .loop_engine import Trajectory, TrajectoryRecord
from .motor_fields import (
    ArmCommand,
    PrimitiveBasis,
    blend_attractor,
    blend_field,
    solve_command,
)
from .plant import (
    ArmGeometry,
    JointAngles,
    Perturbation,
    Point2,
    WorldState,
    forward_kinematics,
    jacobian,
    step_external,
)
from .rng import RngStream


@dataclass(frozen=True)
class TargetPose:
    point: Point2


@dataclass(frozen=True)
class ReachResult:
    final_error: float
    steps_used: int
    trajectory: Trajectory


@dataclass(frozen=True)
class CerebellarState:
    """Trial-to-trial joint-space correction learned from task errors."""

    correction: tuple[float, float] = (0.0, 0.0)
    learning_rate: float = 0.5
    trial_errors: tuple[float, ...] = ()

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")


def displacement_controller(
    target: TargetPose,
    estimate: Point2,
    posture: JointAngles,
    geometry: ArmGeometry,
    gain: float,
    max_step: float,
) -> np.ndarray:
    """Jacobian-transpose feedback on the task error, clipped per joint."""
    if gain <= 0:
        raise ValueError("gain must be positive")
    e = target.point.array() - estimate.array()
    v = gain * (jacobian(posture, geometry).T @ e)
    return np.clip(v, -max_step, max_step)


def ballistic_controller(target: TargetPose, basis: PrimitiveBasis) -> ArmCommand:
    """Open-loop command for the target; no state estimate is consulted."""
    return solve_command(target.point, basis)


def cerebellar_update(
    state: CerebellarState,
    task_error: Point2,
    posture: JointAngles,
    geometry: ArmGeometry,
) -> CerebellarState:
    """Fold an observed task error into the joint-space correction.

    task_error is desired minus observed hand position. Convergence needs
    learning_rate * effective plant gain < 2 (documented, not enforced).
    """
    delta = state.learning_rate * (
        jacobian(posture, geometry).T @ task_error.array()
    )
    correction = (
        state.correction[0] + float(delta[0]),
        state.correction[1] + float(delta[1]),
    )
    err = float(np.hypot(task_error.x, task_error.y))
    return replace(
        state, correction=correction, trial_errors=state.trial_errors + (err,)
    )


def _record(step: int, world: WorldState, command) -> TrajectoryRecord:
    return TrajectoryRecord(step, world.time, world, None, None, command)


def run_reach_trial(
    controller: str,
    target: TargetPose,
    perturbation: Perturbation,
    basis: PrimitiveBasis,
    geometry: ArmGeometry,
    initial: JointAngles,
    steps: int,
    dt: float,
    seed: RngStream,
    ctrl_gain: float = 5.0,
    max_step: float = 10.0,
    correction: tuple[float, float] = (0.0, 0.0),
) -> ReachResult:
    """Run one reaching trial under the perturbed plant.

    "ballistic": settle the solved command (optionally offset by a
    cerebellar correction) open-loop. "displacement": closed-loop
    Jacobian-transpose feedback with oracle hand-position feedback.
    """
    world = WorldState(posture=initial, perturbation=perturbation)
    records = [_record(0, world, None)]
    if controller == "ballistic":
        cmd = ballistic_controller(target, basis)
        attractor = blend_attractor(basis, cmd).array() + np.asarray(correction)
        stiffness = max(p.stiffness for p in basis.primitives)
        for step in range(steps):
            v = stiffness * (attractor - world.posture.array())
            world = step_external(world, tuple(v), dt, geometry, seed.substream(step))
            records.append(_record(step + 1, world, cmd))
    elif controller == "displacement":
        for step in range(steps):
            estimate = forward_kinematics(world.posture, geometry)  # oracle feedback
            v = displacement_controller(
                target, estimate, world.posture, geometry, ctrl_gain, max_step
            )
            world = step_external(world, tuple(v), dt, geometry, seed.substream(step))
            records.append(_record(step + 1, world, None))
    else:
        raise ValueError(f"unknown controller {controller!r}")
    hand = forward_kinematics(world.posture, geometry)
    err = float(np.hypot(hand.x - target.point.x, hand.y - target.point.y))
    return ReachResult(err, steps, Trajectory(tuple(records)))


def run_cerebellar_trials(
    target: TargetPose,
    perturbation: Perturbation,
    basis: PrimitiveBasis,
    geometry: ArmGeometry,
    initial: JointAngles,
    trials: int,
    steps: int,
    dt: float,
    seed: RngStream,
    learning_rate: float = 0.5,
) -> tuple[CerebellarState, list[float]]:
    """Repeat the ballistic reach, updating the correction between trials."""
    state = CerebellarState(learning_rate=learning_rate)
    errors = []
    for trial in range(trials):
        result = run_reach_trial(
            "ballistic",
            target,
            perturbation,
            basis,
            geometry,
            initial,
            steps,
            dt,
            seed.substream(trial),
            correction=state.correction,
        )
        final = result.trajectory.records[-1].world.posture
        hand = forward_kinematics(final, geometry)
        task_error = Point2(target.point.x - hand.x, target.point.y - hand.y)
        state = cerebellar_update(state, task_error, final, geometry)
        errors.append(result.final_error)
    return state, errors
