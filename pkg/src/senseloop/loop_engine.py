"""Generic closed sensorimotor loop: four pluggable stochastic kernels.

Per step the driver applies, in order: measure (sense), internal update
(think), command (act), external update (world moves). Each kernel call
receives its own counter-derived substream (seed, step, kernel index),
so kernels can be re-run or parallelised across episodes without
replaying a shared generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Optional

from .errors import SenseloopError
from .motor_fields import ArmCommand
from .plant import WorldState
from .retina import EyeCommand, VisualField
from .rng import RngStream

# Substream labels, matching the order of the four update equations.
KERNEL_EXTERNAL = 0
KERNEL_MEASURE = 1
KERNEL_INTERNAL = 2
KERNEL_COMMAND = 3


@dataclass(frozen=True)
class Command:
    arm: ArmCommand
    eye: EyeCommand


@dataclass(frozen=True)
class KernelSet:
    """The four update kernels of the closed loop.

    generative_process: (world, command, dt, rng) -> world
    measure:            (world, rng) -> visual field
    internal_program:   (internal, field, rng) -> internal
    command_chain:      (internal, rng) -> command
    """

    generative_process: Callable[[WorldState, Any, float, RngStream], WorldState]
    measure: Callable[[WorldState, RngStream], VisualField]
    internal_program: Callable[[Any, VisualField, RngStream], Any]
    command_chain: Callable[[Any, RngStream], Any]


@dataclass(frozen=True)
class TrajectoryRecord:
    step: int
    time: float
    world: WorldState
    field: Optional[VisualField]
    internal: Any
    command: Any


@dataclass(frozen=True)
class Trajectory:
    records: tuple[TrajectoryRecord, ...]

    def __len__(self) -> int:
        return len(self.records)


class KernelError(SenseloopError):
    """A kernel failed; carries the step index where it happened."""

    def __init__(self, step: int, kernel: str, cause: Exception):
        super().__init__(f"kernel '{kernel}' failed at step {step}: {cause}")
        self.step = step
        self.kernel = kernel
        self.cause = cause


def rollout(
    kernels: KernelSet,
    init_world: WorldState,
    init_internal: Any,
    steps: int,
    dt: float,
    seed: RngStream,
) -> Trajectory:
    """Drive the four-kernel loop for `steps` steps.

    Returns steps + 1 records; the final record holds the terminal world
    and internal state with no observation or command.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if dt <= 0:
        raise ValueError("dt must be positive")
    world, internal = init_world, init_internal
    records = []
    for step in range(steps):
        t = world.time
        try:
            field = kernels.measure(world, seed.substream(step, KERNEL_MEASURE))
        except Exception as exc:
            raise KernelError(step, "measure", exc) from exc
        try:
            internal = kernels.internal_program(
                internal, field, seed.substream(step, KERNEL_INTERNAL)
            )
        except Exception as exc:
            raise KernelError(step, "internal_program", exc) from exc
        try:
            command = kernels.command_chain(
                internal, seed.substream(step, KERNEL_COMMAND)
            )
        except Exception as exc:
            raise KernelError(step, "command_chain", exc) from exc
        try:
            next_world = kernels.generative_process(
                world, command, dt, seed.substream(step, KERNEL_EXTERNAL)
            )
        except Exception as exc:
            raise KernelError(step, "generative_process", exc) from exc
        records.append(TrajectoryRecord(step, t, world, field, internal, command))
        world = next_world
    records.append(TrajectoryRecord(steps, world.time, world, None, internal, None))
    return Trajectory(tuple(records))


def _command_payload(command: Any) -> Any:
    if command is None:
        return None
    if isinstance(command, Command):
        return {
            "arm": [[i, w] for i, w in command.arm.weights],
            "eye": [command.eye.fixation.x, command.eye.fixation.y],
        }
    return repr(command)


def trajectory_to_jsonl(trajectory: Trajectory, include_images: bool = True) -> str:
    """Serialize a trajectory, one JSON record per line."""
    lines = []
    for rec in trajectory.records:
        payload = {
            "step": rec.step,
            "time": rec.time,
            "posture": list(rec.world.posture.theta),
            "command": _command_payload(rec.command),
        }
        if include_images:
            payload["image"] = (
                None if rec.field is None else rec.field.pixels.ravel().tolist()
            )
        lines.append(json.dumps(payload))
    return "\n".join(lines) + "\n"
