"""Physical world: 2-link planar arm, scene objects, perturbed stochastic update.

The arm is a first-order kinematic plant: commanded joint velocities are
scaled (muscle fatigue), rotated (body tilt), corrupted with Gaussian
noise, Euler-integrated, and clamped to the joint limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonPositiveDt
from .rng import RngStream


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class ArmGeometry:
    """2-link arm: link lengths, base position, per-joint angle limits."""

    link_lengths: tuple[float, float] = (0.5, 0.5)
    base: Point2 = Point2(0.0, 0.0)
    joint_limits: tuple[tuple[float, float], tuple[float, float]] = (
        (-math.pi, math.pi),
        (-math.pi, math.pi),
    )

    def __post_init__(self):
        if any(l <= 0 for l in self.link_lengths):
            raise ValueError("link lengths must be positive")
        if any(lo >= hi for lo, hi in self.joint_limits):
            raise ValueError("joint limit intervals must satisfy lower < upper")


@dataclass(frozen=True)
class JointAngles:
    theta: tuple[float, float]

    def array(self) -> np.ndarray:
        return np.array(self.theta)


@dataclass(frozen=True)
class SceneObject:
    position: Point2
    radius: float
    intensity: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if not 0 < self.intensity <= 1:
            raise ValueError("intensity must lie in (0, 1]")


@dataclass(frozen=True)
class Perturbation:
    """Body tilt (velocity-frame rotation), fatigue gain, motor noise."""

    frame_rotation: float = 0.0
    gain_scale: float = 1.0
    motor_noise_std: float = 0.0

    def __post_init__(self):
        if self.gain_scale <= 0:
            raise ValueError("gain_scale must be positive")
        if self.motor_noise_std < 0:
            raise ValueError("motor_noise_std must be nonnegative")


@dataclass(frozen=True)
class WorldState:
    posture: JointAngles
    objects: tuple[SceneObject, ...] = ()
    perturbation: Perturbation = field(default_factory=Perturbation)
    time: float = 0.0


def forward_kinematics(angles: JointAngles, geometry: ArmGeometry) -> Point2:
    """End-effector position of the 2-link arm."""
    t1, t2 = angles.theta
    l1, l2 = geometry.link_lengths
    x = geometry.base.x + l1 * math.cos(t1) + l2 * math.cos(t1 + t2)
    y = geometry.base.y + l1 * math.sin(t1) + l2 * math.sin(t1 + t2)
    return Point2(x, y)


def jacobian(angles: JointAngles, geometry: ArmGeometry) -> np.ndarray:
    """2x2 task-space Jacobian d(hand)/d(theta)."""
    t1, t2 = angles.theta
    l1, l2 = geometry.link_lengths
    s1, c1 = math.sin(t1), math.cos(t1)
    s12, c12 = math.sin(t1 + t2), math.cos(t1 + t2)
    return np.array(
        [
            [-l1 * s1 - l2 * s12, -l2 * s12],
            [l1 * c1 + l2 * c12, l2 * c12],
        ]
    )


def clamp_angles(angles: JointAngles, geometry: ArmGeometry) -> JointAngles:
    clamped = tuple(
        min(max(t, lo), hi) for t, (lo, hi) in zip(angles.theta, geometry.joint_limits)
    )
    return JointAngles(clamped)


def step_external(
    state: WorldState,
    joint_velocity: tuple[float, float],
    dt: float,
    geometry: ArmGeometry,
    rng: RngStream,
) -> WorldState:
    """One Euler step of the perturbed plant.

    The commanded velocity is scaled by the fatigue gain, rotated by the
    body-tilt angle, integrated over dt, corrupted with per-joint Gaussian
    noise, and the resulting posture clamped to the joint limits.
    """
    if dt <= 0:
        raise NonPositiveDt(f"dt must be positive, got {dt}")
    p = state.perturbation
    phi = p.frame_rotation
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    v = p.gain_scale * (rot @ np.asarray(joint_velocity, dtype=float))
    theta = state.posture.array() + v * dt
    if p.motor_noise_std > 0:
        theta = theta + rng.generator().normal(0.0, p.motor_noise_std, size=2)
    posture = clamp_angles(JointAngles(tuple(theta)), geometry)
    return replace(state, posture=posture, time=state.time + dt)
