"""Run configuration: JSON file, validated, with CLI flag overrides on top."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .motor_fields import PrimitiveBasis, build_basis
from .plant import ArmGeometry, JointAngles, Perturbation, Point2
from .retina import RetinaConfig

_DEFAULTS = {
    "seed": 0,
    "geometry": {
        "link_lengths": [0.5, 0.5],
        "base": [0.0, 0.0],
        "joint_limits": [[-math.pi, math.pi], [-math.pi, math.pi]],
    },
    "retina": {
        "resolution": 33,
        "window": 1.0,
        "blob_sigma": 0.04,
        "sensor_noise_std": 0.0,
    },
    "basis": {
        "grid": [5, 5],
        "stiffness": 5.0,
        "theta1_range": [-0.9, 0.9],
        "theta2_range": [0.7, 1.9],
    },
    "perturbation": {
        "frame_rotation": 0.0,
        "gain_scale": 1.0,
        "motor_noise_std": 0.0,
    },
    "babble": {
        "eye_grid": [3, 3],
        "eye_x_range": [-0.5, 0.5],
        "eye_y_range": [0.1, 0.9],
    },
    "reach": {
        "target": [0.25, 0.55],
        "steps": 100,
        "dt": 0.01,
        "ctrl_gain": 20.0,
        "max_step": 10.0,
        "learning_rate": 1.0,
    },
    "em": {
        "n_states": 2,
        "episode_length": 200,
        "flip_prob": 0.95,
        "obs_accuracy": 0.98,
        "alpha": 1e-3,
    },
    "active": {
        "n_looks": 4,
        "obs_accuracy": 0.99,
    },
}


def _merge(defaults: dict, overrides: dict, path: str = "") -> dict:
    out = dict(defaults)
    for key, value in overrides.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {path + key!r} must be an object")
            out[key] = _merge(defaults[key], value, path + key + ".")
        else:
            out[key] = value
    return out


@dataclass
class RunConfig:
    raw: dict = field(default_factory=lambda: dict(_DEFAULTS))

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    def geometry(self) -> ArmGeometry:
        g = self.raw["geometry"]
        return ArmGeometry(
            tuple(g["link_lengths"]),
            Point2(*g["base"]),
            tuple(tuple(lim) for lim in g["joint_limits"]),
        )

    def retina(self) -> RetinaConfig:
        return RetinaConfig(**self.raw["retina"])

    def perturbation(self) -> Perturbation:
        return Perturbation(**self.raw["perturbation"])

    def basis_postures(self, grid: tuple[int, int] | None = None) -> list[JointAngles]:
        b = self.raw["basis"]
        g1, g2 = grid if grid is not None else b["grid"]
        t1_lo, t1_hi = b["theta1_range"]
        t2_lo, t2_hi = b["theta2_range"]
        postures = []
        for i in range(g1):
            t1 = t1_lo + (t1_hi - t1_lo) * i / (g1 - 1) if g1 > 1 else t1_lo
            for j in range(g2):
                t2 = t2_lo + (t2_hi - t2_lo) * j / (g2 - 1) if g2 > 1 else t2_lo
                postures.append(JointAngles((t1, t2)))
        return postures

    def basis(self, grid: tuple[int, int] | None = None) -> PrimitiveBasis:
        return build_basis(
            self.basis_postures(grid), self.geometry(), self.raw["basis"]["stiffness"]
        )

    def rest_posture(self) -> JointAngles:
        b = self.raw["basis"]
        return JointAngles(
            (sum(b["theta1_range"]) / 2.0, sum(b["theta2_range"]) / 2.0)
        )

    def eye_fixations(self) -> list[Point2]:
        b = self.raw["babble"]
        gx, gy = b["eye_grid"]
        x_lo, x_hi = b["eye_x_range"]
        y_lo, y_hi = b["eye_y_range"]
        pts = []
        for i in range(gx):
            x = x_lo + (x_hi - x_lo) * i / (gx - 1) if gx > 1 else x_lo
            for j in range(gy):
                y = y_lo + (y_hi - y_lo) * j / (gy - 1) if gy > 1 else y_lo
                pts.append(Point2(x, y))
        return pts


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Load and validate a config file; unknown keys are rejected.

    `overrides` maps dotted keys (e.g. "perturbation.gain_scale") to
    values that win over the file.
    """
    data = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must contain a JSON object")
    merged = _merge(_DEFAULTS, data)
    for dotted, value in (overrides or {}).items():
        node = merged
        *parents, leaf = dotted.split(".")
        for part in parents:
            if part not in node:
                raise ConfigError(f"unknown config key {dotted!r}")
            node = node[part]
        if leaf not in node:
            raise ConfigError(f"unknown config key {dotted!r}")
        node[leaf] = value
    return RunConfig(merged)
