"""Two competing forward models and the storage-complexity benchmark.

The end-effector model maps absolute commands straight to sensory fields
(filled by exhaustive babbling); the displacement model maps (current
observation, displacement command) pairs to successor observations and
must be filled "by heart" for every state. The scaling experiment counts
table entries for both on an abstract N x N grid world, where the counts
are exact, and fits log-log slopes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CodeOutOfRange,
    EmptyModel,
    IncompleteDataset,
    MissingEntry,
)
from .motor_fields import ArmCommand, PrimitiveBasis, ballistic_settle
from .plant import ArmGeometry, JointAngles, Point2, SceneObject, WorldState
from .retina import EyeCommand, RetinaConfig, VisualField, render_visual_field
from .rng import RngStream


@dataclass(frozen=True)
class BabbleRecord:
    arm_index: int
    eye_index: int
    arm_cmd: ArmCommand
    eye_cmd: EyeCommand
    field: VisualField


@dataclass(frozen=True)
class BabbleDataset:
    records: tuple[BabbleRecord, ...]
    arm_grid_size: int
    eye_grid_size: int
    retina_cfg: RetinaConfig
    seed: int
    n_primitives: int


def babble(
    basis: PrimitiveBasis,
    geometry: ArmGeometry,
    arm_commands: list[ArmCommand],
    eye_fixations: list[Point2],
    retina_cfg: RetinaConfig,
    rest_posture: JointAngles,
    seed: RngStream,
    objects: tuple[SceneObject, ...] = (),
    settle_dt: float = 0.01,
    settle_horizon: float | None = None,
) -> BabbleDataset:
    """Systematic scan of every (arm, eye) command pair.

    Each arm command is settled ballistically from the rest posture, then
    the visual field is rendered at the eye fixation; one record per pair.
    """
    if not arm_commands or not eye_fixations:
        raise ValueError("command grids must be non-empty")
    if settle_horizon is None:
        k = max(p.stiffness for p in basis.primitives)
        settle_horizon = 25.0 / k
    records = []
    for a, cmd in enumerate(arm_commands):
        posture = ballistic_settle(basis, cmd, rest_posture, settle_dt, settle_horizon)
        world = WorldState(posture=posture, objects=objects)
        for e, fx in enumerate(eye_fixations):
            eye = EyeCommand(fx)
            fld = render_visual_field(
                world, geometry, eye, retina_cfg, seed.substream(a, e)
            )
            records.append(BabbleRecord(a, e, cmd, eye, fld))
    return BabbleDataset(
        tuple(records),
        len(arm_commands),
        len(eye_fixations),
        retina_cfg,
        seed.seed,
        len(basis.primitives),
    )


def dataset_to_jsonl(dataset: BabbleDataset) -> str:
    """One record per line: {"a", "e", "w" (dense weights), "fx", "img"}."""
    lines = []
    for rec in dataset.records:
        w = [0.0] * dataset.n_primitives
        for i, wi in rec.arm_cmd.weights:
            w[i] = wi
        lines.append(
            json.dumps(
                {
                    "a": rec.arm_index,
                    "e": rec.eye_index,
                    "w": w,
                    "fx": [rec.eye_cmd.fixation.x, rec.eye_cmd.fixation.y],
                    "img": rec.field.pixels.ravel().tolist(),
                }
            )
        )
    return "\n".join(lines) + "\n"


@dataclass
class EndEffectorModel:
    """Direct command -> visual field table (learning is storage)."""

    fields: dict[tuple[int, int], VisualField]
    coords: dict[tuple[int, int], np.ndarray]  # concatenated weights + fixation
    interpolation: str = "nearest"  # "nearest" | "none"


def train_endeffector(dataset: BabbleDataset, interpolation: str = "nearest") -> EndEffectorModel:
    expected = dataset.arm_grid_size * dataset.eye_grid_size
    if len(dataset.records) != expected:
        raise IncompleteDataset(
            f"expected {expected} records, got {len(dataset.records)}"
        )
    keys = {(r.arm_index, r.eye_index) for r in dataset.records}
    if len(keys) != expected:
        raise IncompleteDataset("duplicate (arm, eye) indices")
    fields, coords = {}, {}
    for rec in dataset.records:
        w = np.zeros(dataset.n_primitives)
        for i, wi in rec.arm_cmd.weights:
            w[i] = wi
        key = (rec.arm_index, rec.eye_index)
        fields[key] = rec.field
        coords[key] = np.concatenate(
            [w, [rec.eye_cmd.fixation.x, rec.eye_cmd.fixation.y]]
        )
    return EndEffectorModel(fields, coords, interpolation)


def predict_endeffector(
    model: EndEffectorModel, arm_cmd: ArmCommand, eye_cmd: EyeCommand, n_primitives: int
) -> VisualField:
    """Exact lookup on grid commands, else nearest stored command.

    Distances are Euclidean in the concatenated (weights, fixation) space;
    ties break to the lowest (arm, eye) index.
    """
    if not model.fields:
        raise EmptyModel("no trained entries")
    w = np.zeros(n_primitives)
    for i, wi in arm_cmd.weights:
        w[i] = wi
    query = np.concatenate([w, [eye_cmd.fixation.x, eye_cmd.fixation.y]])
    best_key, best_d = None, math.inf
    for key in sorted(model.coords):
        d = float(np.linalg.norm(model.coords[key] - query))
        if d < best_d - 1e-15:
            best_key, best_d = key, d
    if best_d <= 1e-12:
        return model.fields[best_key]
    if model.interpolation == "none":
        raise MissingEntry("query is not a grid command and interpolation is off")
    return model.fields[best_key]


@dataclass
class DisplacementModel:
    """Observation-relative table: (observation, displacement) -> observation."""

    n_cells: int  # codec: N cells per side, observation codes in [0, N^2)
    n_displacements: int
    table: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def n_codes(self) -> int:
        return self.n_cells * self.n_cells


def train_displacement(
    experience, n_cells: int, n_displacements: int
) -> DisplacementModel:
    """Store every (observation, displacement) -> successor triple seen."""
    model = DisplacementModel(n_cells, n_displacements)
    n_codes = model.n_codes
    for obs, disp, nxt in experience:
        if not (0 <= obs < n_codes and 0 <= nxt < n_codes):
            raise CodeOutOfRange(f"observation code out of range: {obs} -> {nxt}")
        if not 0 <= disp < n_displacements:
            raise CodeOutOfRange(f"displacement index out of range: {disp}")
        model.table[(obs, disp)] = nxt
    return model


def predict_displacement(model: DisplacementModel, obs: int, disp: int) -> int:
    """Exact lookup; this learner cannot generalise across states."""
    key = (obs, disp)
    if key not in model.table:
        raise MissingEntry(f"no entry for observation {obs}, displacement {disp}")
    return model.table[key]


def toroidal_grid_experience(n: int, displacement_set: str = "unit"):
    """Exhaustive experience on an N x N toroidal grid world.

    State/observation code is row * n + col. "unit" uses the 4 unit moves
    (right, left, up, down); "full" uses all n^2 wrap displacements
    (dx, dy), indexed dx * n + dy.
    """
    if displacement_set == "unit":
        moves = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    elif displacement_set == "full":
        moves = [(dx, dy) for dx in range(n) for dy in range(n)]
    else:
        raise ValueError(f"unknown displacement set {displacement_set!r}")
    for row in range(n):
        for col in range(n):
            obs = row * n + col
            for d, (dx, dy) in enumerate(moves):
                nxt = ((row + dy) % n) * n + (col + dx) % n
                yield obs, d, nxt


@dataclass
class ScalingRow:
    n: int
    disp_entries: int
    ee_entries: int
    disp_err: float
    ee_err: float


@dataclass
class ScalingReport:
    rows: list[ScalingRow]
    disp_slope: float
    ee_slope: float
    displacement_set: str

    @property
    def slope_ratio(self) -> float:
        return self.disp_slope / self.ee_slope

    def to_csv(self) -> str:
        lines = ["N,disp_entries,ee_entries,disp_err,ee_err"]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.disp_entries},{r.ee_entries},{r.disp_err},{r.ee_err}"
            )
        return "\n".join(lines) + "\n"


def scaling_experiment(
    resolutions: list[int], displacement_set: str = "full"
) -> ScalingReport:
    """Count the table entries both learners need for full coverage.

    For each N the displacement model is trained on the exhaustive grid
    experience and the end-effector model on the N^2 absolute commands
    (one fixation). Held-out error is the lookup error rate over all
    queries, which is 0 at full coverage. Slopes are least-squares fits of
    log(entries) against log(N).
    """
    if len(resolutions) < 3:
        raise ValueError("need at least 3 resolutions")
    if any(n < 4 for n in resolutions):
        raise ValueError("resolutions must be >= 4")
    rows = []
    for n in resolutions:
        n_disp = 4 if displacement_set == "unit" else n * n
        model = train_displacement(
            toroidal_grid_experience(n, displacement_set), n, n_disp
        )
        # Absolute-command table: command code -> resulting state code.
        ee_table = {code: code for code in range(n * n)}
        disp_miss = sum(
            1
            for obs, d, nxt in toroidal_grid_experience(n, displacement_set)
            if predict_displacement(model, obs, d) != nxt
        )
        total = n * n * n_disp
        ee_miss = sum(1 for code in range(n * n) if ee_table[code] != code)
        rows.append(
            ScalingRow(
                n,
                len(model.table),
                len(ee_table),
                disp_miss / total,
                ee_miss / (n * n),
            )
        )
    log_n = np.log([r.n for r in rows])
    disp_slope = float(np.polyfit(log_n, np.log([r.disp_entries for r in rows]), 1)[0])
    ee_slope = float(np.polyfit(log_n, np.log([r.ee_entries for r in rows]), 1)[0])
    return ScalingReport(rows, disp_slope, ee_slope, displacement_set)
