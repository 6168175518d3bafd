"""Motor primitives as convergent joint-space fields and their convex blending.

Each primitive is a linear spring toward a rest posture, theta_dot =
k * (theta_star - theta). Blending with convex weights keeps a single
attractor at the convex combination of the rest postures, so an arm
command is just a sparse weight vector over a triangulated basis of
task-space end-points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .errors import (
    CollinearBasis,
    DegenerateTriangle,
    InvalidCommand,
    OutOfWorkspace,
    UnstableStep,
)
from .plant import ArmGeometry, JointAngles, Point2, forward_kinematics

_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class MotorPrimitive:
    end_posture: JointAngles
    task_endpoint: Point2
    stiffness: float

    def __post_init__(self):
        if self.stiffness <= 0:
            raise ValueError("stiffness must be positive")


@dataclass(frozen=True)
class PrimitiveBasis:
    primitives: tuple[MotorPrimitive, ...]
    triangles: tuple[tuple[int, int, int], ...]

    def endpoint(self, i: int) -> Point2:
        return self.primitives[i].task_endpoint


@dataclass(frozen=True)
class ArmCommand:
    """Sparse convex weights over basis primitives, at most 3 nonzero."""

    weights: tuple[tuple[int, float], ...]

    def as_dict(self) -> dict[int, float]:
        return dict(self.weights)


def validate_command(basis: PrimitiveBasis, cmd: ArmCommand) -> None:
    """Raise InvalidCommand unless cmd satisfies the ArmCommand invariants."""
    w = cmd.as_dict()
    if len(w) != len(cmd.weights):
        raise InvalidCommand("duplicate primitive index in command")
    if not w:
        raise InvalidCommand("empty command")
    if any(v < 0 for v in w.values()):
        raise InvalidCommand("negative weight")
    if abs(sum(w.values()) - 1.0) > _WEIGHT_TOL:
        raise InvalidCommand("weights must sum to 1")
    nonzero = [i for i, v in w.items() if v > 0]
    if len(nonzero) > 3:
        raise InvalidCommand("more than 3 nonzero weights")
    if any(i < 0 or i >= len(basis.primitives) for i in w):
        raise InvalidCommand("primitive index out of range")
    support = set(nonzero)
    if not any(support <= set(tri) for tri in basis.triangles):
        raise InvalidCommand("weights do not lie in a single basis triangle")


def blend_field(
    basis: PrimitiveBasis, cmd: ArmCommand, posture: JointAngles
) -> np.ndarray:
    """Joint velocity of the convex blend of convergent fields at `posture`."""
    validate_command(basis, cmd)
    theta = posture.array()
    v = np.zeros(2)
    for i, w in cmd.weights:
        prim = basis.primitives[i]
        v += w * prim.stiffness * (prim.end_posture.array() - theta)
    return v


def blend_attractor(basis: PrimitiveBasis, cmd: ArmCommand) -> JointAngles:
    """Fixed point of the blended field for uniform stiffness."""
    theta = np.zeros(2)
    for i, w in cmd.weights:
        theta += w * basis.primitives[i].end_posture.array()
    return JointAngles(tuple(theta))


def ballistic_settle(
    basis: PrimitiveBasis,
    cmd: ArmCommand,
    initial: JointAngles,
    dt: float,
    horizon: float,
) -> JointAngles:
    """Euler-integrate the blended field from `initial` for `horizon` seconds."""
    if any(p.stiffness * dt >= 2 for p in basis.primitives):
        raise UnstableStep("stiffness * dt must be < 2 for Euler stability")
    validate_command(basis, cmd)
    theta = initial.array()
    steps = int(round(horizon / dt))
    for _ in range(steps):
        v = np.zeros(2)
        for i, w in cmd.weights:
            prim = basis.primitives[i]
            v += w * prim.stiffness * (prim.end_posture.array() - theta)
        theta = theta + v * dt
    return JointAngles(tuple(theta))


def _signed_area(v0: Point2, v1: Point2, v2: Point2) -> float:
    return 0.5 * (
        (v1.x - v0.x) * (v2.y - v0.y) - (v2.x - v0.x) * (v1.y - v0.y)
    )


def barycentric_weights(
    target: Point2, v0: Point2, v1: Point2, v2: Point2
) -> tuple[float, float, float]:
    """Barycentric coordinates of `target` in the triangle (v0, v1, v2).

    Weights sum to 1 and reconstruct the target exactly; they go negative
    when the target lies outside the triangle.
    """
    area = _signed_area(v0, v1, v2)
    if abs(area) <= 1e-9:
        raise DegenerateTriangle(f"triangle area {abs(area):.3e} below threshold")
    w0 = _signed_area(target, v1, v2) / area
    w1 = _signed_area(v0, target, v2) / area
    w2 = 1.0 - w0 - w1
    return (w0, w1, w2)


def build_basis(
    grid: list[JointAngles], geometry: ArmGeometry, stiffness: float
) -> PrimitiveBasis:
    """Build primitives with cached task end-points and triangulate them."""
    if len(grid) < 3:
        raise CollinearBasis("need at least 3 postures")
    prims = tuple(
        MotorPrimitive(p, forward_kinematics(p, geometry), stiffness) for p in grid
    )
    pts = np.array([[p.task_endpoint.x, p.task_endpoint.y] for p in prims])
    if len(grid) == 3:
        a = _signed_area(*(p.task_endpoint for p in prims))
        if abs(a) <= 1e-9:
            raise CollinearBasis("end-points are collinear")
        tris = [(0, 1, 2)]
    else:
        try:
            delaunay = Delaunay(pts)
        except QhullError as exc:
            raise CollinearBasis("end-points are collinear") from exc
        tris = []
        for simplex in delaunay.simplices:
            tri = tuple(sorted(int(i) for i in simplex))
            a = _signed_area(*(prims[i].task_endpoint for i in tri))
            if abs(a) > 1e-9:
                tris.append(tri)
        if not tris:
            raise CollinearBasis("end-points are collinear")
        tris.sort()
    return PrimitiveBasis(prims, tuple(tris))


def solve_command(target: Point2, basis: PrimitiveBasis) -> ArmCommand:
    """Locate `target` in the triangulation and return its barycentric command.

    Boundary points count as inside; ties between adjacent triangles go to
    the lowest triangle index.
    """
    for tri in basis.triangles:
        verts = [basis.endpoint(i) for i in tri]
        w = barycentric_weights(target, *verts)
        if all(wi >= -1e-12 for wi in w):
            clipped = np.clip(w, 0.0, None)
            clipped = clipped / clipped.sum()
            weights = tuple(
                (i, float(wi)) for i, wi in zip(tri, clipped) if wi > 0.0
            )
            return ArmCommand(weights)
    raise OutOfWorkspace(f"target ({target.x:.3f}, {target.y:.3f}) lies in no triangle")
