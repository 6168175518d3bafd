"""Foveated pixel retina: renders the scene and hand relative to a fixation.

The viewed window is a square of pixels centred on the fixation point.
The fixation is snapped to the pixel lattice internally, so shifting the
fixation by an exact number of pixel widths reproduces the same sample
points and the rendered field is a bit-exact integer translation of the
unshifted one (the referential-shift property).

Blobs are additive, unoccluded Gaussians truncated at 4 sigma; scene
objects use their own radius as sigma, the hand uses the configured blob
sigma at intensity 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShiftTooLarge
from .plant import ArmGeometry, Point2, WorldState, forward_kinematics
from .rng import RngStream

WORKSPACE_BOUND = 1.5
SUPPORT_SIGMAS = 4.0


@dataclass(frozen=True)
class EyeCommand:
    """Fixation point in the workspace plane."""

    fixation: Point2

    def __post_init__(self):
        if not (
            abs(self.fixation.x) <= WORKSPACE_BOUND
            and abs(self.fixation.y) <= WORKSPACE_BOUND
        ):
            raise ValueError("fixation outside workspace bounds")


@dataclass(frozen=True)
class RetinaConfig:
    resolution: int = 33
    window: float = 1.0
    blob_sigma: float = 0.04
    sensor_noise_std: float = 0.0

    def __post_init__(self):
        if self.resolution < 3 or self.resolution % 2 == 0:
            raise ValueError("resolution must be odd and >= 3")
        if self.window <= 0 or self.blob_sigma <= 0:
            raise ValueError("window and blob_sigma must be positive")
        if self.sensor_noise_std < 0:
            raise ValueError("sensor_noise_std must be nonnegative")

    @property
    def pixel_size(self) -> float:
        return self.window / self.resolution


@dataclass(frozen=True)
class VisualField:
    """R x R intensity grid, row-major, row 0 at the top."""

    pixels: np.ndarray

    def __post_init__(self):
        self.pixels.flags.writeable = False


def _add_blob(
    field: np.ndarray, xs: np.ndarray, ys: np.ndarray,
    center: Point2, intensity: float, sigma: float,
) -> None:
    dx = xs - center.x
    dy = ys - center.y
    r2 = dy[:, None] ** 2 + dx[None, :] ** 2
    cutoff = (SUPPORT_SIGMAS * sigma) ** 2
    contrib = intensity * np.exp(-r2 / (2.0 * sigma * sigma))
    field += np.where(r2 <= cutoff, contrib, 0.0)


def render_visual_field(
    world: WorldState,
    geometry: ArmGeometry,
    eye: EyeCommand,
    cfg: RetinaConfig,
    rng: RngStream,
) -> VisualField:
    """Render scene objects and the hand as additive Gaussian blobs."""
    r = cfg.resolution
    p = cfg.pixel_size
    c = (r - 1) // 2
    # Snap the fixation to the pixel lattice; sample-point world coordinates
    # are then exact multiples of the pixel size, which makes integer-pixel
    # fixation shifts bit-exact translations.
    mx = round(eye.fixation.x / p)
    my = round(eye.fixation.y / p)
    j = np.arange(r)
    xs = (mx + (j - c)) * p
    ys = (my + (c - j)) * p  # row 0 at the top
    field = np.zeros((r, r))
    for obj in world.objects:
        _add_blob(field, xs, ys, obj.position, obj.intensity, obj.radius)
    hand = forward_kinematics(world.posture, geometry)
    _add_blob(field, xs, ys, hand, 1.0, cfg.blob_sigma)
    if cfg.sensor_noise_std > 0:
        field = field + rng.generator().normal(0.0, cfg.sensor_noise_std, (r, r))
        field = np.maximum(field, 0.0)
    return VisualField(field)


def shift_reference(field: VisualField, dx_pixels: int, dy_pixels: int) -> VisualField:
    """Integer translation with zero fill.

    Positive dx moves content left (the visual consequence of fixating
    further right); positive dy moves content up, i.e. toward lower row
    indices (fixating further down).
    """
    r = field.pixels.shape[0]
    if abs(dx_pixels) >= r or abs(dy_pixels) >= r:
        raise ShiftTooLarge(f"shift ({dx_pixels}, {dy_pixels}) exceeds field size {r}")
    out = np.zeros_like(field.pixels)
    src = field.pixels
    r0, r1 = max(0, -dy_pixels), min(r, r - dy_pixels)
    c0, c1 = max(0, -dx_pixels), min(r, r - dx_pixels)
    out[r0:r1, c0:c1] = src[r0 + dy_pixels : r1 + dy_pixels, c0 + dx_pixels : c1 + dx_pixels]
    return VisualField(out)
