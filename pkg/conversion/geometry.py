"""
conversion/geometry.py
======================
Equirectangular ↔ perspective projection math for the virtual camera.

Conventions (STARSS23 labels are consumed unmodified):
  - azimuth is positive counterclockwise, i.e. to the LEFT of the image;
    rightward screen motion means decreasing azimuth
  - elevation is positive upward
  - camera frame: forward, left, up
  - content pixel i spans [i, i+1); the principal point sits at the
    continuous centre (content_width / 2, content_height / 2)
  - onscreen means 0 <= x < content_width and 0 <= y < content_height

Everything here is a pure function over immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import ndimage

from config.settings import CAMERA


def normalize_azimuth(azimuth):
    """Wrap degrees into [-180, 180). Works on floats and numpy arrays."""
    if isinstance(azimuth, np.ndarray):
        return np.mod(azimuth + 180.0, 360.0) - 180.0
    return (azimuth + 180.0) % 360.0 - 180.0


# ── Domain types ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Direction:
    azimuth: float
    elevation: float

    def __post_init__(self):
        if not -90.0 <= self.elevation <= 90.0:
            raise ValueError(f"elevation {self.elevation} outside [-90, 90]")
        object.__setattr__(self, "azimuth", normalize_azimuth(float(self.azimuth)))


@dataclass(frozen=True)
class ViewAngle:
    yaw: float
    pitch: float = 0.0

    def __post_init__(self):
        if self.pitch != 0.0:
            raise ValueError("only level views are supported (pitch must be 0)")


@dataclass(frozen=True)
class CameraSpec:
    hfov: float = CAMERA["hfov_deg"]
    content_width: int = CAMERA["content_width"]
    content_height: int = CAMERA["content_height"]
    canvas_width: int = CAMERA["canvas_width"]
    canvas_height: int = CAMERA["canvas_height"]

    def __post_init__(self):
        if not 0.0 < self.hfov < 180.0:
            raise ValueError(f"hfov must be in (0, 180), got {self.hfov}")
        if self.content_width <= 0 or self.content_height <= 0:
            raise ValueError("content dimensions must be positive")
        if self.content_width * 9 != self.content_height * 16:
            raise ValueError(
                f"content {self.content_width}x{self.content_height} is not 16:9"
            )
        if self.canvas_width < self.content_width or self.canvas_height < self.content_height:
            raise ValueError("canvas must be at least as large as the content")

    @property
    def focal(self) -> float:
        """Focal length in pixels."""
        return (self.content_width / 2.0) / math.tan(math.radians(self.hfov / 2.0))

    @property
    def vfov(self) -> float:
        half = math.tan(math.radians(self.hfov / 2.0)) * self.content_height / self.content_width
        return math.degrees(2.0 * math.atan(half))

    @property
    def principal_point(self) -> Tuple[float, float]:
        # continuous content centre; pixel i spans [i, i+1), so the centre pixel (127, 71)
        # has its centre at (127.5, 71.5) and the optical axis lands at x = 128
        return self.content_width / 2.0, self.content_height / 2.0


@dataclass(frozen=True)
class PixelPos:
    x: float
    y: float
    content_width: int = field(default=CAMERA["content_width"], repr=False)

    @property
    def normalized_x(self) -> float:
        """Horizontal position in [0, 1): 0 = left end, 1 = right end."""
        return self.x / self.content_width


@dataclass(frozen=True)
class SamplingGrid:
    """Per-output-pixel equirect sample positions, shape (content_height, content_width)."""
    u: NDArray[np.float64]
    v: NDArray[np.float64]
    equirect_width: int
    equirect_height: int

    @property
    def shape(self) -> Tuple[int, int]:
        return self.u.shape


# ── Direction ↔ pixel ─────────────────────────────────────────────────────────

def _pixel_rays(x, y, camera: CameraSpec, view: ViewAngle):
    """Azimuth/elevation (degrees) of the pinhole rays through content coordinates x, y."""
    cx, cy = camera.principal_point
    f = camera.focal
    left = cx - np.asarray(x, dtype=np.float64)
    up = cy - np.asarray(y, dtype=np.float64)
    rel_az = np.degrees(np.arctan2(left, f))
    elevation = np.degrees(np.arctan2(up, np.hypot(f, left)))
    azimuth = normalize_azimuth(rel_az + view.yaw)
    return azimuth, elevation


def pixel_to_direction(x: float, y: float, camera: CameraSpec, view: ViewAngle) -> Direction:
    """Inverse pinhole: the direction seen at content coordinates (x, y)."""
    az, el = _pixel_rays(x, y, camera, view)
    return Direction(float(az), float(el))


def project_direction(
    direction: Direction,
    camera: CameraSpec,
    view: ViewAngle,
) -> Optional[PixelPos]:
    """
    Project a world direction into the perspective content image.
    Returns None when the direction is behind the camera or lands outside
    the content rectangle.
    """
    rel = normalize_azimuth(direction.azimuth - view.yaw)
    if abs(rel) >= 90.0:
        return None

    rel_rad = math.radians(rel)
    el_rad = math.radians(direction.elevation)
    forward = math.cos(el_rad) * math.cos(rel_rad)
    if forward <= 0.0:
        return None

    cx, cy = camera.principal_point
    t_half = math.tan(math.radians(camera.hfov / 2.0))
    # left/forward == tan(rel) and up/forward == tan(el)/cos(rel)
    x = cx - cx * math.tan(rel_rad) / t_half
    y = cy - camera.focal * math.tan(el_rad) / math.cos(rel_rad)

    if 0.0 <= x < camera.content_width and 0.0 <= y < camera.content_height:
        return PixelPos(x, y, camera.content_width)
    return None


def direction_to_equirect(
    azimuth,
    elevation,
    equirect_dims: Tuple[int, int],
):
    """Equirect (u, v) of a direction; u grows rightward as azimuth decreases."""
    width, height = equirect_dims
    u = (0.5 - np.asarray(azimuth, dtype=np.float64) / 360.0) * width
    v = (0.5 - np.asarray(elevation, dtype=np.float64) / 180.0) * height
    return u, v


# ── Image projection ──────────────────────────────────────────────────────────

def build_projection_map(
    camera: CameraSpec,
    view: ViewAngle,
    equirect_dims: Tuple[int, int],
) -> SamplingGrid:
    """
    Precompute the equirect sample position of every content pixel centre.
    equirect_dims is (width, height).
    """
    width, height = equirect_dims
    if width <= 0 or height <= 0:
        raise ValueError(f"equirect dims must be positive, got {equirect_dims}")

    xs = np.arange(camera.content_width, dtype=np.float64) + 0.5
    ys = np.arange(camera.content_height, dtype=np.float64) + 0.5
    grid_x, grid_y = np.meshgrid(xs, ys)

    azimuth, elevation = _pixel_rays(grid_x, grid_y, camera, view)
    u, v = direction_to_equirect(azimuth, elevation, equirect_dims)
    return SamplingGrid(u=u, v=v, equirect_width=width, equirect_height=height)


def project_equirect_to_perspective(image: NDArray, grid: SamplingGrid) -> NDArray:
    """
    Bilinear resampling of an equirect image (H, W[, C]) at the grid positions.
    Columns wrap around; rows clamp to the image. Integer images come back
    rounded to the input dtype.
    """
    if image.shape[0] != grid.equirect_height or image.shape[1] != grid.equirect_width:
        raise ValueError(
            f"image is {image.shape[1]}x{image.shape[0]} but grid expects "
            f"{grid.equirect_width}x{grid.equirect_height}"
        )

    src = image.astype(np.float64)
    # repeat the bottom row so the vertical neighbour of the last row never wraps
    src = np.concatenate([src, src[-1:]], axis=0)
    coords = np.stack([np.clip(grid.v, 0.0, grid.equirect_height - 1), grid.u])

    if src.ndim == 2:
        out = ndimage.map_coordinates(src, coords, order=1, mode="grid-wrap")
    else:
        out = np.stack(
            [ndimage.map_coordinates(src[..., c], coords, order=1, mode="grid-wrap")
             for c in range(src.shape[2])],
            axis=-1,
        )

    if np.issubdtype(image.dtype, np.integer):
        info = np.iinfo(image.dtype)
        return np.clip(np.rint(out), info.min, info.max).astype(image.dtype)
    return out.astype(image.dtype, copy=False)


def pad_to_canvas(image: NDArray, camera: CameraSpec) -> NDArray:
    """Centre the content image on a black canvas (extra row goes to the bottom)."""
    h, w = image.shape[:2]
    if h > camera.canvas_height or w > camera.canvas_width:
        raise ValueError(
            f"image {w}x{h} larger than canvas {camera.canvas_width}x{camera.canvas_height}"
        )
    if (w, h) != (camera.content_width, camera.content_height):
        raise ValueError(
            f"image {w}x{h} does not match content {camera.content_width}x{camera.content_height}"
        )

    top = (camera.canvas_height - h) // 2
    left = (camera.canvas_width - w) // 2
    pad = [(top, camera.canvas_height - h - top), (left, camera.canvas_width - w - left)]
    pad += [(0, 0)] * (image.ndim - 2)
    return np.pad(image, pad, mode="constant", constant_values=0)
