"""Deterministic rasterization of scenes to RGB images.

No anti-aliasing: a pixel belongs to a shape iff its center point lies
inside the rotated outline, so the same scene always yields the same
pixel buffer on every platform.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .scene import (
    ColorName,
    SceneConfig,
    ShapeInstance,
    ShapeKind,
    bounding_box,
    shape_vertices,
)

PALETTE: dict[ColorName, tuple[int, int, int]] = {
    ColorName.ORANGE: (255, 165, 0),
    ColorName.RED: (255, 0, 0),
    ColorName.BLUE: (0, 0, 255),
    ColorName.GREEN: (0, 128, 0),
    ColorName.YELLOW: (255, 255, 0),
    ColorName.MAGENTA: (255, 0, 255),
}

BACKGROUND = (255, 255, 255)


def color_value(c: ColorName) -> tuple[int, int, int]:
    return PALETTE[c]


@dataclass
class RgbImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8, row-major

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError("pixel buffer shape mismatch")


def _inside_mask(shape: ShapeInstance, xs: np.ndarray, ys: np.ndarray
                 ) -> np.ndarray:
    """Boolean mask of pixel centers inside the rotated shape outline."""
    cx, cy = shape.center
    dx = xs - cx
    dy = ys - cy
    ext = shape.size.scaled
    if shape.kind is ShapeKind.CIRCLE:
        r = ext[0]
        return dx * dx + dy * dy <= r * r
    # Undo the image-coordinate rotation to test in the shape frame.
    t = math.radians(shape.rotation_deg)
    c, s = math.cos(t), math.sin(t)
    u = dx * c - dy * s
    v = dx * s + dy * c
    if shape.kind is ShapeKind.ELLIPSE:
        a, b = ext
        return (u / a) ** 2 + (v / b) ** 2 <= 1.0
    if shape.kind in (ShapeKind.RECTANGLE, ShapeKind.SQUARE):
        if shape.kind is ShapeKind.SQUARE:
            hw = hh = ext[0] / 2.0
        else:
            hw, hh = ext
        return (np.abs(u) <= hw) & (np.abs(v) <= hh)
    if shape.kind is ShapeKind.TRIANGLE:
        verts = shape_vertices(shape)
        mask = np.ones(xs.shape, dtype=bool)
        # Vertices wind consistently, so one sign convention suffices.
        area2 = (
            (verts[1][0] - verts[0][0]) * (verts[2][1] - verts[0][1])
            - (verts[1][1] - verts[0][1]) * (verts[2][0] - verts[0][0])
        )
        sign = 1.0 if area2 >= 0 else -1.0
        for k in range(3):
            x0, y0 = verts[k]
            x1, y1 = verts[(k + 1) % 3]
            cross = (x1 - x0) * (ys - y0) - (y1 - y0) * (xs - x0)
            mask &= sign * cross >= 0
        return mask
    raise ValueError(f"unknown shape kind {shape.kind!r}")


def rasterize(scene: SceneConfig) -> RgbImage:
    """White background, shapes filled in scene order (later on top)."""
    w, h = scene.canvas
    buf = np.full((h, w, 3), 255, dtype=np.uint8)
    for shape in scene.shapes:
        box = bounding_box(shape)
        x0, x1 = max(box.x_min, 0), min(box.x_max, w - 1)
        y0, y1 = max(box.y_min, 0), min(box.y_max, h - 1)
        if x0 > x1 or y0 > y1:
            continue
        ys, xs = np.mgrid[y0:y1 + 1, x0:x1 + 1]
        mask = _inside_mask(shape, xs.astype(float), ys.astype(float))
        region = buf[y0:y1 + 1, x0:x1 + 1]
        region[mask] = color_value(shape.color)
    return RgbImage(width=w, height=h, pixels=buf)


def write_png(img: RgbImage, path) -> None:
    """8-bit RGB PNG; fixed encoder settings so identical images give
    byte-identical files. Writes via a temp file so failures leave no
    partial output behind."""
    tmp = f"{path}.tmp"
    try:
        Image.fromarray(img.pixels, mode="RGB").save(tmp, format="PNG")
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def read_png(path) -> RgbImage:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return RgbImage(width=arr.shape[1], height=arr.shape[0], pixels=arr)
