"""Domain model for shapes, scenes, and derived ground-truth attributes.

All coordinates are image coordinates: origin at the top-left corner,
x grows right, y grows down. Rotations are counter-clockwise in the
conventional y-up view, i.e. clockwise on screen.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class ShapeKind(Enum):
    CIRCLE = "circle"
    RECTANGLE = "rectangle"
    ELLIPSE = "ellipse"
    TRIANGLE = "triangle"
    SQUARE = "square"


class ColorName(Enum):
    ORANGE = "orange"
    RED = "red"
    BLUE = "blue"
    GREEN = "green"
    YELLOW = "yellow"
    MAGENTA = "magenta"


class QuadrantLabel(Enum):
    FIRST = "first"
    SECOND = "second"
    THIRD = "third"
    FOURTH = "fourth"


DEFAULT_CANVAS = (224, 224)

# Number of size extents each kind carries:
# circle: (radius,); square: (side,); triangle: (circumradius,);
# rectangle: (half_width, half_height); ellipse: (semi_x, semi_y).
EXTENT_COUNT = {
    ShapeKind.CIRCLE: 1,
    ShapeKind.SQUARE: 1,
    ShapeKind.TRIANGLE: 1,
    ShapeKind.RECTANGLE: 2,
    ShapeKind.ELLIPSE: 2,
}


@dataclass(frozen=True)
class SizeSpec:
    """Per-kind base extents in pixels plus a positive scale multiplier."""

    extents: tuple[int, ...]
    scale: int = 1

    def __post_init__(self):
        if not self.extents or any(e <= 0 for e in self.extents):
            raise ValueError("extents must be strictly positive")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @property
    def scaled(self) -> tuple[int, ...]:
        return tuple(e * self.scale for e in self.extents)


@dataclass(frozen=True)
class ShapeInstance:
    kind: ShapeKind
    color: ColorName
    center: tuple[int, int]
    size: SizeSpec
    rotation_deg: int = 0

    def __post_init__(self):
        if len(self.size.extents) != EXTENT_COUNT[self.kind]:
            raise ValueError(
                f"{self.kind.value} needs {EXTENT_COUNT[self.kind]} extent(s)"
            )
        if self.kind is ShapeKind.CIRCLE and self.rotation_deg != 0:
            raise ValueError("circles always carry rotation 0")


@dataclass(frozen=True)
class AABB:
    """Axis-aligned integer bounding box, min corner <= max corner."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("min corner must not exceed max corner")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min


def rotate_offset(dx: float, dy: float, theta_deg: float) -> tuple[float, float]:
    """Rotate an image-coordinate offset counter-clockwise (y-up sense)."""
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    return dx * c + dy * s, -dx * s + dy * c


def shape_vertices(shape: ShapeInstance) -> list[tuple[float, float]]:
    """Outline vertices of polygonal shapes (rect/square/triangle), rotated."""
    cx, cy = shape.center
    ext = shape.size.scaled
    if shape.kind in (ShapeKind.RECTANGLE, ShapeKind.SQUARE):
        if shape.kind is ShapeKind.SQUARE:
            hw = hh = ext[0] / 2.0
        else:
            hw, hh = float(ext[0]), float(ext[1])
        corners = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
    elif shape.kind is ShapeKind.TRIANGLE:
        # Equilateral, apex up at rotation 0 (y-up angles 90/210/330 degrees).
        r = float(ext[0])
        corners = []
        for k in range(3):
            phi = math.radians(90.0 + 120.0 * k)
            corners.append((r * math.cos(phi), -r * math.sin(phi)))
    else:
        raise ValueError(f"{shape.kind.value} has no polygon outline")
    out = []
    for dx, dy in corners:
        rx, ry = rotate_offset(dx, dy, shape.rotation_deg)
        out.append((cx + rx, cy + ry))
    return out


def bounding_box(shape: ShapeInstance) -> AABB:
    """Tight axis-aligned box of the rotated outline, rounded outward."""
    cx, cy = shape.center
    ext = shape.size.scaled
    t = math.radians(shape.rotation_deg)
    if shape.kind is ShapeKind.CIRCLE:
        r = ext[0]
        return AABB(cx - r, cy - r, cx + r, cy + r)
    if shape.kind is ShapeKind.ELLIPSE:
        a, b = ext
        hx = math.hypot(a * math.cos(t), b * math.sin(t))
        hy = math.hypot(a * math.sin(t), b * math.cos(t))
        return AABB(
            math.floor(cx - hx), math.floor(cy - hy),
            math.ceil(cx + hx), math.ceil(cy + hy),
        )
    verts = shape_vertices(shape)
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    return AABB(
        math.floor(min(xs)), math.floor(min(ys)),
        math.ceil(max(xs)), math.ceil(max(ys)),
    )


def bbox_half_extents(kind: ShapeKind, scaled_extents: Sequence[int],
                      rotation_deg: int) -> tuple[float, float]:
    """Half width/height of the rotated bounding box about the center."""
    probe = ShapeInstance(
        kind=kind,
        color=ColorName.RED,
        center=(0, 0),
        size=SizeSpec(extents=tuple(scaled_extents)),
        rotation_deg=0 if kind is ShapeKind.CIRCLE else rotation_deg,
    )
    t = math.radians(probe.rotation_deg)
    ext = probe.size.scaled
    if kind is ShapeKind.CIRCLE:
        return float(ext[0]), float(ext[0])
    if kind is ShapeKind.ELLIPSE:
        a, b = ext
        return (math.hypot(a * math.cos(t), b * math.sin(t)),
                math.hypot(a * math.sin(t), b * math.cos(t)))
    verts = shape_vertices(probe)
    return (max(abs(v[0]) for v in verts), max(abs(v[1]) for v in verts))


def relaxed_overlap(a: AABB, b: AABB, relax_fraction: float = 0.05) -> bool:
    """Overlap test after shrinking each box toward its own center.

    Each side moves inward by relax_fraction of that box's width/height,
    suppressing false-positive occlusions from near-tangent round shapes.
    """
    if not 0.0 <= relax_fraction < 0.5:
        raise ValueError("relax_fraction must lie in [0, 0.5)")

    def shrunk(box: AABB) -> tuple[float, float, float, float]:
        fx = relax_fraction * box.width
        fy = relax_fraction * box.height
        return (box.x_min + fx, box.y_min + fy, box.x_max - fx, box.y_max - fy)

    ax1, ay1, ax2, ay2 = shrunk(a)
    bx1, by1, bx2, by2 = shrunk(b)
    return (min(ax2, bx2) - max(ax1, bx1) > 0
            and min(ay2, by2) - max(ay1, by1) > 0)


def quadrant(center: tuple[int, int], canvas: tuple[int, int] = DEFAULT_CANVAS
             ) -> QuadrantLabel:
    """Quadrant of a point; labels follow the y-up mathematical order.

    first = top-right, second = top-left, third = bottom-left,
    fourth = bottom-right. Points on the vertical midline go left,
    points on the horizontal midline go down.
    """
    cx, cy = canvas[0] / 2.0, canvas[1] / 2.0
    x, y = center
    if y < cy:
        return QuadrantLabel.FIRST if x > cx else QuadrantLabel.SECOND
    return QuadrantLabel.THIRD if x <= cx else QuadrantLabel.FOURTH


@dataclass(frozen=True)
class SceneConfig:
    """One image's ground truth: shapes plus derived attributes.

    The derived lists (occluded, quadrant, relative_position) are pure
    functions of shapes; use SceneConfig.build to compute them.
    """

    canvas: tuple[int, int]
    shapes: tuple[ShapeInstance, ...]
    occluded: tuple[bool, ...]
    quadrants: tuple[QuadrantLabel, ...]
    relative_positions: tuple[str, ...]

    def __post_init__(self):
        n = len(self.shapes)
        if not (len(self.occluded) == len(self.quadrants)
                == len(self.relative_positions) == n):
            raise ValueError("derived attribute lists must match shape count")

    @classmethod
    def build(cls, shapes: Iterable[ShapeInstance],
              canvas: tuple[int, int] = DEFAULT_CANVAS,
              relax_fraction: float = 0.05) -> "SceneConfig":
        shapes = tuple(shapes)
        return cls(
            canvas=canvas,
            shapes=shapes,
            occluded=tuple(shape_occlusion_flags(shapes, relax_fraction)),
            quadrants=tuple(quadrant(s.center, canvas) for s in shapes),
            relative_positions=tuple(
                relative_position(shapes, i) for i in range(len(shapes))
            ),
        )


def shape_occlusion_flags(shapes: Sequence[ShapeInstance],
                          relax_fraction: float = 0.05) -> list[bool]:
    """flag[i] is true iff shape i relaxed-overlaps at least one other."""
    boxes = [bounding_box(s) for s in shapes]
    n = len(shapes)
    flags = [False] * n
    for i in range(n):
        for j in range(i + 1, n):
            if relaxed_overlap(boxes[i], boxes[j], relax_fraction):
                flags[i] = True
                flags[j] = True
    return flags


def occlusion_flags(scene: SceneConfig, relax_fraction: float = 0.05) -> list[bool]:
    if not scene.shapes:
        raise ValueError("scene must contain at least one shape")
    return shape_occlusion_flags(scene.shapes, relax_fraction)


def overlap_components(shapes: Sequence[ShapeInstance],
                       relax_fraction: float = 0.05) -> list[list[int]]:
    """Connected components of the relaxed-overlap graph, by shape index."""
    boxes = [bounding_box(s) for s in shapes]
    n = len(shapes)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if relaxed_overlap(boxes[i], boxes[j], relax_fraction):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def relative_position(shapes: Sequence[ShapeInstance], i: int) -> str:
    """Descriptor of shape i relative to every other shape, in scene order."""
    if not 0 <= i < len(shapes):
        raise IndexError(i)
    xi, yi = shapes[i].center
    parts = []
    for j, other in enumerate(shapes):
        if j == i:
            continue
        xj, yj = other.center
        if xi < xj:
            horiz = "left of"
        elif xi > xj:
            horiz = "right of"
        else:
            horiz = "aligned with"
        if yi < yj:
            vert = "above"
        elif yi > yj:
            vert = "below"
        else:
            vert = "level with"
        parts.append(
            f"{horiz} and {vert} the {other.color.value} {other.kind.value}"
        )
    return "; ".join(parts) if parts else "none"


def canonical_string(scene: SceneConfig) -> str:
    """Field-order-fixed, whitespace-free serialization used for hashing.

    Format: kind|color|cx,cy|extents|rot per shape, shapes joined by ';'.
    """
    parts = []
    for s in scene.shapes:
        ext = ",".join(str(e) for e in s.size.scaled)
        parts.append(
            f"{s.kind.value}|{s.color.value}|{s.center[0]},{s.center[1]}"
            f"|{ext}|{s.rotation_deg}"
        )
    return ";".join(parts)


def md5_hex(data: str) -> str:
    return hashlib.md5(data.encode("utf-8")).hexdigest()


def canonical_hash(scene: SceneConfig) -> str:
    """MD5 digest of the canonical serialization; 32 lowercase hex chars."""
    return md5_hex(canonical_string(scene))
