"""Ground-truth text serialization and prediction-text extraction.

Two target formats exist: a templated natural-language sentence per
shape, and a parenthesized key=value tuple per shape. Parsing is
regex-based and per-attribute: any attribute whose pattern fails comes
back as the NA placeholder instead of raising.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .scene import ColorName, QuadrantLabel, SceneConfig, ShapeKind


class OutputFormat(Enum):
    SENTENCE = "sentence"
    TUPLE = "tuple"


class _NAType:
    """Placeholder for unextractable attributes; never equals anything."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NA"

    def __bool__(self):
        return False


NA = _NAType()


@dataclass
class ParsedShape:
    """Attribute record extracted from one predicted shape segment."""

    shape: Union[ShapeKind, _NAType] = NA
    color: Union[ColorName, _NAType] = NA
    quadrant: Union[QuadrantLabel, _NAType] = NA
    center: Union[tuple[int, int], _NAType] = NA
    relative_position: Union[str, _NAType] = NA
    rotation_deg: Union[int, _NAType] = NA
    occluded: Union[bool, _NAType] = NA
    raw_segment: str = ""
    malformed: bool = field(default=False)


def normalize(segment: str) -> str:
    """Lowercase, collapse whitespace runs, trim."""
    return re.sub(r"\s+", " ", segment).strip().lower()


def serialize_shape(scene: SceneConfig, i: int, fmt: OutputFormat) -> str:
    """One shape's ground-truth segment in the requested format."""
    s = scene.shapes[i]
    quad = scene.quadrants[i].value
    rel = scene.relative_positions[i]
    x, y = s.center
    if fmt is OutputFormat.SENTENCE:
        occ = "occluded" if scene.occluded[i] else "not occluded"
        return (
            f"A {s.color.value} {s.kind.value} is located in the {quad} "
            f"quadrant, centred at coordinates ({x}, {y}), with relative "
            f"positions described as {rel}, rotated by {s.rotation_deg} "
            f"degrees, and is {occ}."
        )
    occ = "Yes" if scene.occluded[i] else "No"
    return (
        f"({s.kind.value}, quadrant={quad}, center_coordinates=({x}, {y}), "
        f"relative_position={rel}, rotation={s.rotation_deg}, "
        f"occlusion={occ}, color={s.color.value})"
    )


def serialize_scene(scene: SceneConfig, fmt: OutputFormat) -> str:
    """All shape segments in scene order, joined by a single space."""
    return " ".join(
        serialize_shape(scene, i, fmt) for i in range(len(scene.shapes))
    )


def split_segments(text: str, fmt: OutputFormat) -> list[str]:
    """Best-effort split of a prediction into per-shape segments."""
    if fmt is OutputFormat.SENTENCE:
        segments = []
        rest = text
        while True:
            m = re.search(r"\.(\s+|$)", rest)
            if not m:
                break
            segments.append(rest[: m.start() + 1].strip())
            rest = rest[m.end():]
        rest = rest.strip()
        if rest:
            segments.append(rest)
        return segments

    # Tuple format: scan for top-level balanced parenthesis groups.
    segments = []
    depth = 0
    start = None
    for pos, ch in enumerate(text):
        if ch == "(":
            if depth == 0:
                start = pos
            depth += 1
        elif ch == ")":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    segments.append(text[start: pos + 1])
                    start = None
    if start is not None:
        # Unbalanced opening: the remainder becomes one malformed segment.
        segments.append(text[start:])
    return segments


_SHAPE_WORDS = {k.value: k for k in ShapeKind}
_COLOR_WORDS = {c.value: c for c in ColorName}
_QUADRANT_WORDS = {q.value: q for q in QuadrantLabel}

_SENT_HEAD = re.compile(r"^\s*a\s+(\S+)\s+(\S+)\s+is\s+located", re.I)
_SENT_QUAD = re.compile(r"in\s+the\s+(\w+)\s+quadrant", re.I)
_SENT_CENTER = re.compile(
    r"cent(?:re|e)r?e?d?\s+at\s+coordinates\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)",
    re.I,
)
_SENT_REL = re.compile(
    r"relative\s+positions?\s+described\s+as\s+(.*?),\s*rotated\s+by",
    re.I | re.S,
)
_SENT_ROT = re.compile(r"rotated\s+by\s+(-?\d+)\s+degrees", re.I)
_SENT_OCC = re.compile(r"and\s+is\s+(not\s+)?occluded", re.I)

_TUP_HEAD = re.compile(r"^\s*\(\s*([a-zA-Z]+)\s*,", re.I)
_TUP_QUAD = re.compile(r"quadrant\s*=\s*(\w+)", re.I)
_TUP_CENTER = re.compile(
    r"center_coordinates\s*=\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)", re.I
)
_TUP_REL = re.compile(
    r"relative_position\s*=\s*(.*?),\s*rotation\s*=", re.I | re.S
)
_TUP_ROT = re.compile(r"\brotation\s*=\s*(-?\d+)", re.I)
_TUP_OCC = re.compile(r"occlusion\s*=\s*(yes|no)", re.I)
_TUP_COLOR = re.compile(r"color\s*=\s*([a-zA-Z]+)", re.I)


def parse_shape(segment: str, fmt: OutputFormat) -> ParsedShape:
    """Extract the seven attributes from one segment; failures become NA."""
    out = ParsedShape(raw_segment=segment)

    if fmt is OutputFormat.SENTENCE:
        head = _SENT_HEAD.search(segment)
        if head:
            out.color = _COLOR_WORDS.get(head.group(1).lower(), NA)
            out.shape = _SHAPE_WORDS.get(head.group(2).lower(), NA)
        quad = _SENT_QUAD.search(segment)
        center = _SENT_CENTER.search(segment)
        rel = _SENT_REL.search(segment)
        rot = _SENT_ROT.search(segment)
        occ = _SENT_OCC.search(segment)
        if occ:
            out.occluded = occ.group(1) is None
    else:
        head = _TUP_HEAD.search(segment)
        if head:
            out.shape = _SHAPE_WORDS.get(head.group(1).lower(), NA)
        color = _TUP_COLOR.search(segment)
        if color:
            out.color = _COLOR_WORDS.get(color.group(1).lower(), NA)
        quad = _TUP_QUAD.search(segment)
        center = _TUP_CENTER.search(segment)
        rel = _TUP_REL.search(segment)
        rot = _TUP_ROT.search(segment)
        occ = _TUP_OCC.search(segment)
        if occ:
            out.occluded = occ.group(1).lower() == "yes"

    if quad:
        out.quadrant = _QUADRANT_WORDS.get(quad.group(1).lower(), NA)
    if center:
        out.center = (int(center.group(1)), int(center.group(2)))
    if rel:
        out.relative_position = normalize(rel.group(1))
    if rot:
        out.rotation_deg = int(rot.group(1))

    out.malformed = any(
        v is NA
        for v in (out.shape, out.color, out.quadrant, out.center,
                  out.relative_position, out.rotation_deg, out.occluded)
    )
    return out


def scene_records(scene: SceneConfig) -> list[ParsedShape]:
    """Fully concrete ground-truth attribute records for a scene."""
    out = []
    for i, s in enumerate(scene.shapes):
        out.append(ParsedShape(
            shape=s.kind,
            color=s.color,
            quadrant=scene.quadrants[i],
            center=s.center,
            relative_position=normalize(scene.relative_positions[i]),
            rotation_deg=s.rotation_deg,
            occluded=scene.occluded[i],
            raw_segment="",
        ))
    return out
