"""Constrained scene sampling for the train/eval/out-of-domain splits.

Every sample draws from its own RNG stream (seeded from base seed, split
name, sample index, and dedup retry counter), so generation is a pure
function of the configuration and parallelizes deterministically.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .scene import (
    DEFAULT_CANVAS,
    ColorName,
    EXTENT_COUNT,
    SceneConfig,
    ShapeInstance,
    ShapeKind,
    SizeSpec,
    bbox_half_extents,
    bounding_box,
    canonical_hash,
    overlap_components,
    relaxed_overlap,
)


class RejectionBudgetExhausted(RuntimeError):
    """Raised when a scene cannot be placed within the rejection budget."""


@dataclass(frozen=True)
class SplitSpec:
    name: str
    n_samples: int
    shapes_per_image: tuple[int, int]
    occlusion_limit: tuple[int, int]
    rotation_set: frozenset[int]
    size_scale: int = 1
    forbid_hashes_of: tuple[str, ...] = ()

    def __post_init__(self):
        if self.shapes_per_image[0] < 1:
            raise ValueError("shapes_per_image.min must be >= 1")
        if not self.rotation_set:
            raise ValueError("rotation_set must be non-empty")
        if self.occlusion_limit[0] > self.occlusion_limit[1]:
            raise ValueError("occlusion_limit range inverted")


# Default per-kind extent ranges (base pixels, before the split's scale).
DEFAULT_EXTENT_RANGES: dict[ShapeKind, tuple[tuple[int, int], ...]] = {
    ShapeKind.CIRCLE: ((15, 35),),
    ShapeKind.SQUARE: ((30, 70),),
    ShapeKind.TRIANGLE: ((18, 40),),
    ShapeKind.RECTANGLE: ((15, 35), (15, 35)),
    ShapeKind.ELLIPSE: ((15, 35), (15, 35)),
}


@dataclass(frozen=True)
class GenerationConfig:
    base_seed: int = 0
    canvas: tuple[int, int] = DEFAULT_CANVAS
    extent_ranges: Mapping[ShapeKind, tuple[tuple[int, int], ...]] = field(
        default_factory=lambda: dict(DEFAULT_EXTENT_RANGES)
    )
    relax_fraction: float = 0.05
    max_rejections: int = 1000

    def __post_init__(self):
        if self.max_rejections <= 0:
            raise ValueError("max_rejections must be positive")
        for kind, ranges in self.extent_ranges.items():
            if len(ranges) != EXTENT_COUNT[kind]:
                raise ValueError(f"wrong extent range arity for {kind.value}")
            if any(lo <= 0 or lo > hi for lo, hi in ranges):
                raise ValueError("extent ranges must be positive and ordered")


TRAIN_ROTATIONS = frozenset({0, 15, 30})
OD_ROTATIONS = frozenset({45, 72})


def builtin_split_specs() -> dict[str, SplitSpec]:
    """The seven benchmark splits: train, eval, and five OD test sets."""
    train = SplitSpec(
        name="train", n_samples=20000,
        shapes_per_image=(2, 4), occlusion_limit=(1, 3),
        rotation_set=TRAIN_ROTATIONS,
    )
    return {
        "train": train,
        "eval": replace(train, name="eval", n_samples=1000,
                        forbid_hashes_of=("train",)),
        "od_composition": SplitSpec(
            name="od_composition", n_samples=200,
            shapes_per_image=(5, 6), occlusion_limit=(5, 6),
            rotation_set=OD_ROTATIONS, forbid_hashes_of=("train",),
        ),
        "od_spatial": SplitSpec(
            name="od_spatial", n_samples=200,
            shapes_per_image=(5, 6), occlusion_limit=(1, 3),
            rotation_set=TRAIN_ROTATIONS, forbid_hashes_of=("train",),
        ),
        "od_occlusion": SplitSpec(
            name="od_occlusion", n_samples=200,
            shapes_per_image=(2, 4), occlusion_limit=(4, 5),
            rotation_set=TRAIN_ROTATIONS, forbid_hashes_of=("train",),
        ),
        "od_rotation": SplitSpec(
            name="od_rotation", n_samples=200,
            shapes_per_image=(2, 4), occlusion_limit=(1, 3),
            rotation_set=OD_ROTATIONS, forbid_hashes_of=("train",),
        ),
        "od_size": SplitSpec(
            name="od_size", n_samples=200,
            shapes_per_image=(2, 4), occlusion_limit=(1, 3),
            rotation_set=TRAIN_ROTATIONS, size_scale=2,
            forbid_hashes_of=("train",),
        ),
    }


def sample_seed(base_seed: int, split_name: str, index: int, retry: int = 0) -> int:
    """Stable per-sample RNG seed, independent of generation order."""
    key = f"{base_seed}:{split_name}:{index}:{retry}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def _sample_shape(rng: random.Random, spec: SplitSpec, gen: GenerationConfig,
                  center_hint: Optional[tuple[int, int, int]] = None
                  ) -> ShapeInstance:
    """One shape with a canvas-fitting center.

    center_hint = (x, y, radius) biases the center into a window around
    (x, y); used to build overlap clusters.
    """
    kind = rng.choice(list(ShapeKind))
    color = rng.choice(list(ColorName))
    rotation = 0 if kind is ShapeKind.CIRCLE else rng.choice(
        sorted(spec.rotation_set))
    extents = tuple(
        rng.randint(lo, hi) for lo, hi in gen.extent_ranges[kind]
    )
    size = SizeSpec(extents=extents, scale=spec.size_scale)
    hx, hy = bbox_half_extents(kind, size.scaled, rotation)
    w, h = gen.canvas
    lo_x, hi_x = math.ceil(hx), w - 1 - math.ceil(hx)
    lo_y, hi_y = math.ceil(hy), h - 1 - math.ceil(hy)
    if lo_x > hi_x or lo_y > hi_y:
        raise RejectionBudgetExhausted(
            f"{kind.value} with extents {size.scaled} cannot fit the canvas"
        )
    if center_hint is not None:
        ax, ay, rad = center_hint
        lo_x, hi_x = max(lo_x, ax - rad), min(hi_x, ax + rad)
        lo_y, hi_y = max(lo_y, ay - rad), min(hi_y, ay + rad)
        if lo_x > hi_x or lo_y > hi_y:
            # Window fell off the canvas; fall back to the full range.
            lo_x, hi_x = math.ceil(hx), w - 1 - math.ceil(hx)
            lo_y, hi_y = math.ceil(hy), h - 1 - math.ceil(hy)
    center = (rng.randint(lo_x, hi_x), rng.randint(lo_y, hi_y))
    return ShapeInstance(kind=kind, color=color, center=center,
                         size=size, rotation_deg=rotation)


def _place_scene(rng: random.Random, spec: SplitSpec,
                 gen: GenerationConfig) -> Optional[list[ShapeInstance]]:
    """One placement proposal; None when the occlusion constraint fails."""
    occ_min, occ_max = spec.occlusion_limit
    lo = max(spec.shapes_per_image[0], occ_min if occ_min > 1 else 1)
    hi = spec.shapes_per_image[1]
    n = rng.randint(lo, hi)

    shapes: list[ShapeInstance] = []
    if occ_min > 1:
        # Seed a cluster of k mutually connected shapes, then place the rest.
        k = rng.randint(occ_min, min(occ_max, n))
        shapes.append(_sample_shape(rng, spec, gen))
        for _ in range(1, k):
            placed = False
            for _try in range(20):
                anchor = rng.choice(shapes)
                abox = bounding_box(anchor)
                rad = max(abox.width, abox.height)
                cand = _sample_shape(
                    rng, spec, gen,
                    center_hint=(anchor.center[0], anchor.center[1], rad),
                )
                cbox = bounding_box(cand)
                if any(relaxed_overlap(cbox, bounding_box(s),
                                       gen.relax_fraction) for s in shapes):
                    shapes.append(cand)
                    placed = True
                    break
            if not placed:
                return None
        for _ in range(n - k):
            shapes.append(_sample_shape(rng, spec, gen))
    else:
        for _ in range(n):
            shapes.append(_sample_shape(rng, spec, gen))

    comps = overlap_components(shapes, gen.relax_fraction)
    sizes = [len(c) for c in comps]
    if max(sizes) > occ_max:
        return None
    if occ_min > 1 and not any(occ_min <= s <= occ_max for s in sizes):
        return None
    return shapes


def sample_scene(rng: random.Random, spec: SplitSpec,
                 gen: GenerationConfig) -> SceneConfig:
    """Rejection-sample one scene satisfying the split's constraints.

    The whole placement is resampled on every constraint failure to avoid
    placement-order bias.
    """
    for _ in range(gen.max_rejections):
        shapes = _place_scene(rng, spec, gen)
        if shapes is not None:
            return SceneConfig.build(shapes, canvas=gen.canvas,
                                     relax_fraction=gen.relax_fraction)
    raise RejectionBudgetExhausted(
        f"no valid placement for split {spec.name!r} "
        f"within {gen.max_rejections} attempts"
    )


@dataclass(frozen=True)
class SceneRecord:
    """A generated scene plus the bookkeeping written to JSONL."""

    id: str
    split_name: str
    seed: int
    md5: str
    scene: SceneConfig


def _generate_candidate(args: tuple) -> tuple[int, int, SceneConfig]:
    spec, gen, index, retry = args
    seed = sample_seed(gen.base_seed, spec.name, index, retry)
    rng = random.Random(seed)
    return index, seed, sample_scene(rng, spec, gen)


def generate_split(spec: SplitSpec, gen: GenerationConfig,
                   forbidden: Iterable[str] = (), jobs: int = 1
                   ) -> list[SceneRecord]:
    """Exactly spec.n_samples scenes with pairwise-distinct MD5 digests.

    Digests also avoid `forbidden` (typically the train split's hashes).
    Deterministic for a fixed (base_seed, spec, gen) regardless of `jobs`.
    """
    seen = set(forbidden)
    candidates: dict[int, tuple[int, SceneConfig]] = {}
    tasks = [(spec, gen, i, 0) for i in range(spec.n_samples)]
    if jobs > 1 and spec.n_samples > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for index, seed, scene in pool.map(_generate_candidate, tasks,
                                               chunksize=64):
                candidates[index] = (seed, scene)
    else:
        for t in tasks:
            index, seed, scene = _generate_candidate(t)
            candidates[index] = (seed, scene)

    records: list[SceneRecord] = []
    for index in range(spec.n_samples):
        seed, scene = candidates[index]
        retry = 0
        digest = canonical_hash(scene)
        while digest in seen:
            retry += 1
            if retry > gen.max_rejections:
                raise RejectionBudgetExhausted(
                    f"could not deduplicate sample {index} of {spec.name!r}"
                )
            _, seed, scene = _generate_candidate((spec, gen, index, retry))
            digest = canonical_hash(scene)
        seen.add(digest)
        records.append(SceneRecord(
            id=f"{spec.name}-{index:06d}", split_name=spec.name,
            seed=seed, md5=digest, scene=scene,
        ))
    return records


def record_to_dict(rec: SceneRecord) -> dict:
    scene = rec.scene
    return {
        "id": rec.id,
        "md5": rec.md5,
        "canvas": {"width": scene.canvas[0], "height": scene.canvas[1]},
        "shapes": [
            {
                "kind": s.kind.value,
                "color": s.color.value,
                "center": list(s.center),
                "extents": list(s.size.scaled),
                "rotation_deg": s.rotation_deg,
            }
            for s in scene.shapes
        ],
        "occluded": list(scene.occluded),
        "quadrant": [q.value for q in scene.quadrants],
        "relative_position": list(scene.relative_positions),
        "split_name": rec.split_name,
        "seed": rec.seed,
    }


def scene_from_dict(obj: Mapping, relax_fraction: float = 0.05) -> SceneConfig:
    shapes = tuple(
        ShapeInstance(
            kind=ShapeKind(s["kind"]),
            color=ColorName(s["color"]),
            center=(int(s["center"][0]), int(s["center"][1])),
            size=SizeSpec(extents=tuple(int(e) for e in s["extents"])),
            rotation_deg=int(s["rotation_deg"]),
        )
        for s in obj["shapes"]
    )
    canvas = (int(obj["canvas"]["width"]), int(obj["canvas"]["height"]))
    return SceneConfig.build(shapes, canvas=canvas,
                             relax_fraction=relax_fraction)


def write_jsonl(records: Sequence[SceneRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), separators=(",", ":")))
            fh.write("\n")


def read_jsonl(path) -> list[dict]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: malformed JSON on line {lineno}") from exc
    return out
