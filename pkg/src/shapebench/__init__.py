"""Synthetic 2D shape benchmark generator and evaluation harness."""

from .assign import (
    Assignment,
    edit_distance,
    match_by_edit_distance,
    match_by_euclidean,
    solve_lap_jv,
)
from .genset import (
    GenerationConfig,
    RejectionBudgetExhausted,
    SplitSpec,
    builtin_split_specs,
    generate_split,
    sample_scene,
)
from .lossmask import NumericTokenSpec, WeightMask, numeric_weight_mask
from .metrics import (
    EmptyGroundTruth,
    FreqPRF,
    NoMatchedPairs,
    RmseResult,
    SamaResult,
    count_rmse,
    freq_pr,
    rmse_matched,
    sama_dataset,
    sama_sample,
)
from .render import RgbImage, color_value, rasterize, write_png
from .scene import (
    AABB,
    ColorName,
    QuadrantLabel,
    SceneConfig,
    ShapeInstance,
    ShapeKind,
    SizeSpec,
    bounding_box,
    canonical_hash,
    occlusion_flags,
    quadrant,
    relaxed_overlap,
)
from .textio import (
    NA,
    OutputFormat,
    ParsedShape,
    normalize,
    parse_shape,
    serialize_scene,
    split_segments,
)

__version__ = "0.1.0"
