"""SAMA, frequency precision/recall/F1, and RMSE-after-matching.

SAMA scores the five discrete attributes (shape, color, quadrant,
occlusion, relative position) over optimally matched shape pairs;
center coordinates and rotation angles go to RMSE instead. Frequency
precision/recall compares class-frequency vectors with an elementwise
minimum, ignoring the NA placeholder entirely.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .assign import Assignment
from .textio import NA, ParsedShape, normalize

DISCRETE_ATTRIBUTES = (
    "shape", "color", "quadrant", "occlusion", "relative_position",
)

_FIELD_OF = {
    "shape": "shape",
    "color": "color",
    "quadrant": "quadrant",
    "occlusion": "occluded",
    "relative_position": "relative_position",
}


class EmptyGroundTruth(ValueError):
    """Raised when a sample's ground truth contains no shapes."""


class NoMatchedPairs(ValueError):
    """Raised when RMSE has no usable matched pairs in a sample."""


def _attr_value(record: ParsedShape, attribute: str):
    value = getattr(record, _FIELD_OF[attribute])
    if value is NA:
        return NA
    if attribute == "relative_position":
        return normalize(value)
    return value


def _attr_equal(gt: ParsedShape, pred: ParsedShape, attribute: str) -> bool:
    a = _attr_value(gt, attribute)
    b = _attr_value(pred, attribute)
    if a is NA or b is NA:
        return False
    return a == b


def attribute_hits(gt: Sequence[ParsedShape], pred: Sequence[ParsedShape],
                   asg: Assignment) -> dict[str, int]:
    """Matched-pair equality counts per discrete attribute."""
    hits = {attr: 0 for attr in DISCRETE_ATTRIBUTES}
    for r, c in asg.pairs:
        for attr in DISCRETE_ATTRIBUTES:
            if _attr_equal(gt[r], pred[c], attr):
                hits[attr] += 1
    return hits


def sama_sample(gt: Sequence[ParsedShape], pred: Sequence[ParsedShape],
                asg: Assignment) -> float:
    """Per-sample SAMA: attribute equalities over |D| * len(gt).

    Unmatched ground-truth shapes contribute zero for every attribute.
    """
    if not gt:
        raise EmptyGroundTruth("ground truth must contain at least one shape")
    hits = attribute_hits(gt, pred, asg)
    return sum(hits.values()) / (len(DISCRETE_ATTRIBUTES) * len(gt))


@dataclass(frozen=True)
class SamaResult:
    per_sample_accuracy: tuple[float, ...]
    mean_accuracy: float
    per_attribute_accuracy: dict[str, float]


def sama_dataset(samples: Sequence[tuple[Sequence[ParsedShape],
                                         Sequence[ParsedShape],
                                         Assignment]]) -> SamaResult:
    """Dataset SAMA: arithmetic mean of per-sample scores."""
    if not samples:
        raise EmptyGroundTruth("need at least one sample")
    per_sample = []
    attr_sums = {attr: 0.0 for attr in DISCRETE_ATTRIBUTES}
    for gt, pred, asg in samples:
        per_sample.append(sama_sample(gt, pred, asg))
        hits = attribute_hits(gt, pred, asg)
        for attr in DISCRETE_ATTRIBUTES:
            attr_sums[attr] += hits[attr] / len(gt)
    n = len(samples)
    return SamaResult(
        per_sample_accuracy=tuple(per_sample),
        mean_accuracy=sum(per_sample) / n,
        per_attribute_accuracy={a: attr_sums[a] / n for a in DISCRETE_ATTRIBUTES},
    )


@dataclass(frozen=True)
class FreqPRF:
    precision: float
    recall: float
    f1: float
    total_correct: int
    true_total: int
    pred_total: int


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def freq_pr(gt_values: Sequence, pred_values: Sequence,
            classes: Optional[Sequence] = None) -> FreqPRF:
    """Frequency-overlap precision/recall; NA never enters the totals."""
    def keep(v):
        return v is not NA and (classes is None or v in classes)

    gt_counts = Counter(v for v in gt_values if keep(v))
    pred_counts = Counter(v for v in pred_values if keep(v))
    correct = sum(
        min(gt_counts[c], pred_counts[c]) for c in gt_counts if c in pred_counts
    )
    true_total = sum(gt_counts.values())
    pred_total = sum(pred_counts.values())
    precision = correct / pred_total if pred_total > 0 else 0.0
    recall = correct / true_total if true_total > 0 else 0.0
    return FreqPRF(
        precision=precision, recall=recall, f1=_f1(precision, recall),
        total_correct=correct, true_total=true_total, pred_total=pred_total,
    )


@dataclass(frozen=True)
class RmseResult:
    center_rmse: Optional[float]
    rotation_rmse: Optional[float]
    matched_pairs: int


def rmse_matched(gt: Sequence[ParsedShape], pred: Sequence[ParsedShape],
                 asg: Assignment, attribute: str) -> tuple[float, int]:
    """Per-sample RMSE over matched pairs for 'center' or 'rotation'.

    Pairs whose predicted value is NA are skipped; the count of skipped
    pairs is returned alongside. Rotation residuals use raw degree
    labels, no angular wrap-around. Raises NoMatchedPairs when nothing
    usable remains.
    """
    if attribute not in ("center", "rotation"):
        raise ValueError(f"unknown RMSE attribute {attribute!r}")
    sq_residuals = []
    skipped = 0
    for r, c in asg.pairs:
        if attribute == "center":
            g, p = gt[r].center, pred[c].center
            if g is NA:
                raise ValueError("ground-truth center must be concrete")
            if p is NA:
                skipped += 1
                continue
            sq_residuals.append((g[0] - p[0]) ** 2 + (g[1] - p[1]) ** 2)
        else:
            g, p = gt[r].rotation_deg, pred[c].rotation_deg
            if g is NA:
                raise ValueError("ground-truth rotation must be concrete")
            if p is NA:
                skipped += 1
                continue
            sq_residuals.append((g - p) ** 2)
    if not sq_residuals:
        raise NoMatchedPairs(f"no usable pairs for {attribute} RMSE")
    return math.sqrt(sum(sq_residuals) / len(sq_residuals)), skipped


def count_rmse(gt_counts: Sequence[int], pred_counts: Sequence[int]) -> float:
    """RMSE between two equal-length count lists."""
    if len(gt_counts) != len(pred_counts):
        raise ValueError("count lists must have equal length")
    if not gt_counts:
        raise ValueError("count lists must be non-empty")
    return math.sqrt(
        sum((g - p) ** 2 for g, p in zip(gt_counts, pred_counts))
        / len(gt_counts)
    )
