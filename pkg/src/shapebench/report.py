"""Evaluation pipelines and report output (JSON, CSV, figures)."""

from __future__ import annotations

import csv
import json
import os
from typing import Mapping, Optional, Sequence

from .assign import match_by_edit_distance, match_by_euclidean
from .metrics import (
    DISCRETE_ATTRIBUTES,
    NoMatchedPairs,
    freq_pr,
    rmse_matched,
    sama_dataset,
)
from .scene import SceneConfig
from .textio import OutputFormat, parse_shape, scene_records, serialize_shape, split_segments
from .metrics import _attr_value  # shared attribute access, NA-aware


def evaluate_shapes(scenes: Mapping[str, SceneConfig],
                    predictions: Mapping[str, str],
                    fmt: OutputFormat,
                    split_name: Optional[str] = None) -> dict:
    """Score raw prediction texts against ground-truth scenes.

    Ground-truth ids with no prediction line count as empty predictions;
    prediction ids absent from the ground truth are skipped and reported.
    """
    unknown_ids = sorted(set(predictions) - set(scenes))

    samples = []
    per_attr_values: dict[str, tuple[list, list]] = {
        a: ([], []) for a in DISCRETE_ATTRIBUTES
    }
    macro_prf: dict[str, list] = {a: [] for a in DISCRETE_ATTRIBUTES}
    center_rmses: list[float] = []
    rotation_rmses: list[float] = []
    matched_pairs = 0
    malformed_segments = 0
    samples_without_segments = 0
    rmse_skipped_samples = 0
    na_skipped_pairs = 0

    for sid, scene in scenes.items():
        gt = scene_records(scene)
        gt_segments = [
            serialize_shape(scene, i, fmt) for i in range(len(scene.shapes))
        ]
        text = predictions.get(sid, "")
        segments = split_segments(text, fmt) if text.strip() else []
        preds = [parse_shape(s, fmt) for s in segments]
        malformed_segments += sum(1 for p in preds if p.malformed)
        if not preds:
            samples_without_segments += 1
        asg = match_by_edit_distance(gt_segments, segments)
        samples.append((gt, preds, asg))
        matched_pairs += len(asg.pairs)

        for attr in DISCRETE_ATTRIBUTES:
            gvals = [_attr_value(r, attr) for r in gt]
            pvals = [_attr_value(p, attr) for p in preds]
            per_attr_values[attr][0].extend(gvals)
            per_attr_values[attr][1].extend(pvals)
            macro_prf[attr].append(freq_pr(gvals, pvals))

        for attr, sink in (("center", center_rmses),
                           ("rotation", rotation_rmses)):
            try:
                value, skipped = rmse_matched(gt, preds, asg, attr)
                sink.append(value)
                na_skipped_pairs += skipped
            except NoMatchedPairs:
                rmse_skipped_samples += 1

    sama = sama_dataset(samples)

    prf_report = {}
    for attr in DISCRETE_ATTRIBUTES:
        per_sample = macro_prf[attr]
        n = len(per_sample)
        micro = freq_pr(*per_attr_values[attr])
        prf_report[attr] = {
            "macro": {
                "precision": sum(x.precision for x in per_sample) / n,
                "recall": sum(x.recall for x in per_sample) / n,
                "f1": sum(x.f1 for x in per_sample) / n,
            },
            "micro": {
                "precision": micro.precision,
                "recall": micro.recall,
                "f1": micro.f1,
                "total_correct": micro.total_correct,
                "true_total": micro.true_total,
                "pred_total": micro.pred_total,
            },
        }

    def mean_or_none(values):
        return sum(values) / len(values) if values else None

    return {
        "mode": "shapes",
        "split_name": split_name,
        "format": fmt.value,
        "n_samples": len(scenes),
        "unknown_prediction_ids": unknown_ids,
        "n_unknown_prediction_ids": len(unknown_ids),
        "parse_failures": {
            "malformed_segments": malformed_segments,
            "samples_without_segments": samples_without_segments,
        },
        "sama": {
            "mean_accuracy": sama.mean_accuracy,
            "per_attribute": sama.per_attribute_accuracy,
        },
        "prf": prf_report,
        "center_rmse": mean_or_none(center_rmses),
        "rotation_rmse": mean_or_none(rotation_rmses),
        "matched_pairs": matched_pairs,
        "rmse_skipped_samples": rmse_skipped_samples,
        "rmse_na_skipped_pairs": na_skipped_pairs,
    }


def evaluate_count_center(gt: Mapping[str, dict],
                          predictions: Mapping[str, dict],
                          split_name: Optional[str] = None) -> dict:
    """Count RMSE plus center RMSE after Euclidean matching.

    Each annotation is {"count": int, "centers": [[x, y], ...]}. Missing
    prediction ids count as empty annotations.
    """
    unknown_ids = sorted(set(predictions) - set(gt))

    gt_counts = []
    pred_counts = []
    center_rmses = []
    matched_pairs = 0
    rmse_skipped_samples = 0
    for sid, ann in gt.items():
        pred = predictions.get(sid, {"count": 0, "centers": []})
        gt_counts.append(int(ann["count"]))
        pred_counts.append(int(pred.get("count", 0)))
        gt_centers = [tuple(c) for c in ann.get("centers", [])]
        pred_centers = [tuple(c) for c in pred.get("centers", [])]
        asg = match_by_euclidean(gt_centers, pred_centers)
        matched_pairs += len(asg.pairs)
        if asg.pairs:
            sq = [
                (gt_centers[r][0] - pred_centers[c][0]) ** 2
                + (gt_centers[r][1] - pred_centers[c][1]) ** 2
                for r, c in asg.pairs
            ]
            center_rmses.append((sum(sq) / len(sq)) ** 0.5)
        else:
            rmse_skipped_samples += 1

    from .metrics import count_rmse

    return {
        "mode": "count_center",
        "split_name": split_name,
        "n_samples": len(gt),
        "unknown_prediction_ids": unknown_ids,
        "n_unknown_prediction_ids": len(unknown_ids),
        "count_rmse": count_rmse(gt_counts, pred_counts) if gt_counts else None,
        "center_rmse": (sum(center_rmses) / len(center_rmses)
                        if center_rmses else None),
        "matched_pairs": matched_pairs,
        "rmse_skipped_samples": rmse_skipped_samples,
    }


def _flatten_report(obj, prefix="") -> list[tuple[str, object]]:
    rows = []
    if isinstance(obj, dict):
        for key, value in obj.items():
            rows.extend(_flatten_report(value, f"{prefix}{key}."))
    elif isinstance(obj, (list, tuple)):
        rows.append((prefix.rstrip("."), json.dumps(obj)))
    else:
        rows.append((prefix.rstrip("."), obj))
    return rows


def write_report(report: dict, out_dir, figures: bool = True) -> list[str]:
    """Write report.json, report.csv, and figure PNGs; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    json_path = os.path.join(out_dir, "report.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    written.append(json_path)

    csv_path = os.path.join(out_dir, "report.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for key, value in _flatten_report(report):
            writer.writerow([key, value])
    written.append(csv_path)

    if figures:
        written.extend(_write_figures(report, out_dir))
    return written


def _write_figures(report: dict, out_dir) -> list[str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    if report["mode"] == "shapes":
        attrs = list(DISCRETE_ATTRIBUTES)
        x = range(len(attrs))
        width = 0.25

        fig, ax = plt.subplots(figsize=(8, 4))
        for offset, metric in zip((-width, 0.0, width),
                                  ("precision", "recall", "f1")):
            vals = [report["prf"][a]["macro"][metric] for a in attrs]
            ax.bar([i + offset for i in x], vals, width, label=metric)
        ax.set_xticks(list(x))
        ax.set_xticklabels(attrs, rotation=20, ha="right")
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("score")
        ax.set_title("Per-attribute precision / recall / F1 (macro)")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, "attribute_prf.png")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

        fig, ax = plt.subplots(figsize=(8, 4))
        vals = [report["sama"]["per_attribute"][a] for a in attrs]
        ax.bar(list(x), vals, color="tab:blue")
        ax.axhline(report["sama"]["mean_accuracy"], color="tab:red",
                   linestyle="--", label="overall SAMA")
        ax.set_xticks(list(x))
        ax.set_xticklabels(attrs, rotation=20, ha="right")
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("accuracy")
        ax.set_title("Per-attribute matching accuracy")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, "sama_per_attribute.png")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    else:
        fig, ax = plt.subplots(figsize=(5, 4))
        labels = ["count_rmse", "center_rmse"]
        vals = [report.get("count_rmse") or 0.0, report.get("center_rmse") or 0.0]
        ax.bar(labels, vals, color=["tab:blue", "tab:orange"])
        ax.set_ylabel("RMSE")
        ax.set_title("Count and center RMSE")
        fig.tight_layout()
        path = os.path.join(out_dir, "rmse_summary.png")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
