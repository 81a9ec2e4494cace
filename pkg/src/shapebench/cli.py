"""Command-line entry point: generate, render, serialize, evaluate, mask.

All randomness flows from --seed; nothing reads the clock or OS entropy,
so repeated runs with the same flags produce byte-identical outputs.
Exit codes: 0 on success, 2 on usage/IO/validation errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import genset, render, report as report_mod
from .genset import (
    GenerationConfig,
    RejectionBudgetExhausted,
    builtin_split_specs,
    read_jsonl,
    scene_from_dict,
)
from .lossmask import NumericTokenSpec, numeric_weight_mask
from .textio import OutputFormat, serialize_scene

SPLIT_ORDER = ("train", "eval", "od_composition", "od_spatial",
               "od_occlusion", "od_rotation", "od_size")


class CliError(Exception):
    pass


def _file_md5(path) -> str:
    digest = hashlib.md5()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _parse_splits(arg: str) -> list[str]:
    if arg == "all":
        return list(SPLIT_ORDER)
    names = [s.strip() for s in arg.split(",") if s.strip()]
    unknown = [n for n in names if n not in SPLIT_ORDER]
    if unknown:
        raise CliError(f"unknown split(s): {', '.join(unknown)}")
    return sorted(set(names), key=SPLIT_ORDER.index)


def _parse_formats(arg: str) -> list[OutputFormat]:
    if arg == "both":
        return [OutputFormat.SENTENCE, OutputFormat.TUPLE]
    return [OutputFormat(arg)]


def cmd_generate(args) -> int:
    splits = _parse_splits(args.splits)
    gen = GenerationConfig(base_seed=args.seed, relax_fraction=args.relax)
    specs = builtin_split_specs()
    os.makedirs(args.out, exist_ok=True)

    hashes_by_split: dict[str, set[str]] = {}
    manifest: dict = {
        "seed": args.seed,
        "relax_fraction": args.relax,
        "limit": args.limit,
        "splits": {},
    }
    for name in splits:
        spec = specs[name]
        if args.limit is not None:
            spec = replace(spec, n_samples=min(spec.n_samples, args.limit))
        forbidden: set[str] = set()
        for ref in spec.forbid_hashes_of:
            if ref in hashes_by_split:
                forbidden |= hashes_by_split[ref]
            else:
                print(f"warning: split {name!r} excludes hashes of {ref!r}, "
                      f"which was not generated in this run", file=sys.stderr)
        records = genset.generate_split(spec, gen, forbidden=forbidden,
                                        jobs=args.jobs)
        hashes_by_split[name] = {r.md5 for r in records}
        path = os.path.join(args.out, f"{name}.jsonl")
        genset.write_jsonl(records, path)
        manifest["splits"][name] = {
            "file": f"{name}.jsonl",
            "n_samples": len(records),
            "md5": _file_md5(path),
            "spec": {
                "shapes_per_image": list(spec.shapes_per_image),
                "occlusion_limit": list(spec.occlusion_limit),
                "rotation_set": sorted(spec.rotation_set),
                "size_scale": spec.size_scale,
                "forbid_hashes_of": list(spec.forbid_hashes_of),
            },
        }
        print(f"generated {len(records)} scenes -> {path}")

    manifest_path = os.path.join(args.out, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {manifest_path}")
    return 0


def _render_one(task) -> str:
    obj, out_dir, relax = task
    scene = scene_from_dict(obj, relax_fraction=relax)
    path = os.path.join(out_dir, f"{obj['id']}.png")
    render.write_png(render.rasterize(scene), path)
    return path


def cmd_render(args) -> int:
    splits = _parse_splits(args.splits)
    for name in splits:
        src = os.path.join(args.out, f"{name}.jsonl")
        if not os.path.exists(src):
            raise CliError(f"missing input file {src}")
        objs = read_jsonl(src)
        out_dir = os.path.join(args.out, name)
        os.makedirs(out_dir, exist_ok=True)
        tasks = [(obj, out_dir, args.relax) for obj in objs]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                list(pool.map(_render_one, tasks, chunksize=16))
        else:
            for t in tasks:
                _render_one(t)
        print(f"rendered {len(objs)} images -> {out_dir}/")
    return 0


def cmd_serialize(args) -> int:
    splits = _parse_splits(args.splits)
    formats = _parse_formats(args.format)
    for name in splits:
        src = os.path.join(args.out, f"{name}.jsonl")
        if not os.path.exists(src):
            raise CliError(f"missing input file {src}")
        objs = read_jsonl(src)
        for fmt in formats:
            path = os.path.join(args.out, f"{name}.{fmt.value}.jsonl")
            with open(path, "w", encoding="utf-8") as fh:
                for obj in objs:
                    scene = scene_from_dict(obj, relax_fraction=args.relax)
                    line = {"id": obj["id"],
                            "target": serialize_scene(scene, fmt)}
                    fh.write(json.dumps(line, separators=(",", ":")))
                    fh.write("\n")
            print(f"serialized {len(objs)} targets -> {path}")
    return 0


def cmd_evaluate(args) -> int:
    if not os.path.exists(args.gt):
        raise CliError(f"missing ground-truth file {args.gt}")
    if not os.path.exists(args.pred):
        raise CliError(f"missing predictions file {args.pred}")
    split_name = os.path.splitext(os.path.basename(args.gt))[0]

    if args.mode == "shapes":
        fmt = OutputFormat(args.format)
        scenes = {}
        for obj in read_jsonl(args.gt):
            scenes[obj["id"]] = scene_from_dict(obj, relax_fraction=args.relax)
        predictions = {}
        for obj in read_jsonl(args.pred):
            predictions[obj["id"]] = obj.get("prediction", "")
        result = report_mod.evaluate_shapes(scenes, predictions, fmt,
                                            split_name=split_name)
    else:
        gt = {obj["id"]: obj for obj in read_jsonl(args.gt)}
        predictions = {obj["id"]: obj for obj in read_jsonl(args.pred)}
        result = report_mod.evaluate_count_center(gt, predictions,
                                                  split_name=split_name)

    if result.get("n_unknown_prediction_ids"):
        print(f"warning: skipped {result['n_unknown_prediction_ids']} "
              f"prediction id(s) not present in the ground truth",
              file=sys.stderr)
    written = report_mod.write_report(result, args.out,
                                      figures=not args.no_figures)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_mask(args) -> int:
    if not os.path.exists(args.tokens):
        raise CliError(f"missing tokens file {args.tokens}")
    if args.tokens_file:
        with open(args.tokens_file, "r", encoding="utf-8") as fh:
            spec = NumericTokenSpec.explicit(
                line.strip() for line in fh if line.strip()
            )
    else:
        try:
            lo, hi = (int(x) for x in args.range.split(":"))
        except ValueError as exc:
            raise CliError(f"bad --range {args.range!r}, expected MIN:MAX") from exc
        spec = NumericTokenSpec.value_range(lo, hi)

    out_path = args.out or f"{args.tokens}.weights.jsonl"
    with open(args.tokens, "r", encoding="utf-8") as src, \
            open(out_path, "w", encoding="utf-8") as dst:
        for lineno, line in enumerate(src, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("["):
                try:
                    tokens = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CliError(
                        f"{args.tokens}: malformed JSON on line {lineno}"
                    ) from exc
                if not isinstance(tokens, list):
                    raise CliError(
                        f"{args.tokens}: line {lineno} is not a token array"
                    )
                tokens = [str(t) for t in tokens]
            else:
                tokens = line.split()
            mask = numeric_weight_mask(tokens, spec, args.scale)
            dst.write(json.dumps(list(mask.weights)))
            dst.write("\n")
    print(f"wrote {out_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapebench",
        description="Synthetic 2D shape benchmark generator and evaluator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate scene JSONL per split")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="data")
    gen.add_argument("--splits", default="all",
                     help="comma list of splits, or 'all'")
    gen.add_argument("--relax", type=float, default=0.05,
                     help="bounding-box relaxation fraction per side")
    gen.add_argument("--limit", type=int, default=None,
                     help="cap samples per split (smoke runs)")
    gen.add_argument("--jobs", type=int, default=1)
    gen.set_defaults(func=cmd_generate)

    ren = sub.add_parser("render", help="rasterize scenes to PNG")
    ren.add_argument("--out", default="data",
                     help="directory holding <split>.jsonl; PNGs go to "
                          "<out>/<split>/<id>.png")
    ren.add_argument("--splits", default="all")
    ren.add_argument("--relax", type=float, default=0.05)
    ren.add_argument("--jobs", type=int, default=1)
    ren.set_defaults(func=cmd_render)

    ser = sub.add_parser("serialize", help="write ground-truth target text")
    ser.add_argument("--out", default="data")
    ser.add_argument("--splits", default="all")
    ser.add_argument("--format", choices=["sentence", "tuple", "both"],
                     default="both")
    ser.add_argument("--relax", type=float, default=0.05)
    ser.set_defaults(func=cmd_serialize)

    ev = sub.add_parser("evaluate", help="score a predictions file")
    ev.add_argument("--gt", required=True, help="ground-truth JSONL")
    ev.add_argument("--pred", required=True, help="predictions JSONL")
    ev.add_argument("--out", default="report")
    ev.add_argument("--format", choices=["sentence", "tuple"],
                    default="sentence")
    ev.add_argument("--mode", choices=["shapes", "count_center"],
                    default="shapes")
    ev.add_argument("--relax", type=float, default=0.05)
    ev.add_argument("--no-figures", action="store_true",
                    help="skip figure rendering")
    ev.set_defaults(func=cmd_evaluate)

    msk = sub.add_parser("mask", help="numeric-token loss-weight masks")
    msk.add_argument("tokens", help="token sequences, one per line "
                                    "(whitespace or JSON array)")
    msk.add_argument("--scale", type=float, default=2.0)
    msk.add_argument("--range", default="1:1000",
                     help="inclusive numeric value range MIN:MAX")
    msk.add_argument("--tokens-file", default=None,
                     help="explicit numeric-token set, one per line")
    msk.add_argument("--out", default=None)
    msk.set_defaults(func=cmd_mask)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, RejectionBudgetExhausted, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
