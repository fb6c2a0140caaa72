"""Command-line entry point: ``scanprint <command> ...``.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import PRESETS, RunConfig, load_config_file
from .errors import ScanPrintError
from .geometry import Canvas
from .io import (
    ingest_dataset, layout_record, load_image, parse_vertex_record, read_jsonl, vertex_record,
    write_jsonl,
)
from .mixer import STRATEGIES, select_pairs
from .pipeline import augment_records, evaluate_records, read_patch_sets, scan_record
from .render import render_svg
from .vlr import decode_vlr, encode_vlr

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2

log = logging.getLogger("scanprint")


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    g = parent.add_argument_group("run configuration")
    g.add_argument("--config", type=Path, help="flat key = value config file")
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--p", type=int, help="patch grid size (default 14)")
    g.add_argument("--k", type=int, help="number of selected patches")
    g.add_argument("--alpha", type=int, help="augmented samples per batch")
    g.add_argument("--eps-u", dest="eps_u", type=float, help="underlay-in-underlay threshold")
    g.add_argument("--eps-n", dest="eps_n", type=float, help="element-in-underlay threshold")
    g.add_argument("--strategy", choices=STRATEGIES)
    g.add_argument("--seed", type=int)
    g.add_argument("--canvas", type=Canvas.parse, help="working canvas WxH (default 224x224)")
    g.add_argument("--batch-size", dest="batch_size", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("-v", "--verbose", action="store_true")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="scanprint", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vlr", parents=[common], help="layouts <-> vertex tensors (JSONL)")
    p.add_argument("direction", choices=["encode", "decode"])
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)

    p = sub.add_parser("scan", parents=[common], help="top-k patch sets per record")
    p.add_argument("manifest", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)

    p = sub.add_parser("pairs", parents=[common], help="mixup source pairs from patch sets")
    p.add_argument("patches", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)

    p = sub.add_parser("augment", parents=[common], help="synthesize mixed image-layout pairs")
    p.add_argument("manifest", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True, help="output directory")
    p.add_argument("--patches", type=Path, help="precomputed patch sets from `scan`")

    p = sub.add_parser("eval", parents=[common], help="layout metrics")
    p.add_argument("input", type=Path, help="manifest or generated layouts (JSONL)")
    p.add_argument("-o", "--output", type=Path, required=True, help="output directory")
    p.add_argument("--threshold", type=float, default=0.5, help="saliency threshold for uti")

    p = sub.add_parser("render", parents=[common], help="SVG per layout")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True, help="output directory")
    p.add_argument("--with-image", action="store_true", help="embed the background image")
    return parser


def _config(args) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}
    keys = ("preset", "p", "k", "alpha", "eps_u", "eps_n", "strategy", "seed", "canvas",
            "batch_size", "workers")
    return RunConfig.build(file_values, **{k: getattr(args, k) for k in keys})


def cmd_vlr(args, cfg: RunConfig) -> int:
    table = cfg.categories
    out, failed = [], 0
    if args.direction == "encode":
        for rec in ingest_dataset(args.input, table):
            v = encode_vlr(rec.layout, table.underlay_id, cfg.eps_u, cfg.eps_n)
            out.append(vertex_record(rec.id, v, rec.canvas))
    else:
        for lineno, obj in read_jsonl(args.input):
            try:
                rid, v, canvas = parse_vertex_record(obj, lineno)
                layout = decode_vlr(v)
                if len(layout) and layout.categories.max() >= len(table):
                    raise ScanPrintError("vertex category outside the category table")
            except ScanPrintError as exc:
                print(f"{args.input}:{lineno}: {exc}", file=sys.stderr)
                failed += 1
                continue
            out.append(layout_record(rid, layout, canvas, table))
    write_jsonl(args.output, out)
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_scan(args, cfg: RunConfig) -> int:
    out = []
    for rec in ingest_dataset(args.manifest, cfg.categories):
        s = scan_record(rec, cfg)
        out.append({"id": rec.id, "p": s.p, "k": s.k, "cells": [list(c) for c in s.cells]})
    write_jsonl(args.output, out)
    return EXIT_OK


def cmd_pairs(args, cfg: RunConfig) -> int:
    sets = read_patch_sets(args.patches)
    ids = list(sets)
    pairs = select_pairs([sets[i] for i in ids], cfg.strategy, cfg.alpha, cfg.seed)
    write_jsonl(args.output, (
        {"ordinal": n, "i": i, "j": j, "id_i": ids[i], "id_j": ids[j]} for n, (i, j) in enumerate(pairs)
    ))
    return EXIT_OK


def cmd_augment(args, cfg: RunConfig) -> int:
    records = ingest_dataset(args.manifest, cfg.categories)
    patches = read_patch_sets(args.patches) if args.patches else None
    stats = augment_records(records, cfg, args.output, patches)
    print(f"batches: {stats['batches']}  pairs: {stats['pairs']}  samples: {stats['samples']}")
    for reason, n in sorted(stats["skipped"].items()):
        print(f"skipped: {reason}: {n}")
    return EXIT_OK


def cmd_eval(args, cfg: RunConfig) -> int:
    records = ingest_dataset(args.input, cfg.categories)
    args.output.mkdir(parents=True, exist_ok=True)
    _, summary = evaluate_records(
        records, cfg, args.output / "metrics.csv", args.output / "summary.json", args.threshold
    )
    print(json.dumps({k: summary[k] for k in ("ove", "ali", "und_l", "und_s", "uti", "occ", "rea")}))
    return EXIT_OK


def cmd_render(args, cfg: RunConfig) -> int:
    args.output.mkdir(parents=True, exist_ok=True)
    for rec in ingest_dataset(args.input, cfg.categories):
        background = None
        if args.with_image and rec.image is not None:
            background = load_image(rec.image, (rec.canvas.width, rec.canvas.height))
        svg = render_svg(rec.layout, rec.canvas, cfg.categories, background)
        (args.output / f"{rec.id}.svg").write_text(svg, encoding="utf-8")
    return EXIT_OK


COMMANDS = {
    "vlr": cmd_vlr, "scan": cmd_scan, "pairs": cmd_pairs, "augment": cmd_augment,
    "eval": cmd_eval, "render": cmd_render,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except OSError as exc:
        print(f"scanprint: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ScanPrintError, ValueError, KeyError) as exc:
        print(f"scanprint: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
