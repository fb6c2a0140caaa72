"""Dataset-level orchestration behind the command line."""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import RunConfig
from .io import DatasetRecord, layout_record, load_image, read_jsonl, read_map, save_png, write_jsonl
from .metrics import MetricReport, aggregate, dumps_summary, evaluate_layout
from .mixer import Sample, derive_seed, print_augment
from .scan import PatchIndexSet, heuristic_density, pool_patch_scores, select_topk

__all__ = [
    "PARTIAL_MARKER", "scan_record", "load_sample", "augment_records",
    "evaluate_records", "read_patch_sets",
]

log = logging.getLogger(__name__)

PARTIAL_MARKER = "PARTIAL"


def _working_size(cfg: RunConfig) -> tuple[int, int]:
    return cfg.canvas.width, cfg.canvas.height


def scan_record(rec: DatasetRecord, cfg: RunConfig, image: np.ndarray | None = None) -> PatchIndexSet:
    """Top-k patches from the record's density map, else from the image heuristic."""
    size = _working_size(cfg)
    if rec.density is not None:
        density = read_map(rec.density, size)
    else:
        if image is None:
            if rec.image is None:
                raise ValueError(f"record {rec.id}: needs an image or a density map to scan")
            image = load_image(rec.image, size)
        density = heuristic_density(image)
    return select_topk(pool_patch_scores(density, cfg.p), cfg.k)


def load_sample(rec: DatasetRecord, cfg: RunConfig, patch_set: PatchIndexSet | None = None) -> Sample:
    """Image resized to the working canvas, layout scaled to match."""
    if rec.image is None:
        raise ValueError(f"record {rec.id}: augmentation needs an image")
    image = load_image(rec.image, _working_size(cfg))
    sx = cfg.canvas.width / rec.canvas.width
    sy = cfg.canvas.height / rec.canvas.height
    layout = rec.layout.scaled(sx, sy).clamp(cfg.canvas.width, cfg.canvas.height)
    if patch_set is None:
        patch_set = scan_record(rec, cfg, image)
    return Sample(image, layout, patch_set, underlay=cfg.categories.underlay_id,
                  eps_u=cfg.eps_u, eps_n=cfg.eps_n)


def read_patch_sets(path: str | Path) -> dict[str, PatchIndexSet]:
    out = {}
    for _, obj in read_jsonl(Path(path)):
        out[str(obj["id"])] = PatchIndexSet(int(obj["p"]), tuple(tuple(c) for c in obj["cells"]))
    return out


def augment_records(
    records: Sequence[DatasetRecord],
    cfg: RunConfig,
    out_dir: str | Path,
    patch_sets: dict[str, PatchIndexSet] | None = None,
) -> dict:
    """Run the print procedure batch by batch and write PNGs plus ``layouts.jsonl``.

    Batches follow manifest order. Batch ``b`` is seeded with
    ``derive_seed(cfg.seed, b)``. On an I/O failure a ``PARTIAL`` marker is
    written before the error propagates.
    """
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    marker = out_dir / PARTIAL_MARKER
    if marker.exists():
        marker.unlink()
    stats = {"batches": 0, "pairs": 0, "samples": 0, "skipped": {}, "source_records": len(records)}
    out_records = []
    try:
        for b, start in enumerate(range(0, len(records), cfg.batch_size)):
            chunk = records[start:start + cfg.batch_size]
            if len(chunk) < 2:
                stats["skipped"]["batch smaller than 2"] = stats["skipped"].get("batch smaller than 2", 0) + 1
                continue
            batch = [load_sample(r, cfg, (patch_sets or {}).get(r.id)) for r in chunk]
            seed = derive_seed(cfg.seed, b)
            result = print_augment(batch, cfg.strategy, cfg.alpha, seed, cfg.workers)
            stats["batches"] += 1
            stats["pairs"] += len(result.samples) + len(result.skipped)
            for reason, n in result.skip_reasons.items():
                stats["skipped"][reason] = stats["skipped"].get(reason, 0) + n
            for s in result.samples:
                rid = f"b{b:04d}_{s.ordinal:04d}"
                save_png(out_dir / "images" / f"{rid}.png", s.image)
                prov = s.provenance()
                prov.update(batch=b, source_i_id=chunk[s.source_i].id, source_j_id=chunk[s.source_j].id)
                out_records.append(layout_record(
                    rid, s.layout, cfg.canvas, cfg.categories,
                    image=f"images/{rid}.png", split="train", provenance=prov,
                ))
            stats["samples"] += len(result.samples)
        write_jsonl(out_dir / "layouts.jsonl", out_records)
        (out_dir / "stats.json").write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        marker.write_text(f"aborted: {exc}\n")
        raise
    return stats


def evaluate_records(
    records: Sequence[DatasetRecord],
    cfg: RunConfig,
    csv_path: str | Path | None = None,
    json_path: str | Path | None = None,
    threshold: float = 0.5,
) -> tuple[list[MetricReport], dict]:
    """Per-record metrics at each record's own canvas resolution."""
    reports = []
    for rec in records:
        size = (rec.canvas.width, rec.canvas.height)
        saliency = read_map(rec.saliency, size) if rec.saliency is not None else None
        image = load_image(rec.image, size) if rec.image is not None and rec.image.exists() else None
        reports.append(evaluate_layout(
            rec.layout, rec.canvas, saliency, image,
            underlay=cfg.categories.underlay_id, text=cfg.categories.text_id, threshold=threshold,
        ))
    summary = aggregate(reports)
    if csv_path is not None:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", *MetricReport.columns()])
            for rec, rep in zip(records, reports):
                row = rep.to_dict()
                writer.writerow([rec.id, *("" if isinstance(v, float) and math.isnan(v) else v
                                           for v in row.values())])
    if json_path is not None:
        Path(json_path).write_text(dumps_summary(summary) + "\n")
    return reports, summary
