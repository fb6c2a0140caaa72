"""Manifest ingestion and map/image file formats.

Manifest lines are JSON objects::

    {"id": "0001", "image": "img/0001.png", "width": 513, "height": 750,
     "elements": [{"category": "text", "box": [cx, cy, w, h]}, ...],
     "density": "dmap/0001.dmap", "saliency": "sal/0001.png", "split": "train"}

Only ``elements`` is required. Relative paths resolve against the manifest's
directory, then against ``$SCANPRINT_DATA_ROOT``. Records written by this
package also carry ``"xyxy": [x_l, y_t, x_r, y_b]`` per element; when present
it must agree with ``box`` and is used as the exact corners, so layouts
survive a write/read cycle bit for bit.

Density and saliency maps are either 8-bit grayscale PNGs (value / 255) or a
raw little-endian float32 grid behind a one-line ``DMAP <width> <height>``
header.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ManifestError
from .geometry import Canvas, cxcywh_to_xyxy, xyxy_to_cxcywh
from .layout import CategoryTable, Layout, PKU_CATEGORIES
from .vlr import VertexTensor

__all__ = [
    "DATA_ROOT_ENV", "DatasetRecord", "ingest_dataset", "parse_record", "layout_record",
    "vertex_record", "parse_vertex_record", "read_map", "write_dmap", "load_image",
    "save_png", "read_jsonl", "write_jsonl",
]

log = logging.getLogger(__name__)

DATA_ROOT_ENV = "SCANPRINT_DATA_ROOT"
SPLITS = ("train", "annotated-test", "unannotated-test")


@dataclass
class DatasetRecord:
    id: str
    canvas: Canvas
    layout: Layout
    image: Path | None = None
    density: Path | None = None
    saliency: Path | None = None
    split: str = "train"
    warnings: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def _resolve(value, base: Path | None) -> Path | None:
    if not value:
        return None
    path = Path(value)
    if path.is_absolute():
        return path
    candidates = []
    if base is not None:
        candidates.append(base / path)
    root = os.environ.get(DATA_ROOT_ENV)
    if root:
        candidates.append(Path(root) / path)
    for cand in candidates:
        if cand.exists():
            return cand
    return candidates[0] if candidates else path


def parse_record(
    obj: dict,
    table: CategoryTable = PKU_CATEGORIES,
    base: Path | None = None,
    line: int | None = None,
    default_canvas: Canvas = Canvas(),
) -> DatasetRecord:
    """Validate one manifest object; boxes are clamped to the canvas."""
    if not isinstance(obj, dict):
        raise ManifestError("record is not a JSON object", line)
    rid = str(obj.get("id", line if line is not None else ""))
    try:
        canvas = Canvas(int(obj.get("width", default_canvas.width)), int(obj.get("height", default_canvas.height)))
    except (TypeError, ValueError):
        raise ManifestError("width/height must be integers", line) from None
    if canvas.width <= 0 or canvas.height <= 0:
        raise ManifestError(f"non-positive canvas {canvas.width}x{canvas.height}", line)

    elements = obj.get("elements", [])
    if not isinstance(elements, list):
        raise ManifestError("'elements' must be a list", line)
    cats, boxes, exact_corners = [], [], []
    for k, el in enumerate(elements):
        try:
            name = el["category"]
            box = [float(v) for v in el["box"]]
            exact = [float(v) for v in el["xyxy"]] if "xyxy" in el else None
        except (KeyError, TypeError, ValueError):
            raise ManifestError(f"element {k} needs 'category' and a numeric 'box'", line) from None
        if len(box) != 4 or not np.all(np.isfinite(box)):
            raise ManifestError(f"element {k} box must be 4 finite numbers", line)
        if box[2] < 0 or box[3] < 0:
            raise ManifestError(f"element {k} has negative size", line)
        if exact is not None:
            # Written by this tool so corners survive a save/load cycle bit for bit.
            if len(exact) != 4 or not np.all(np.isfinite(exact)) or exact[2] < exact[0] or exact[3] < exact[1]:
                raise ManifestError(f"element {k} has malformed 'xyxy'", line)
            if not np.allclose(cxcywh_to_xyxy(box), exact, rtol=1e-9, atol=1e-6):
                raise ManifestError(f"element {k} 'xyxy' disagrees with 'box'", line)
            box = xyxy_to_cxcywh(exact).tolist()
            exact_corners.append(exact)
        else:
            exact_corners.append(None)
        try:
            cats.append(table.id_of(name))
        except KeyError:
            raise ManifestError(f"unknown category {name!r}", line) from None
        boxes.append(box)

    layout = Layout.from_cxcywh(cats, boxes)
    for k, exact in enumerate(exact_corners):
        if exact is not None:
            layout.corners[k] = exact
    warnings = []
    clamped = layout.clamp(canvas.width, canvas.height)
    moved = np.flatnonzero(np.any(clamped.corners != layout.corners, axis=1))
    for k in moved:
        warnings.append(f"element {k} clamped to canvas")
    split = str(obj.get("split", "train"))
    if split not in SPLITS:
        warnings.append(f"unrecognized split {split!r}")
    known = {"id", "width", "height", "elements", "image", "density", "saliency", "split"}
    return DatasetRecord(
        id=rid,
        canvas=canvas,
        layout=clamped,
        image=_resolve(obj.get("image"), base),
        density=_resolve(obj.get("density"), base),
        saliency=_resolve(obj.get("saliency"), base),
        split=split,
        warnings=warnings,
        extra={k: v for k, v in obj.items() if k not in known},
    )


def read_jsonl(path: Path):
    """Yield ``(line_number, object)``; blank lines and ``#`` comments are skipped."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            raw = raw.strip()
            if not raw or raw.startswith("#"):
                continue
            try:
                yield lineno, json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"invalid JSON ({exc.msg})", lineno) from None


def write_jsonl(path: Path, objs) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, sort_keys=True) + "\n")
            n += 1
    return n


def ingest_dataset(
    manifest: str | Path,
    table: CategoryTable = PKU_CATEGORIES,
    default_canvas: Canvas = Canvas(),
) -> list[DatasetRecord]:
    """Parse a JSONL manifest.

    Raises:
        OSError: if the manifest cannot be read.
        ManifestError: on the first malformed line (line number included).
    """
    manifest = Path(manifest)
    base = manifest.parent
    records = []
    for lineno, obj in read_jsonl(manifest):
        rec = parse_record(obj, table, base, lineno, default_canvas)
        for w in rec.warnings:
            log.warning("%s line %d: %s", manifest.name, lineno, w)
        records.append(rec)
    return records


def layout_record(
    rid: str,
    layout: Layout,
    canvas: Canvas,
    table: CategoryTable,
    **extra,
) -> dict:
    elements = [
        {"category": table.name_of(int(c)), "box": [float(v) for v in b], "xyxy": [float(v) for v in e]}
        for c, b, e in zip(layout.categories, xyxy_to_cxcywh(layout.corners) if len(layout) else [],
                           layout.corners)
    ]
    rec = {"id": rid, "width": canvas.width, "height": canvas.height, "elements": elements}
    rec.update({k: v for k, v in extra.items() if v is not None})
    return rec


def vertex_record(rid: str, v: VertexTensor, canvas: Canvas) -> dict:
    return {
        "id": rid,
        "width": canvas.width,
        "height": canvas.height,
        "vertices": [[c, x, y] for c, x, y in v.entries()],
    }


def parse_vertex_record(obj: dict, line: int | None = None) -> tuple[str, VertexTensor, Canvas]:
    try:
        verts = obj["vertices"]
        entries = [(int(c), float(x), float(y)) for c, x, y in verts]
        canvas = Canvas(int(obj.get("width", 224)), int(obj.get("height", 224)))
    except (KeyError, TypeError, ValueError):
        raise ManifestError("vertex record needs 'vertices' as [cat, x, y] triples", line) from None
    return str(obj.get("id", line)), VertexTensor.from_entries(entries), canvas


# -- maps and images ---------------------------------------------------------

def read_map(path: str | Path, size: tuple[int, int] | None = None) -> np.ndarray:
    """Load a density/saliency map as float64 ``(H, W)``; optionally resize to ``(W, H)``."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(5)
        if head == b"DMAP ":
            header = head + fh.readline()
            try:
                _, w, h = header.decode("ascii").split()
                w, h = int(w), int(h)
            except ValueError:
                raise ValueError(f"{path}: bad DMAP header {header!r}") from None
            data = np.frombuffer(fh.read(), dtype="<f4")
            if data.size != w * h:
                raise ValueError(f"{path}: expected {w * h} floats, found {data.size}")
            grid = data.reshape(h, w).astype(np.float64)
        else:
            fh.seek(0)
            with Image.open(fh) as im:
                grid = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
    if size is not None and grid.shape != (size[1], size[0]):
        im = Image.fromarray(grid.astype(np.float32), mode="F")
        grid = np.asarray(im.resize(size, Image.BILINEAR), dtype=np.float64)
    return grid


def write_dmap(path: str | Path, grid: np.ndarray) -> None:
    grid = np.asarray(grid, dtype="<f4")
    h, w = grid.shape
    with open(path, "wb") as fh:
        fh.write(f"DMAP {w} {h}\n".encode("ascii"))
        fh.write(grid.tobytes())


def load_image(path: str | Path, size: tuple[int, int] | None = None) -> np.ndarray:
    """RGB uint8 ``(H, W, 3)``, optionally resized to ``(W, H)``."""
    with Image.open(path) as im:
        im = im.convert("RGB")
        if size is not None and im.size != tuple(size):
            im = im.resize(tuple(size), Image.BILINEAR)
        return np.asarray(im, dtype=np.uint8)


def save_png(path: str | Path, image: np.ndarray) -> None:
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(path, format="PNG")
