"""Random posters and layouts for tests, demos and benchmarks."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import Canvas
from .io import layout_record, save_png, write_dmap, write_jsonl
from .layout import CategoryTable, Layout, PKU_CATEGORIES
from .scan import PatchIndexSet

__all__ = ["random_layout", "random_poster", "random_patch_set", "make_dataset"]


def _rand_box(rng, x0, y0, x1, y1, min_frac=0.15, max_frac=0.9):
    w = (x1 - x0) * rng.uniform(min_frac, max_frac)
    h = (y1 - y0) * rng.uniform(min_frac, max_frac)
    left = rng.uniform(x0, x1 - w)
    top = rng.uniform(y0, y1 - h)
    return [left, top, left + w, top + h]


def random_layout(
    rng: np.random.Generator,
    canvas: Canvas = Canvas(),
    table: CategoryTable = PKU_CATEGORIES,
    max_elements: int = 20,
    max_depth: int = 3,
    integer: bool = False,
) -> Layout:
    """A layout of up to ``max_elements`` boxes with underlays nested up to ``max_depth``.

    Underlay groups are built top-down: each underlay gets a few children
    placed inside it, some of which may be underlays themselves.
    """
    und = table.underlay_id
    plain = [c for c in range(len(table)) if c != und]
    target = int(rng.integers(0, max_elements + 1))
    cats: list[int] = []
    boxes: list[list[float]] = []

    def grow(bounds, depth):
        if len(cats) >= target:
            return
        if depth < max_depth and rng.random() < 0.4:
            box = _rand_box(rng, *bounds, min_frac=0.3)
            cats.append(und)
            boxes.append(box)
            for _ in range(int(rng.integers(1, 4))):
                grow(box, depth + 1)
        else:
            cats.append(int(rng.choice(plain)))
            boxes.append(_rand_box(rng, *bounds, min_frac=0.05, max_frac=0.6))

    while len(cats) < target:
        grow((0.0, 0.0, float(canvas.width), float(canvas.height)), 0)
    cats, boxes = cats[:target], boxes[:target]
    corners = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    if integer:
        corners = np.round(corners)
        corners[:, 2] = np.maximum(corners[:, 2], corners[:, 0] + 1)
        corners[:, 3] = np.maximum(corners[:, 3], corners[:, 1] + 1)
    perm = rng.permutation(len(cats))
    return Layout(np.asarray(cats, dtype=np.int64)[perm], corners[perm])


def random_poster(rng: np.random.Generator, canvas: Canvas = Canvas()) -> np.ndarray:
    """RGB uint8 image: a smooth gradient background with a few textured blobs."""
    h, w = canvas.height, canvas.width
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    base = rng.uniform(40, 215, size=3)
    slope = rng.uniform(-40, 40, size=(2, 3))
    img = base + (xx / w)[..., None] * slope[0] + (yy / h)[..., None] * slope[1]
    for _ in range(int(rng.integers(1, 4))):
        cx, cy = rng.uniform(0, w), rng.uniform(0, h)
        rx, ry = rng.uniform(w * 0.08, w * 0.3), rng.uniform(h * 0.08, h * 0.3)
        inside = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1
        texture = rng.uniform(0, 255, size=(h, w, 3))
        img[inside] = 0.5 * img[inside] + 0.5 * texture[inside]
    return np.clip(img, 0, 255).astype(np.uint8)


def random_patch_set(rng: np.random.Generator, p: int = 14, k: int = 96) -> PatchIndexSet:
    flat = rng.choice(p * p, size=k, replace=False)
    ys, xs = np.divmod(flat, p)
    return PatchIndexSet(p, tuple(zip(xs.tolist(), ys.tolist())))


def make_dataset(
    root: str | Path,
    n: int,
    seed: int = 0,
    canvas: Canvas = Canvas(),
    table: CategoryTable = PKU_CATEGORIES,
    max_elements: int = 8,
    with_density: bool = False,
    with_saliency: bool = False,
) -> Path:
    """Write ``n`` synthetic posters plus ``manifest.jsonl`` under ``root``."""
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    records = []
    for idx in range(n):
        rid = f"{idx:05d}"
        image = random_poster(rng, canvas)
        layout = random_layout(rng, canvas, table, max_elements=max_elements, max_depth=2)
        save_png(root / "images" / f"{rid}.png", image)
        extra = {"image": f"images/{rid}.png", "split": "train"}
        if with_density or with_saliency:
            (root / "maps").mkdir(exist_ok=True)
        if with_density:
            write_dmap(root / "maps" / f"{rid}.dmap", rng.random((canvas.height, canvas.width)))
            extra["density"] = f"maps/{rid}.dmap"
        if with_saliency:
            sal = (rng.random((canvas.height, canvas.width)) > 0.7).astype(np.uint8) * 255
            save_png(root / "maps" / f"{rid}_sal.png", sal)
            extra["saliency"] = f"maps/{rid}_sal.png"
        records.append(layout_record(rid, layout, canvas, table, **extra))
    manifest = root / "manifest.jsonl"
    write_jsonl(manifest, records)
    return manifest
