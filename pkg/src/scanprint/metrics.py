"""Layout quality metrics.

Graphic metrics (layout only): overlay ``ove``, alignment ``ali``, loose and
strict underlay effectiveness ``und_l``/``und_s``. Content metrics (need
maps): utilization ``uti`` and occlusion ``occ`` from a saliency map,
readability ``rea`` from the background image.

Boxes are rasterized over half-open pixel ranges ``[floor(x_l), ceil(x_r))``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from itertools import combinations
from typing import Iterable

import numpy as np

from .geometry import Canvas, box_area, enclosure_ratio, intersection_area
from .layout import Layout
from .scan import luminance

__all__ = [
    "METRIC_NAMES", "MetricReport", "compute_ove", "compute_ali", "compute_underlay",
    "compute_content", "compute_rea", "coverage_mask", "evaluate_layout", "aggregate",
]

METRIC_NAMES = ("ove", "ali", "und_l", "und_s", "uti", "occ", "rea")
FULL_ENCLOSURE = 1.0 - 1e-9


def compute_ove(layout: Layout, underlay: int = 2) -> float:
    """Mean pairwise overlap of non-underlay elements, relative to the smaller box."""
    boxes = layout.corners[layout.categories != underlay]
    if len(boxes) < 2:
        return 0.0
    ratios = []
    for a, b in combinations(boxes, 2):
        smaller = min(box_area(a), box_area(b))
        ratios.append(intersection_area(a, b) / smaller if smaller > 0 else 0.0)
    return math.fsum(ratios) / len(ratios)


def compute_ali(layout: Layout, canvas: Canvas) -> float:
    """Mean, over elements, of the distance to the nearest alignment line.

    Six lines per box are compared like-for-like (left, x-center, right, top,
    y-center, bottom); x distances are normalized by canvas width and y
    distances by canvas height.
    """
    n = len(layout)
    if n <= 1:
        return 0.0
    c = layout.corners
    lines = np.stack(
        [
            c[:, 0] / canvas.width, (c[:, 0] + c[:, 2]) / 2 / canvas.width, c[:, 2] / canvas.width,
            c[:, 1] / canvas.height, (c[:, 1] + c[:, 3]) / 2 / canvas.height, c[:, 3] / canvas.height,
        ],
        axis=1,
    )
    dist = np.abs(lines[:, None, :] - lines[None, :, :]).min(axis=2)
    np.fill_diagonal(dist, np.inf)
    return math.fsum(dist.min(axis=1)) / n


def compute_underlay(layout: Layout, underlay: int = 2) -> tuple[float, float, int]:
    """``(und_l, und_s, n_underlays)``.

    Per underlay, the loose score is the best fraction of any other
    element's area it covers; the strict score is 1 when some element is
    covered entirely.
    """
    is_und = layout.categories == underlay
    unds, others = layout.corners[is_und], layout.corners[~is_und]
    if len(unds) == 0:
        return 0.0, 0.0, 0
    if len(others) == 0:
        return 0.0, 0.0, len(unds)
    ratio = enclosure_ratio(unds[:, None], others[None, :])
    best = ratio.max(axis=1)
    loose = math.fsum(best) / len(unds)
    strict = math.fsum((best >= FULL_ENCLOSURE).astype(float)) / len(unds)
    return loose, strict, len(unds)


def coverage_mask(layout: Layout, shape: tuple[int, int], which=None) -> np.ndarray:
    """Boolean ``(H, W)`` union of element boxes; ``which`` filters elements."""
    h, w = shape
    mask = np.zeros((h, w), dtype=bool)
    boxes = layout.corners if which is None else layout.corners[which]
    for x_l, y_t, x_r, y_b in boxes:
        x0, y0 = max(int(math.floor(x_l)), 0), max(int(math.floor(y_t)), 0)
        x1, y1 = min(int(math.ceil(x_r)), w), min(int(math.ceil(y_b)), h)
        if x1 > x0 and y1 > y0:
            mask[y0:y1, x0:x1] = True
    return mask


def compute_content(layout: Layout, saliency: np.ndarray, threshold: float = 0.5) -> tuple[float, float]:
    """``(uti, occ)``.

    ``occ`` is the mean saliency under the elements; ``uti`` the share of
    non-salient pixels (saliency below ``threshold``) that elements cover.
    """
    sal = np.asarray(saliency, dtype=np.float64)
    covered = coverage_mask(layout, sal.shape)
    if not covered.any():
        return 0.0, 0.0
    occ = float(sal[covered].mean())
    free = sal < threshold
    n_free = int(free.sum())
    uti = float((covered & free).sum()) / n_free if n_free else 0.0
    return uti, occ


def gradient_magnitude(image: np.ndarray) -> np.ndarray:
    """Central-difference gradient magnitude of luminance; lies in [0, 1]."""
    lum = np.pad(luminance(image), 1, mode="edge")
    gx = (lum[1:-1, 2:] - lum[1:-1, :-2]) / 2
    gy = (lum[2:, 1:-1] - lum[:-2, 1:-1]) / 2
    return np.hypot(gx, gy)


def compute_rea(layout: Layout, image: np.ndarray, text: int = 1) -> tuple[float, int]:
    """``(rea, n_text)``: mean gradient magnitude under text elements."""
    is_text = layout.categories == text
    n_text = int(is_text.sum())
    if n_text == 0:
        return 0.0, 0
    grad = gradient_magnitude(image)
    covered = coverage_mask(layout, grad.shape, is_text)
    if not covered.any():
        return 0.0, n_text
    return float(grad[covered].mean()), n_text


@dataclass
class MetricReport:
    ove: float = 0.0
    ali: float = 0.0
    und_l: float = 0.0
    und_s: float = 0.0
    uti: float = math.nan
    occ: float = math.nan
    rea: float = math.nan
    n_elements: int = 0
    n_non_underlay: int = 0
    n_underlay: int = 0
    n_text: int = 0

    def values(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in METRIC_NAMES}

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def evaluate_layout(
    layout: Layout,
    canvas: Canvas,
    saliency: np.ndarray | None = None,
    image: np.ndarray | None = None,
    underlay: int = 2,
    text: int = 1,
    threshold: float = 0.5,
) -> MetricReport:
    """All seven metrics; content metrics stay NaN when their map is missing."""
    und_l, und_s, n_und = compute_underlay(layout, underlay)
    report = MetricReport(
        ove=compute_ove(layout, underlay),
        ali=compute_ali(layout, canvas),
        und_l=und_l,
        und_s=und_s,
        n_elements=len(layout),
        n_non_underlay=int((layout.categories != underlay).sum()),
        n_underlay=n_und,
        n_text=int((layout.categories == text).sum()),
    )
    if saliency is not None:
        report.uti, report.occ = compute_content(layout, saliency, threshold)
    if image is not None:
        report.rea, _ = compute_rea(layout, image, text)
    return report


def aggregate(reports: Iterable[MetricReport]) -> dict:
    """Dataset-level means.

    Underlay scores average only over layouts that contain an underlay;
    NaN entries (missing maps) are ignored. Sums use a sorted ``fsum`` so
    the result does not depend on input order.
    """
    reports = list(reports)
    out: dict = {"n_samples": len(reports)}
    for name in METRIC_NAMES:
        pool = reports
        if name in ("und_l", "und_s"):
            pool = [r for r in reports if r.n_underlay > 0]
        vals = sorted(v for v in (getattr(r, name) for r in pool) if not math.isnan(v))
        out[name] = math.fsum(vals) / len(vals) if vals else math.nan
        out[f"n_{name}"] = len(vals)
    return out


def dumps_summary(summary: dict) -> str:
    clean = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in summary.items()}
    return json.dumps(clean, indent=2, sort_keys=True)
