"""Canvas-space box arithmetic.

Boxes are plain array-likes with a trailing axis of size 4. Two layouts of
that axis are used throughout the package:

* ``cxcywh`` -- center x, center y, width, height
* ``xyxy``   -- left, top, right, bottom ("corners")

All values are canvas pixels stored as ``float64``. Every function accepts a
single box or a stacked ``(..., 4)`` array and broadcasts like numpy.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "Box", "Corners", "Canvas",
    "cxcywh_to_xyxy", "xyxy_to_cxcywh", "box_area", "intersection_area",
    "enclosure_ratio", "iou", "overlap_ratio",
]


class Box(NamedTuple):
    x_c: float
    y_c: float
    w: float
    h: float


class Corners(NamedTuple):
    x_l: float
    y_t: float
    x_r: float
    y_b: float


class Canvas(NamedTuple):
    width: int = 224
    height: int = 224

    @classmethod
    def parse(cls, text: str) -> "Canvas":
        """Parse ``"WxH"`` (e.g. ``"224x224"``)."""
        try:
            w, h = (int(v) for v in text.lower().split("x"))
        except ValueError:
            raise ValueError(f"canvas must look like WxH, got {text!r}") from None
        if w <= 0 or h <= 0:
            raise ValueError(f"canvas extents must be positive, got {text!r}")
        return cls(w, h)


def _as_boxes(b) -> np.ndarray:
    arr = np.asarray(b, dtype=np.float64)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"expected trailing axis of size 4, got shape {arr.shape}")
    return arr


def cxcywh_to_xyxy(b) -> np.ndarray:
    b = _as_boxes(b)
    half_w, half_h = b[..., 2] / 2, b[..., 3] / 2
    return np.stack(
        [b[..., 0] - half_w, b[..., 1] - half_h, b[..., 0] + half_w, b[..., 1] + half_h],
        axis=-1,
    )


def xyxy_to_cxcywh(c) -> np.ndarray:
    """Inverse of :func:`cxcywh_to_xyxy`.

    Raises:
        ValueError: if any box has ``x_l > x_r`` or ``y_t > y_b``.
    """
    c = _as_boxes(c)
    if np.any(c[..., 0] > c[..., 2]) or np.any(c[..., 1] > c[..., 3]):
        raise ValueError("malformed corners: expected x_l <= x_r and y_t <= y_b")
    return np.stack(
        [
            (c[..., 0] + c[..., 2]) / 2,
            (c[..., 1] + c[..., 3]) / 2,
            c[..., 2] - c[..., 0],
            c[..., 3] - c[..., 1],
        ],
        axis=-1,
    )


def box_area(c) -> np.ndarray | float:
    c = _as_boxes(c)
    area = np.clip(c[..., 2] - c[..., 0], 0, None) * np.clip(c[..., 3] - c[..., 1], 0, None)
    return float(area) if area.ndim == 0 else area


def intersection_area(a, b) -> np.ndarray | float:
    """Area of the rectangle intersection; 0 when disjoint or edge-touching.

    For pairwise matrices pass ``a[:, None]`` and ``b[None, :]``.
    """
    a, b = _as_boxes(a), _as_boxes(b)
    w = np.minimum(a[..., 2], b[..., 2]) - np.maximum(a[..., 0], b[..., 0])
    h = np.minimum(a[..., 3], b[..., 3]) - np.maximum(a[..., 1], b[..., 1])
    inter = np.clip(w, 0, None) * np.clip(h, 0, None)
    return float(inter) if inter.ndim == 0 else inter


def _safe_div(num, den):
    num, den = np.asarray(num, dtype=np.float64), np.asarray(den, dtype=np.float64)
    out = np.divide(num, den, out=np.zeros(np.broadcast(num, den).shape), where=den > 0)
    return float(out) if out.ndim == 0 else out


def enclosure_ratio(outer, inner) -> np.ndarray | float:
    """Fraction of ``inner``'s area covered by ``outer``.

    Defined as 0 when ``inner`` is degenerate.
    """
    return _safe_div(intersection_area(outer, inner), box_area(inner))


def iou(a, b) -> np.ndarray | float:
    inter = intersection_area(a, b)
    return _safe_div(inter, np.asarray(box_area(a)) + np.asarray(box_area(b)) - inter)


def overlap_ratio(outer, inner, mode: str = "enclosure"):
    """Dispatch between :func:`enclosure_ratio` and symmetric :func:`iou`."""
    if mode == "enclosure":
        return enclosure_ratio(outer, inner)
    if mode == "iou":
        return iou(outer, inner)
    raise ValueError(f"unknown overlap mode {mode!r}")
