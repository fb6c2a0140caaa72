"""Patch grid scoring and top-k patch selection.

Grid cells are addressed as ``(x, y)`` = (column, row); masks are indexed
``mask[y, x]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

__all__ = [
    "PatchIndexSet", "pool_patch_scores", "select_topk", "mask_from_indices",
    "indices_from_mask", "heuristic_density", "luminance",
]


@dataclass(frozen=True)
class PatchIndexSet:
    """Selected grid cells, kept sorted in row-major order."""

    p: int
    cells: tuple[tuple[int, int], ...]

    def __post_init__(self):
        cells = tuple(sorted({(int(x), int(y)) for x, y in self.cells}, key=lambda c: (c[1], c[0])))
        for x, y in cells:
            if not (0 <= x < self.p and 0 <= y < self.p):
                raise ValueError(f"cell {(x, y)} outside a {self.p}x{self.p} grid")
        object.__setattr__(self, "cells", cells)

    @property
    def k(self) -> int:
        return len(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def to_mask(self) -> np.ndarray:
        return mask_from_indices(self)

    def to_vector(self) -> np.ndarray:
        return self.to_mask().reshape(-1).astype(np.float64)


def pool_patch_scores(density: np.ndarray, p: int = 14) -> np.ndarray:
    """Mean density inside each cell of a ``p x p`` grid."""
    d = np.asarray(density, dtype=np.float64)
    if d.ndim != 2 or d.size == 0:
        raise ValueError("density map must be a non-empty 2-D array")
    h, w = d.shape
    if h % p or w % p:
        raise ValueError(f"density map {w}x{h} does not tile into a {p}x{p} grid")
    return d.reshape(p, h // p, p, w // p).mean(axis=(1, 3))


def select_topk(scores: np.ndarray, k: int) -> PatchIndexSet:
    """The ``k`` highest-scoring cells; equal scores resolve in row-major order."""
    scores = np.asarray(scores, dtype=np.float64)
    p = scores.shape[0]
    if scores.shape != (p, p):
        raise ValueError(f"scores must be square, got {scores.shape}")
    if not 1 <= k <= p * p:
        raise ValueError(f"k must be in [1, {p * p}], got {k}")
    order = np.argsort(-scores.reshape(-1), kind="stable")[:k]
    ys, xs = np.divmod(order, p)
    return PatchIndexSet(p, tuple(zip(xs.tolist(), ys.tolist())))


def mask_from_indices(s: PatchIndexSet) -> np.ndarray:
    m = np.zeros((s.p, s.p), dtype=bool)
    for x, y in s.cells:
        m[y, x] = True
    return m


def indices_from_mask(mask: np.ndarray) -> PatchIndexSet:
    mask = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(mask)
    return PatchIndexSet(mask.shape[0], tuple(zip(xs.tolist(), ys.tolist())))


def luminance(image: np.ndarray) -> np.ndarray:
    """Rec. 601 luma in [0, 1] for uint8 or float images, gray or RGB(A)."""
    img = np.asarray(image)
    scale = 255.0 if img.dtype == np.uint8 else 1.0
    img = img.astype(np.float64) / scale
    if img.ndim == 3:
        img = img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114
    return img


def heuristic_density(image: np.ndarray, smooth: int = 3) -> np.ndarray:
    """Placement-suitability proxy: flat regions score high, busy regions low.

    ``1 - normalized gradient energy`` of luminance, box-filtered with a
    ``smooth x smooth`` window. Output lies in [0, 1].
    """
    lum = luminance(image)
    if lum.size == 0:
        raise ValueError("image is empty")
    if min(lum.shape) < 2:
        energy = np.zeros_like(lum)
    else:
        gy, gx = np.gradient(lum)
        energy = gx * gx + gy * gy
    peak = energy.max()
    if peak > 0:
        energy = energy / peak
    density = uniform_filter(1.0 - energy, size=smooth, mode="nearest")
    return np.clip(density, 0.0, 1.0)
