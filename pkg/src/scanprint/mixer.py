"""Patch-and-vertex mixup of image-layout pairs.

Given two samples ``i`` and ``j`` from a mini-batch, the mixed image takes
``j``'s pixels on the cells ``i`` marked as applicable and ``i``'s pixels
elsewhere. The mixed layout keeps element pairs shared by both samples'
vertex-category sequences (their LCS), takes start vertices from ``i`` and
end vertices from ``j``, and relocates each pair into its own connected
region of cells applicable in both samples.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import Canvas
from .layout import Layout
from .scan import PatchIndexSet
from .vlr import EPS_NON_UNDERLAY, EPS_UNDERLAY, VertexTensor, decode_vlr, encode_vlr

__all__ = [
    "STRATEGIES", "NO_REGION", "NO_PAIR", "Sample", "Region", "LcsMatch",
    "AugmentedSample", "AugmentResult", "derive_seed", "pair_similarity",
    "select_pairs", "mix_images", "strict_mask", "find_regions",
    "lcs_categories", "shift_pair", "mix_vertices", "mix_pair", "print_augment",
]

log = logging.getLogger(__name__)

STRATEGIES = ("pcc", "cosim", "random")
NO_REGION = "no applicable region"
NO_PAIR = "no common element pair"


def derive_seed(*parts: int) -> int:
    """Stable 64-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0])


@dataclass
class Sample:
    image: np.ndarray
    layout: Layout
    patch_set: PatchIndexSet
    vertex_tensor: VertexTensor | None = None
    underlay: int = 2
    eps_u: float = EPS_UNDERLAY
    eps_n: float = EPS_NON_UNDERLAY

    def __post_init__(self):
        h, w = self.image.shape[:2]
        p = self.patch_set.p
        if h % p or w % p:
            raise ValueError(f"image {w}x{h} does not tile into a {p}x{p} grid")
        if self.vertex_tensor is None:
            self.vertex_tensor = encode_vlr(self.layout, self.underlay, self.eps_u, self.eps_n)

    @property
    def canvas(self) -> Canvas:
        h, w = self.image.shape[:2]
        return Canvas(w, h)


@dataclass(frozen=True)
class Region:
    """A 4-connected set of grid cells, row-major sorted ``(x, y)`` pairs."""

    cells: tuple[tuple[int, int], ...]

    @property
    def left_top(self) -> tuple[int, int]:
        return min(x for x, _ in self.cells), min(y for _, y in self.cells)

    @property
    def right_bottom(self) -> tuple[int, int]:
        return max(x for x, _ in self.cells), max(y for _, y in self.cells)

    def pixel_bounds(self, pw: float, ph: float) -> tuple[float, float, float, float]:
        """Patch-aligned bounding box in pixels: left-top origin to right-bottom far edge."""
        (x0, y0), (x1, y1) = self.left_top, self.right_bottom
        return x0 * pw, y0 * ph, (x1 + 1) * pw, (y1 + 1) * ph

    def __len__(self) -> int:
        return len(self.cells)


@dataclass
class LcsMatch:
    """LCS of two vertex-category sequences.

    ``index_i[l]`` / ``index_j[l]`` locate ``categories[l]`` in each source.
    ``pairs`` holds ``(start_pos, end_pos)`` positions into the LCS that form
    complete elements.
    """

    categories: list[int]
    index_i: list[int]
    index_j: list[int]
    pairs: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.categories)


@dataclass
class AugmentedSample:
    image: np.ndarray
    layout: Layout
    source_i: int
    source_j: int
    master_seed: int
    pair_seed: int
    ordinal: int
    regions: list[Region]
    n_regions: int = 0
    lcs_length: int = 0

    def provenance(self) -> dict:
        return {
            "ordinal": self.ordinal,
            "source_i": self.source_i,
            "source_j": self.source_j,
            "master_seed": self.master_seed,
            "pair_seed": self.pair_seed,
            "lcs_length": self.lcs_length,
            "n_regions": self.n_regions,
            "regions": [
                {"left_top": list(r.left_top), "right_bottom": list(r.right_bottom), "cells": len(r)}
                for r in self.regions
            ],
        }


@dataclass
class AugmentResult:
    samples: list[AugmentedSample]
    skipped: list[tuple[int, int, int, str]]

    @property
    def skip_reasons(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for *_, reason in self.skipped:
            counts[reason] = counts.get(reason, 0) + 1
        return counts


# -- pair selection ----------------------------------------------------------

def pair_similarity(patch_sets: Sequence[PatchIndexSet], strategy: str = "pcc") -> np.ndarray:
    """Pairwise similarity of flattened binary patch masks.

    Constant masks (nothing or everything selected) have no defined
    correlation; their PCC is taken as 0.
    """
    x = np.stack([s.to_vector() for s in patch_sets])
    strategy = strategy.lower()
    if strategy == "pcc":
        x = x - x.mean(axis=1, keepdims=True)
    elif strategy != "cosim":
        raise ValueError(f"similarity needs 'pcc' or 'cosim', got {strategy!r}")
    norms = np.linalg.norm(x, axis=1)
    denom = np.outer(norms, norms)
    return np.divide(x @ x.T, denom, out=np.zeros_like(denom), where=denom > 0)


def select_pairs(
    patch_sets: Sequence[PatchIndexSet],
    strategy: str = "pcc",
    alpha: int = 256,
    seed: int = 0,
) -> list[tuple[int, int]]:
    """Draw ``alpha`` ordered ``(i, j)`` source pairs with ``i != j``.

    ``i`` cycles through the batch from a seeded offset. For ``pcc`` and
    ``cosim`` the partner is the most similar other sample (smaller index on
    ties); for ``random`` it is uniform over the others.
    """
    b = len(patch_sets)
    if b < 2:
        raise ValueError(f"need at least 2 samples to pair, got {b}")
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    strategy = strategy.lower()
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    rng = np.random.default_rng(seed)
    offset = int(rng.integers(b))
    firsts = [(offset + t) % b for t in range(alpha)]
    if strategy == "random":
        pairs = []
        for i in firsts:
            j = int(rng.integers(b - 1))
            pairs.append((i, j + 1 if j >= i else j))
        return pairs
    sim = pair_similarity(patch_sets, strategy)
    np.fill_diagonal(sim, -np.inf)
    best = np.argmax(sim, axis=1)  # argmax returns the first maximum
    return [(i, int(best[i])) for i in firsts]


# -- image side --------------------------------------------------------------

def mix_images(img_i: np.ndarray, img_j: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Copy ``img_j`` into the cells where ``mask`` is set, ``img_i`` elsewhere."""
    img_i, img_j = np.asarray(img_i), np.asarray(img_j)
    if img_i.shape != img_j.shape:
        raise ValueError(f"image shapes differ: {img_i.shape} vs {img_j.shape}")
    mask = np.asarray(mask, dtype=bool)
    p = mask.shape[0]
    h, w = img_i.shape[:2]
    if h % p or w % p:
        raise ValueError(f"image {w}x{h} does not tile into a {p}x{p} grid")
    pixel_mask = np.repeat(np.repeat(mask, h // p, axis=0), w // p, axis=1)
    if img_i.ndim == 3:
        pixel_mask = pixel_mask[..., None]
    return np.where(pixel_mask, img_j, img_i)


def strict_mask(p_i: PatchIndexSet, p_j: PatchIndexSet) -> np.ndarray:
    if p_i.p != p_j.p:
        raise ValueError(f"grid sizes differ: {p_i.p} vs {p_j.p}")
    return p_i.to_mask() & p_j.to_mask()


def find_regions(s: np.ndarray, min_cells: int = 3) -> list[Region]:
    """4-connected components of set cells with at least ``min_cells`` cells.

    Components are found by depth-first search and returned ordered by their
    first cell in row-major order.
    """
    s = np.asarray(s, dtype=bool)
    rows, cols = s.shape
    seen = np.zeros_like(s)
    regions = []
    for y0 in range(rows):
        for x0 in range(cols):
            if not s[y0, x0] or seen[y0, x0]:
                continue
            seen[y0, x0] = True
            stack = [(x0, y0)]
            cells = []
            while stack:
                x, y = stack.pop()
                cells.append((x, y))
                for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                    if 0 <= nx < cols and 0 <= ny < rows and s[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((nx, ny))
            if len(cells) >= min_cells:
                regions.append(Region(tuple(sorted(cells, key=lambda c: (c[1], c[0])))))
    return regions


# -- layout side -------------------------------------------------------------

def lcs_categories(c_i: Sequence[int], c_j: Sequence[int]) -> LcsMatch:
    """LCS by dynamic programming, then keep only complete start/end pairs.

    On ties the traceback steps back along ``c_i`` first. An end symbol
    ``2c + 1`` closes the most recent unmatched start ``2c`` before it in the
    LCS; unmatched symbols are dropped from ``pairs``.
    """
    a = [int(v) for v in c_i]
    b = [int(v) for v in c_j]
    n, m = len(a), len(b)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for r in range(1, n + 1):
        ar, prev, cur = a[r - 1], dp[r - 1], dp[r]
        for c in range(1, m + 1):
            if ar == b[c - 1]:
                cur[c] = prev[c - 1] + 1
            else:
                cur[c] = prev[c] if prev[c] >= cur[c - 1] else cur[c - 1]
    cats, idx_i, idx_j = [], [], []
    r, c = n, m
    while r and c:
        if a[r - 1] == b[c - 1]:
            cats.append(a[r - 1])
            idx_i.append(r - 1)
            idx_j.append(c - 1)
            r -= 1
            c -= 1
        elif dp[r - 1][c] >= dp[r][c - 1]:
            r -= 1
        else:
            c -= 1
    cats.reverse()
    idx_i.reverse()
    idx_j.reverse()

    open_starts: dict[int, list[int]] = {}
    pairs = []
    for pos, cat in enumerate(cats):
        if cat % 2 == 0:
            open_starts.setdefault(cat, []).append(pos)
        elif open_starts.get(cat - 1):
            pairs.append((open_starts[cat - 1].pop(), pos))
    pairs.sort()
    return LcsMatch(cats, idx_i, idx_j, pairs)


def shift_pair(v_s, v_e, region: Region, canvas: Canvas, p: int):
    """Move a start/end vertex pair into ``region``, keeping intra-patch offsets.

    The start lands in the region's left-top patch and the end in its
    right-bottom patch. Afterwards the corners are reordered if needed and
    widened to at least one pixel inside the region's patch-aligned bounds.
    """
    pw, ph = canvas.width / p, canvas.height / p
    (lx, ly), (rx, ry) = region.left_top, region.right_bottom
    sx = float(v_s[0]) % pw + lx * pw
    sy = float(v_s[1]) % ph + ly * ph
    ex = float(v_e[0]) % pw + rx * pw
    ey = float(v_e[1]) % ph + ry * ph
    x_lo, y_lo, x_hi, y_hi = region.pixel_bounds(pw, ph)
    sx, ex = _ordered_span(sx, ex, x_lo, x_hi)
    sy, ey = _ordered_span(sy, ey, y_lo, y_hi)
    return (sx, sy), (ex, ey)


def _ordered_span(a: float, b: float, lo: float, hi: float) -> tuple[float, float]:
    if a > b:
        a, b = b, a
    if b - a < 1.0:
        b = min(a + 1.0, hi)
        a = max(b - 1.0, lo)
    return a, b


def mix_vertices(
    v_i: VertexTensor,
    v_j: VertexTensor,
    match: LcsMatch,
    regions: Sequence[Region],
    rng: np.random.Generator,
    canvas: Canvas,
    p: int,
) -> tuple[VertexTensor, list[Region]]:
    """Build the mixed vertex tensor and report the region used by each element.

    ``m = min(#pairs, #regions)``. Pairs and regions are shuffled
    independently; pair ``l`` takes its start from ``v_i`` and its end from
    ``v_j`` and is shifted into region ``l``.
    """
    m = min(len(match.pairs), len(regions))
    if m == 0:
        return VertexTensor(), []
    pair_order = rng.permutation(len(match.pairs))
    region_order = rng.permutation(len(regions))
    cats, coords, used = [], [], []
    for l in range(m):
        s_pos, e_pos = match.pairs[pair_order[l]]
        region = regions[region_order[l]]
        start = v_i.coords[match.index_i[s_pos]]
        end = v_j.coords[match.index_j[e_pos]]
        new_s, new_e = shift_pair(start, end, region, canvas, p)
        cats += [match.categories[s_pos], match.categories[e_pos]]
        coords += [new_s, new_e]
        used.append(region)
    return VertexTensor(cats, coords), used


def mix_pair(
    a: Sample,
    b: Sample,
    pair_seed: int,
) -> tuple[np.ndarray, Layout, list[Region], int, int] | str:
    """Mix one ordered pair; returns a skip reason string when nothing applies."""
    p = a.patch_set.p
    regions = find_regions(strict_mask(a.patch_set, b.patch_set))
    if not regions:
        return NO_REGION
    match = lcs_categories(a.vertex_tensor.categories, b.vertex_tensor.categories)
    if not match.pairs:
        return NO_PAIR
    rng = np.random.default_rng(pair_seed)
    v_mix, used = mix_vertices(a.vertex_tensor, b.vertex_tensor, match, regions, rng, a.canvas, p)
    image = mix_images(a.image, b.image, a.patch_set.to_mask())
    return image, decode_vlr(v_mix), used, len(regions), len(match)


def print_augment(
    batch: Sequence[Sample],
    strategy: str = "pcc",
    alpha: int = 256,
    master_seed: int = 0,
    workers: int = 1,
) -> AugmentResult:
    """Synthesize up to ``alpha`` mixed samples from one mini-batch.

    Every pair is seeded from ``(master_seed, ordinal)``, so the output does
    not depend on ``workers``. Pairs without an applicable region or a common
    element are skipped, not retried.
    """
    if len(batch) < 2:
        raise ValueError("print_augment needs a batch of at least 2 samples")
    shapes = {s.image.shape for s in batch}
    if len(shapes) != 1:
        raise ValueError(f"inconsistent image shapes in batch: {sorted(shapes)}")
    pairs = select_pairs([s.patch_set for s in batch], strategy, alpha, master_seed)

    def run(item):
        ordinal, (i, j) = item
        seed = derive_seed(master_seed, ordinal)
        return ordinal, i, j, seed, mix_pair(batch[i], batch[j], seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, enumerate(pairs)))
    else:
        results = [run(item) for item in enumerate(pairs)]

    samples, skipped = [], []
    for ordinal, i, j, seed, out in sorted(results, key=lambda r: r[0]):
        if isinstance(out, str):
            skipped.append((ordinal, i, j, out))
            continue
        image, layout, used, n_regions, lcs_len = out
        samples.append(
            AugmentedSample(image, layout, i, j, master_seed, seed, ordinal, used, n_regions, lcs_len)
        )
    log.debug("print_augment: %d samples, %d skipped", len(samples), len(skipped))
    return AugmentResult(samples, skipped)
