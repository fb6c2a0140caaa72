"""Vertex-based layout representation.

A layout of ``n`` boxes becomes a sequence of ``2n`` vertices. Each box
contributes a start vertex (its top-left corner, vertex category ``2c``) and
an end vertex (its bottom-right corner, vertex category ``2c + 1``).
Underlays that enclose other elements open a group: the group's start vertex
is followed by its children and closed by its own end vertex, so the
sequence nests like brackets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MalformedTensorError
from .geometry import box_area, overlap_ratio
from .layout import Layout

__all__ = [
    "EPS_UNDERLAY", "EPS_NON_UNDERLAY", "IdTree", "VertexTensor",
    "group_element_id", "sorting_weight", "arrange_severtex_id",
    "encode_vlr", "decode_vlr",
]

EPS_UNDERLAY = 0.8
EPS_NON_UNDERLAY = 0.5


@dataclass
class IdTree:
    value: int
    children: list["IdTree"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_tuple(self):
        """Nested ``(value, (children...))`` form; handy for comparisons."""
        return (self.value, tuple(c.to_tuple() for c in self.children))


@dataclass
class VertexTensor:
    """Ordered start/end vertices: ``categories`` is ``(2n,)``, ``coords`` is ``(2n, 2)``."""

    categories: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    coords: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        self.categories = np.asarray(self.categories, dtype=np.int64).reshape(-1)
        self.coords = np.asarray(self.coords, dtype=np.float64).reshape(-1, 2)
        if len(self.categories) != len(self.coords):
            raise MalformedTensorError("category and coordinate lengths differ")

    def __len__(self) -> int:
        return len(self.categories)

    @property
    def n_elements(self) -> int:
        return len(self) // 2

    def entries(self) -> list[tuple[int, float, float]]:
        return [(int(c), float(x), float(y)) for c, (x, y) in zip(self.categories, self.coords)]

    @classmethod
    def from_entries(cls, entries) -> "VertexTensor":
        entries = list(entries)
        if not entries:
            return cls()
        cats = [e[0] for e in entries]
        coords = [(e[1], e[2]) for e in entries]
        return cls(cats, coords)

    def pairs(self) -> list[tuple[int, int]]:
        """Match start and end vertex positions with a bracket scan.

        Raises:
            MalformedTensorError: on a lone, crossed or unclosed vertex.
        """
        stack: list[int] = []
        out: list[tuple[int, int]] = []
        for pos, cat in enumerate(self.categories):
            cat = int(cat)
            if cat < 0:
                raise MalformedTensorError(f"negative vertex category at {pos}")
            if cat % 2 == 0:
                stack.append(pos)
                continue
            if not stack:
                raise MalformedTensorError(f"end vertex at {pos} has no open start")
            start = stack.pop()
            if int(self.categories[start]) != cat - 1:
                raise MalformedTensorError(
                    f"end vertex {cat} at {pos} closes start {int(self.categories[start])}"
                )
            out.append((start, pos))
        if stack:
            raise MalformedTensorError(f"{len(stack)} start vertices never closed")
        out.sort()
        return out


def group_element_id(
    categories: Sequence[int],
    corners,
    c_und: int,
    eps_u: float = EPS_UNDERLAY,
    eps_n: float = EPS_NON_UNDERLAY,
    mode: str = "enclosure",
) -> list[IdTree]:
    """Build the forest of underlay groups.

    Underlays are visited in ascending area order; an element joins the first
    (smallest) underlay that encloses it above the threshold, and is never
    attached twice. ``mode`` selects the overlap measure (see
    :func:`scanprint.geometry.overlap_ratio`).
    """
    categories = np.asarray(categories, dtype=np.int64).reshape(-1)
    corners = np.asarray(corners, dtype=np.float64).reshape(-1, 4)
    if len(categories) != len(corners):
        raise ValueError(f"{len(categories)} categories but {len(corners)} boxes")
    n = len(categories)
    trees = [IdTree(i) for i in range(n)]
    if not np.any(categories == c_und):
        return trees

    und = np.flatnonzero(categories == c_und)
    und = und[np.argsort(box_area(corners[und]), kind="stable")]
    non = np.flatnonzero(categories != c_und)

    ratio_uu = overlap_ratio(corners[und][:, None], corners[und][None, :], mode)
    np.fill_diagonal(ratio_uu, 0.0)
    ratio_un = overlap_ratio(corners[und][:, None], corners[non][None, :], mode)

    visited = np.zeros(n, dtype=bool)
    for a in range(len(und)):
        for b in range(a):
            j = und[b]
            if ratio_uu[a, b] > eps_u and not visited[j]:
                trees[und[a]].children.append(trees[j])
                visited[j] = True
    for a in range(len(und)):
        for b in np.flatnonzero(ratio_un[a] > eps_n):
            j = non[b]
            if not visited[j]:
                trees[und[a]].children.append(trees[j])
                visited[j] = True
    return [t for t in trees if not visited[t.value]]


def sorting_weight(x, y) -> np.ndarray:
    """Top-left reading-order weight ``0.01 * x + y`` per vertex."""
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    # (x + 100y) / 100 equals 0.01x + y but keeps ties exact on integer grids.
    return (x + 100.0 * y) / 100.0


def arrange_severtex_id(forest: Sequence[IdTree], weights, n_vertices: int | None = None) -> list[int]:
    """Order vertex ids so that groups nest and siblings read top-left first.

    Each sibling is keyed by the weight of its start vertex (ties by vertex
    id). A leaf's end vertex stays glued to its start; a group's start is
    followed by its recursively arranged children and then its end vertex.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if n_vertices is not None and len(weights) != n_vertices:
        raise ValueError(f"expected {n_vertices} weights, got {len(weights)}")

    def arrange(nodes):
        units = []
        for node in nodes:
            start = 2 * node.value
            if start + 1 >= len(weights):
                raise ValueError(f"no weight for vertex {start + 1}")
            if node.is_leaf:
                body = [start, start + 1]
            else:
                body = [start, *arrange(node.children), start + 1]
            units.append((weights[start], start, body))
        units.sort(key=lambda u: (u[0], u[1]))
        return [v for _, _, body in units for v in body]

    return arrange(forest)


def encode_vlr(
    layout: Layout,
    c_und: int = 2,
    eps_u: float = EPS_UNDERLAY,
    eps_n: float = EPS_NON_UNDERLAY,
    mode: str = "enclosure",
) -> VertexTensor:
    n = len(layout)
    if n == 0:
        return VertexTensor()
    c = layout.corners
    cats = np.repeat(layout.categories * 2, 2)
    cats[1::2] += 1
    xs = c[:, [0, 2]].reshape(-1)
    ys = c[:, [1, 3]].reshape(-1)
    forest = group_element_id(layout.categories, c, c_und, eps_u, eps_n, mode)
    order = np.asarray(arrange_severtex_id(forest, sorting_weight(xs, ys), 2 * n))
    return VertexTensor(cats[order], np.stack([xs[order], ys[order]], axis=1))


def decode_vlr(v: VertexTensor) -> Layout:
    """Rebuild the layout; elements come out in start-vertex order."""
    pairs = v.pairs()
    if not pairs:
        return Layout()
    starts = np.array([s for s, _ in pairs])
    ends = np.array([e for _, e in pairs])
    corners = np.concatenate([v.coords[starts], v.coords[ends]], axis=1)
    return Layout(v.categories[starts] // 2, corners)
