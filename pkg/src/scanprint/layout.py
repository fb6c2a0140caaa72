"""Layout containers and category tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .geometry import Box, cxcywh_to_xyxy, xyxy_to_cxcywh

__all__ = ["Element", "Layout", "CategoryTable", "PKU_CATEGORIES", "CGL_CATEGORIES"]


class Element(NamedTuple):
    category: int
    box: Box


@dataclass(frozen=True)
class CategoryTable:
    """Ordered category names; an element's category id is its index here."""

    names: tuple[str, ...]
    underlay: str = "underlay"
    text: str = "text"

    def __len__(self) -> int:
        return len(self.names)

    def id_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def name_of(self, cid: int) -> str:
        return self.names[cid]

    @property
    def underlay_id(self) -> int:
        return self.id_of(self.underlay)

    @property
    def text_id(self) -> int:
        return self.id_of(self.text)

    @property
    def n_vertex_categories(self) -> int:
        return 2 * len(self.names)


PKU_CATEGORIES = CategoryTable(("logo", "text", "underlay"))
CGL_CATEGORIES = CategoryTable(("logo", "text", "underlay", "embellishment"))


@dataclass
class Layout:
    """A set of categorized boxes on a canvas.

    Boxes are stored as corners (``xyxy``) because that is what the vertex
    representation carries; use :meth:`cxcywh` for the center-size view.
    """

    categories: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    corners: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))

    def __post_init__(self):
        self.categories = np.asarray(self.categories, dtype=np.int64).reshape(-1)
        self.corners = np.asarray(self.corners, dtype=np.float64).reshape(-1, 4)
        if len(self.categories) != len(self.corners):
            raise ValueError(
                f"{len(self.categories)} categories but {len(self.corners)} boxes"
            )

    @classmethod
    def from_cxcywh(cls, categories: Sequence[int], boxes) -> "Layout":
        boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
        return cls(categories, cxcywh_to_xyxy(boxes))

    @classmethod
    def from_elements(cls, elements: Sequence[Element]) -> "Layout":
        if not elements:
            return cls()
        return cls.from_cxcywh([e.category for e in elements], [tuple(e.box) for e in elements])

    def __len__(self) -> int:
        return len(self.categories)

    def cxcywh(self) -> np.ndarray:
        return xyxy_to_cxcywh(self.corners) if len(self) else np.zeros((0, 4))

    def elements(self) -> Iterator[Element]:
        for c, b in zip(self.categories, self.cxcywh()):
            yield Element(int(c), Box(*map(float, b)))

    def clamp(self, width: float, height: float) -> "Layout":
        c = self.corners.copy()
        c[:, [0, 2]] = np.clip(c[:, [0, 2]], 0, width)
        c[:, [1, 3]] = np.clip(c[:, [1, 3]], 0, height)
        return Layout(self.categories.copy(), c)

    def scaled(self, sx: float, sy: float) -> "Layout":
        return Layout(self.categories.copy(), self.corners * np.array([sx, sy, sx, sy]))

    def translated(self, dx: float, dy: float) -> "Layout":
        return Layout(self.categories.copy(), self.corners + np.array([dx, dy, dx, dy]))

    def as_multiset(self) -> list[tuple]:
        """Sorted (category, x_l, y_t, x_r, y_b) tuples, for order-free comparison."""
        return sorted(
            (int(c), *map(float, b)) for c, b in zip(self.categories, self.corners)
        )
