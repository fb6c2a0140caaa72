"""Quantize vertex tensors into flat integer token sequences and back.

Vocabulary, for ``C`` vertex categories::

    [0, C)              vertex category
    [C, C + 128)        x bin
    [C + 128, C + 256)  y bin
    C + 256, +257, +258 BOS, EOS, PAD

Every vertex is a ``(category, x_bin, y_bin)`` triple, so a layout of ``n``
elements is ``6n`` tokens.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedTensorError
from .geometry import Canvas
from .vlr import VertexTensor

__all__ = [
    "N_BINS", "quantize_coord", "dequantize_coord", "LayoutTokenizer",
    "tensor_to_tokens", "tokens_to_tensor", "format_tokens", "parse_tokens",
]

N_BINS = 128


def quantize_coord(v, extent: float, n_bins: int = N_BINS):
    """Bin index of a pixel coordinate; out-of-canvas values clamp to the edge bins."""
    if extent <= 0:
        raise ValueError(f"extent must be positive, got {extent}")
    arr = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coordinate is not finite")
    bins = np.floor(np.clip(arr, 0.0, extent) / extent * n_bins).astype(np.int64)
    bins = np.clip(bins, 0, n_bins - 1)
    return int(bins) if bins.ndim == 0 else bins


def dequantize_coord(b, extent: float, n_bins: int = N_BINS):
    """Bin-center pixel coordinate."""
    arr = (np.asarray(b, dtype=np.float64) + 0.5) / n_bins * extent
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class LayoutTokenizer:
    n_vertex_categories: int
    canvas: Canvas = Canvas()
    n_bins: int = N_BINS
    framing: bool = False

    @property
    def x_offset(self) -> int:
        return self.n_vertex_categories

    @property
    def y_offset(self) -> int:
        return self.n_vertex_categories + self.n_bins

    @property
    def bos(self) -> int:
        return self.n_vertex_categories + 2 * self.n_bins

    @property
    def eos(self) -> int:
        return self.bos + 1

    @property
    def pad(self) -> int:
        return self.bos + 2

    @property
    def vocab_size(self) -> int:
        return self.pad + 1

    def encode(self, v: VertexTensor) -> list[int]:
        if len(v) % 2:
            raise MalformedTensorError(f"vertex tensor has odd length {len(v)}")
        cats = v.categories
        if len(cats) and (cats.min() < 0 or cats.max() >= self.n_vertex_categories):
            raise MalformedTensorError("vertex category outside the category table")
        tokens = np.empty((len(v), 3), dtype=np.int64)
        tokens[:, 0] = cats
        tokens[:, 1] = quantize_coord(v.coords[:, 0], self.canvas.width, self.n_bins) + self.x_offset
        tokens[:, 2] = quantize_coord(v.coords[:, 1], self.canvas.height, self.n_bins) + self.y_offset
        out = tokens.reshape(-1).tolist()
        if self.framing:
            out = [self.bos, *out, self.eos]
        return out

    def decode(self, tokens) -> VertexTensor:
        toks = [int(t) for t in tokens]
        if self.framing:
            if len(toks) < 2 or toks[0] != self.bos:
                raise MalformedTensorError("missing BOS token")
            try:
                end = toks.index(self.eos)
            except ValueError:
                raise MalformedTensorError("missing EOS token") from None
            if any(t != self.pad for t in toks[end + 1:]):
                raise MalformedTensorError("non-PAD tokens after EOS")
            toks = toks[1:end]
        if len(toks) % 6:
            raise MalformedTensorError(f"token count {len(toks)} is not a multiple of 6")
        if not toks:
            return VertexTensor()
        arr = np.asarray(toks, dtype=np.int64).reshape(-1, 3)
        cats = arr[:, 0]
        xb = arr[:, 1] - self.x_offset
        yb = arr[:, 2] - self.y_offset
        if cats.min() < 0 or cats.max() >= self.n_vertex_categories:
            raise MalformedTensorError("category token outside its vocabulary range")
        for name, b in (("x", xb), ("y", yb)):
            if b.min() < 0 or b.max() >= self.n_bins:
                raise MalformedTensorError(f"{name} token outside its vocabulary range")
        coords = np.stack(
            [
                dequantize_coord(xb, self.canvas.width, self.n_bins),
                dequantize_coord(yb, self.canvas.height, self.n_bins),
            ],
            axis=1,
        )
        v = VertexTensor(cats, coords)
        v.pairs()
        return v

    def bin_width(self) -> tuple[float, float]:
        return self.canvas.width / self.n_bins, self.canvas.height / self.n_bins


def format_tokens(tokens) -> str:
    return " ".join(str(t) for t in tokens)


def parse_tokens(line: str) -> list[int]:
    return [int(t) for t in line.split()]


def tensor_to_tokens(v: VertexTensor, canvas: Canvas, n_vertex_categories: int, framing: bool = False) -> list[int]:
    return LayoutTokenizer(n_vertex_categories, canvas, framing=framing).encode(v)


def tokens_to_tensor(tokens, canvas: Canvas, n_vertex_categories: int, framing: bool = False) -> VertexTensor:
    return LayoutTokenizer(n_vertex_categories, canvas, framing=framing).decode(tokens)
