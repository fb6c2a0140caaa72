"""SVG rendering of layouts for visual inspection."""

from __future__ import annotations

import base64
import io
from xml.sax.saxutils import quoteattr

import numpy as np
from PIL import Image

from .geometry import Canvas
from .layout import CategoryTable, Layout, PKU_CATEGORIES
from .vlr import decode_vlr, encode_vlr

__all__ = ["CATEGORY_COLORS", "render_svg"]

CATEGORY_COLORS = {
    "logo": "#2ca02c",
    "text": "#d62728",
    "underlay": "#1f77b4",
    "embellishment": "#ff7f0e",
}
_FALLBACK = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _color(table: CategoryTable, cid: int) -> str:
    name = table.name_of(cid) if cid < len(table) else str(cid)
    return CATEGORY_COLORS.get(name, _FALLBACK[cid % len(_FALLBACK)])


def _png_data_uri(image: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(buf, format="PNG")
    return "data:image/png;base64," + base64.b64encode(buf.getvalue()).decode("ascii")


def render_svg(
    layout: Layout,
    canvas: Canvas,
    table: CategoryTable = PKU_CATEGORIES,
    background: np.ndarray | None = None,
    regions=None,
    patch_size: tuple[float, float] | None = None,
    opacity: float = 0.45,
) -> str:
    """One SVG document; underlays are drawn before the elements they enclose.

    ``regions`` (with ``patch_size``) draws dashed outlines of the mixup
    regions an augmented sample's elements were placed in.
    """
    w, h = canvas.width, canvas.height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">'
    ]
    if background is not None:
        parts.append(f'<image x="0" y="0" width="{w}" height="{h}" href="{_png_data_uri(background)}"/>')
    if regions and patch_size:
        pw, ph = patch_size
        for r in regions:
            x0, y0, x1, y1 = r.pixel_bounds(pw, ph)
            parts.append(
                f'<rect class="region" x="{x0:g}" y="{y0:g}" width="{x1 - x0:g}" height="{y1 - y0:g}" '
                'fill="none" stroke="#000" stroke-dasharray="4 2"/>'
            )
    # Re-encoding puts every group's underlay ahead of its children.
    ordered = decode_vlr(encode_vlr(layout, table.underlay_id)) if len(layout) else layout
    for cid, (x_l, y_t, x_r, y_b) in zip(ordered.categories, ordered.corners):
        cid = int(cid)
        name = table.name_of(cid) if cid < len(table) else str(cid)
        color = _color(table, cid)
        parts.append(
            f'<rect class={quoteattr(name)} x="{x_l:g}" y="{y_t:g}" width="{x_r - x_l:g}" '
            f'height="{y_b - y_t:g}" fill="{color}" fill-opacity="{opacity:g}" stroke="{color}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
