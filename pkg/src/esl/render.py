"""SVG rendering of 2-D simplicial models with an optional data underlay.

Output is plain SVG 1.1 text and deterministic: points colored by class,
vertices as dots, 2-vertex simplices as line segments and larger simplices
as translucent polygons with all pairwise edges drawn.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .errors import UnsupportedDimensionError
from .model import Dataset, Simplicial

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#e377c2",
)


def _bounds(models: Sequence[Simplicial], data: Optional[Dataset]):
    xs, ys = [], []
    for s in models:
        xs.append(s.vertices[0])
        ys.append(s.vertices[1])
    if data is not None:
        xs.append(data.points[0])
        ys.append(data.points[1])
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    pad_x = max(1e-9, 0.05 * (x.max() - x.min() + 1e-9))
    pad_y = max(1e-9, 0.05 * (y.max() - y.min() + 1e-9))
    return x.min() - pad_x, x.max() + pad_x, y.min() - pad_y, y.max() + pad_y


def render_svg(
    models: Sequence[Simplicial],
    data: Optional[Dataset] = None,
    width: int = 640,
    height: int = 640,
) -> str:
    """Render class models (one color each) over an optional scatter of data
    points colored by label. Only 2-D models are supported."""
    if not models:
        raise UnsupportedDimensionError("nothing to render: no models given")
    for s in models:
        if s.dim != 2:
            raise UnsupportedDimensionError("render supports 2-D models only")
    if data is not None and data.dim != 2:
        raise UnsupportedDimensionError("render supports 2-D data only")

    x_lo, x_hi, y_lo, y_hi = _bounds(models, data)

    def to_px(x: float, y: float) -> tuple[float, float]:
        px = (x - x_lo) / (x_hi - x_lo) * width
        py = height - (y - y_lo) / (y_hi - y_lo) * height
        return round(px, 2), round(py, 2)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]

    if data is not None:
        labels = data.labels if data.labels is not None else np.zeros(data.n_samples, int)
        classes = sorted(int(v) for v in np.unique(labels))
        for ci, label in enumerate(classes):
            color = PALETTE[ci % len(PALETTE)]
            for i in np.nonzero(labels == label)[0]:
                px, py = to_px(data.points[0, i], data.points[1, i])
                parts.append(
                    f'<circle class="data" cx="{px}" cy="{py}" r="2" '
                    f'fill="{color}" fill-opacity="0.35"/>'
                )

    for mi, s in enumerate(models):
        color = PALETTE[mi % len(PALETTE)]
        for edge in s.hypergraph.edges:
            coords = [to_px(*s.vertices[:, v]) for v in edge]
            if len(edge) == 2:
                (x1, y1), (x2, y2) = coords
                parts.append(
                    f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                    f'stroke="{color}" stroke-width="2"/>'
                )
            elif len(edge) >= 3:
                # Fill the polygon in angular order around its centroid so
                # the outline never self-intersects.
                cx = sum(c[0] for c in coords) / len(coords)
                cy = sum(c[1] for c in coords) / len(coords)
                ordered = sorted(coords, key=lambda c: math.atan2(c[1] - cy, c[0] - cx))
                path = " ".join(f"{x},{y}" for x, y in ordered)
                parts.append(f'<polygon points="{path}" fill="{color}" fill-opacity="0.25"/>')
                for (x1, y1), (x2, y2) in combinations(coords, 2):
                    parts.append(
                        f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                        f'stroke="{color}" stroke-width="1.5"/>'
                    )
        for v in range(s.vertex_count):
            px, py = to_px(*s.vertices[:, v])
            parts.append(f'<circle class="vertex" cx="{px}" cy="{py}" r="3.5" fill="{color}"/>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
