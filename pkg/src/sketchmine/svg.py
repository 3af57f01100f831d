"""SVG rendering with stable per-concept colors.

The palette is indexed by library position so the same concept gets the
same color in every sketch, and the studio client mirrors this table.
"""

from __future__ import annotations

import math
from typing import Optional

from .model import (
    DEFAULT_QUANT,
    PrimitiveKind,
    QuantizationSpec,
    SketchGraph,
    dequantized_geometry,
)

PALETTE = (
    "#e6194b",
    "#3cb44b",
    "#4363d8",
    "#f58231",
    "#911eb4",
    "#42d4f4",
    "#f032e6",
    "#bfef45",
    "#fabed4",
    "#469990",
    "#9a6324",
    "#800000",
)
UNASSIGNED_COLOR = "#888888"


def concept_color(library_index: Optional[int]) -> str:
    if library_index is None or library_index < 0:
        return UNASSIGNED_COLOR
    return PALETTE[library_index % len(PALETTE)]


def render_svg(
    sketch: SketchGraph,
    primitive_concepts: Optional[list[Optional[int]]] = None,
    quant: QuantizationSpec = DEFAULT_QUANT,
    size: int = 512,
) -> str:
    """Concept-colored SVG of a normalized sketch."""
    concepts = primitive_concepts or [None] * len(sketch.primitives)

    def sx(x):
        return (x + 1.1) / 2.2 * size

    def sy(y):
        return (1.1 - y) / 2.2 * size

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for p, cid in zip(sketch.primitives, concepts):
        g = dequantized_geometry(p, quant)
        color = concept_color(cid)
        dash = ' stroke-dasharray="6 4"' if p.construction else ""
        style = f'stroke="{color}" stroke-width="2" fill="none"{dash}'
        if p.kind is PrimitiveKind.LINE:
            parts.append(
                f'<line x1="{sx(g[0]):.2f}" y1="{sy(g[1]):.2f}" '
                f'x2="{sx(g[2]):.2f}" y2="{sy(g[3]):.2f}" {style}/>'
            )
        elif p.kind is PrimitiveKind.POINT:
            parts.append(
                f'<circle cx="{sx(g[0]):.2f}" cy="{sy(g[1]):.2f}" r="3" fill="{color}"/>'
            )
        elif p.kind is PrimitiveKind.CIRCLE:
            r = g[2] / 2.2 * size
            parts.append(
                f'<circle cx="{sx(g[0]):.2f}" cy="{sy(g[1]):.2f}" r="{r:.2f}" {style}/>'
            )
        elif p.kind is PrimitiveKind.ARC:
            cx, cy, r, a0, a1 = g
            sweep = (a1 - a0) % (2 * math.pi) or 2 * math.pi
            pts = []
            n = max(8, int(sweep / 0.1))
            for k in range(n + 1):
                a = a0 + sweep * k / n
                pts.append(f"{sx(cx + r * math.cos(a)):.2f},{sy(cy + r * math.sin(a)):.2f}")
            parts.append(f'<polyline points="{" ".join(pts)}" {style}/>')
    parts.append("</svg>")
    return "".join(parts)
