"""Rasterization of normalized sketches for duplicate detection.

Primitives are sampled along their curves at a fixed step of 1/128 of the
square width and plotted into a 128x128 binary image over [-1, 1]^2.
Constraints never touch the bitmap, so sketches that differ only in
constraints collide on purpose. The dedup key is a 64-bit FNV-1a hash of the
row-major bit stream.
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    DEFAULT_QUANT,
    PrimitiveInstance,
    PrimitiveKind,
    QuantizationSpec,
    SketchGraph,
    dequantized_geometry,
)

RASTER_SIZE = 128

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _pixel(v: float) -> int:
    return min(max(int(math.floor((v + 1.0) / 2.0 * RASTER_SIZE)), 0), RASTER_SIZE - 1)


def _plot(bitmap: np.ndarray, x: float, y: float) -> None:
    bitmap[_pixel(y), _pixel(x)] = True


def rasterize(sketch: SketchGraph, quant: QuantizationSpec = DEFAULT_QUANT) -> np.ndarray:
    """128x128 boolean image of a normalized sketch (construction included)."""
    bitmap = np.zeros((RASTER_SIZE, RASTER_SIZE), dtype=bool)
    step = 2.0 / RASTER_SIZE  # arc-length step in world units

    for p in sketch.primitives:
        g = dequantized_geometry(p, quant)
        if p.kind is PrimitiveKind.POINT:
            _plot(bitmap, g[0], g[1])
        elif p.kind is PrimitiveKind.LINE:
            x0, y0, x1, y1 = g
            length = math.hypot(x1 - x0, y1 - y0)
            n = max(1, int(math.ceil(length / step)))
            for k in range(n + 1):
                t = k / n
                _plot(bitmap, x0 + (x1 - x0) * t, y0 + (y1 - y0) * t)
        elif p.kind is PrimitiveKind.CIRCLE:
            cx, cy, r = g
            n = max(8, int(math.ceil(2.0 * math.pi * r / step)))
            for k in range(n):
                a = 2.0 * math.pi * k / n
                _plot(bitmap, cx + r * math.cos(a), cy + r * math.sin(a))
        elif p.kind is PrimitiveKind.ARC:
            cx, cy, r, a0, a1 = g
            sweep = (a1 - a0) % (2.0 * math.pi)
            if sweep == 0.0:
                sweep = 2.0 * math.pi
            n = max(2, int(math.ceil(r * sweep / step)))
            for k in range(n + 1):
                a = a0 + sweep * k / n
                _plot(bitmap, cx + r * math.cos(a), cy + r * math.sin(a))
    return bitmap


def raster_dedup_key(sketch: SketchGraph, quant: QuantizationSpec = DEFAULT_QUANT) -> tuple[np.ndarray, int]:
    """Bitmap plus a stable 64-bit hash of its bits."""
    bitmap = rasterize(sketch, quant)
    packed = np.packbits(bitmap, axis=None).tobytes()
    return bitmap, _fnv1a64(packed)
