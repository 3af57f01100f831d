"""Core sketch data model.

A sketch is an ordered list of geometric primitives plus an ordered list of
constraints whose references are indices into the primitive list. All scalar
parameters are stored as quantized bin indices; the raw-float side of the
world lives in :mod:`sketchmine.corpus`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional


class PrimitiveKind(str, Enum):
    LINE = "line"
    CIRCLE = "circle"
    POINT = "point"
    ARC = "arc"


class ParamKind(str, Enum):
    COORD = "coord"
    LENGTH = "length"
    ANGLE = "angle"


# Parameter schema per primitive kind. The construction flag is carried
# separately on the instance and is not part of the quantized params.
PRIMITIVE_SCHEMAS: dict[PrimitiveKind, tuple[ParamKind, ...]] = {
    PrimitiveKind.LINE: (ParamKind.COORD,) * 4,  # start_x, start_y, end_x, end_y
    PrimitiveKind.CIRCLE: (ParamKind.COORD, ParamKind.COORD, ParamKind.LENGTH),
    PrimitiveKind.POINT: (ParamKind.COORD, ParamKind.COORD),
    PrimitiveKind.ARC: (
        ParamKind.COORD,
        ParamKind.COORD,
        ParamKind.LENGTH,
        ParamKind.ANGLE,
        ParamKind.ANGLE,
    ),
}


class ConstraintKind(str, Enum):
    COINCIDENT = "coincident"
    DISTANCE = "distance"
    HORIZONTAL = "horizontal"
    PARALLEL = "parallel"
    VERTICAL = "vertical"
    TANGENT = "tangent"
    LENGTH = "length"
    PERPENDICULAR = "perpendicular"
    EQUAL = "equal"
    DIAMETER = "diameter"
    RADIUS = "radius"
    ANGLE = "angle"
    CONCENTRIC = "concentric"
    NORMAL = "normal"


CONSTRAINT_ARITY: dict[ConstraintKind, int] = {
    ConstraintKind.COINCIDENT: 2,
    ConstraintKind.DISTANCE: 2,
    ConstraintKind.HORIZONTAL: 1,
    ConstraintKind.PARALLEL: 2,
    ConstraintKind.VERTICAL: 1,
    ConstraintKind.TANGENT: 2,
    ConstraintKind.LENGTH: 1,
    ConstraintKind.PERPENDICULAR: 2,
    ConstraintKind.EQUAL: 2,
    ConstraintKind.DIAMETER: 1,
    ConstraintKind.RADIUS: 1,
    ConstraintKind.ANGLE: 2,
    ConstraintKind.CONCENTRIC: 2,
    ConstraintKind.NORMAL: 2,
}

# Scalar parameter slot per constraint kind, None when the kind has none.
CONSTRAINT_PARAM: dict[ConstraintKind, Optional[ParamKind]] = {
    ConstraintKind.DISTANCE: ParamKind.LENGTH,
    ConstraintKind.LENGTH: ParamKind.LENGTH,
    ConstraintKind.DIAMETER: ParamKind.LENGTH,
    ConstraintKind.RADIUS: ParamKind.LENGTH,
    ConstraintKind.ANGLE: ParamKind.ANGLE,
}

PRIMITIVE_KINDS: tuple[PrimitiveKind, ...] = tuple(PrimitiveKind)
CONSTRAINT_KINDS: tuple[ConstraintKind, ...] = tuple(ConstraintKind)


@dataclass(frozen=True)
class QuantizationSpec:
    """Uniform binning of the three scalar kinds.

    bin = clamp(floor((v - lo) / (hi - lo) * n), 0, n - 1); dequantize
    returns the bin center. Angles wrap into [0, 2pi) before binning.
    """

    coord_bins: int = 80
    length_bins: int = 20
    angle_bins: int = 30
    coord_range: tuple[float, float] = (-1.0, 1.0)
    length_range: tuple[float, float] = (0.0, 2.0)
    angle_range: tuple[float, float] = (0.0, 2.0 * math.pi)

    def bins(self, kind: ParamKind) -> int:
        return {
            ParamKind.COORD: self.coord_bins,
            ParamKind.LENGTH: self.length_bins,
            ParamKind.ANGLE: self.angle_bins,
        }[kind]

    def range(self, kind: ParamKind) -> tuple[float, float]:
        return {
            ParamKind.COORD: self.coord_range,
            ParamKind.LENGTH: self.length_range,
            ParamKind.ANGLE: self.angle_range,
        }[kind]

    def quantize(self, value: float, kind: ParamKind) -> int:
        lo, hi = self.range(kind)
        n = self.bins(kind)
        if kind is ParamKind.ANGLE:
            value = value % (2.0 * math.pi)
        raw = math.floor((value - lo) / (hi - lo) * n)
        return min(max(raw, 0), n - 1)

    def dequantize(self, bin_index: int, kind: ParamKind) -> float:
        lo, hi = self.range(kind)
        n = self.bins(kind)
        return lo + (bin_index + 0.5) * (hi - lo) / n


DEFAULT_QUANT = QuantizationSpec()


@dataclass(frozen=True)
class PrimitiveInstance:
    kind: PrimitiveKind
    construction: bool
    params: tuple[int, ...]

    def schema(self) -> tuple[ParamKind, ...]:
        return PRIMITIVE_SCHEMAS[self.kind]


@dataclass(frozen=True)
class ConstraintInstance:
    kind: ConstraintKind
    refs: tuple[int, ...]
    param: Optional[int] = None

    @property
    def arity(self) -> int:
        return CONSTRAINT_ARITY[self.kind]


@dataclass(frozen=True)
class SketchGraph:
    primitives: tuple[PrimitiveInstance, ...]
    constraints: tuple[ConstraintInstance, ...]

    @property
    def n_elements(self) -> int:
        return len(self.primitives) + len(self.constraints)


def validate(sketch: SketchGraph, quant: QuantizationSpec = DEFAULT_QUANT) -> list[str]:
    """Report structural violations. Never raises; an empty list means ok."""
    violations: list[str] = []
    n = len(sketch.primitives)
    for i, p in enumerate(sketch.primitives):
        schema = PRIMITIVE_SCHEMAS[p.kind]
        if len(p.params) != len(schema):
            violations.append(
                f"primitive {i}: expected {len(schema)} params for {p.kind.value}, got {len(p.params)}"
            )
            continue
        for j, (b, pk) in enumerate(zip(p.params, schema)):
            if not (0 <= b < quant.bins(pk)):
                violations.append(f"primitive {i}: param {j} bin {b} out of range")
    for i, c in enumerate(sketch.constraints):
        arity = CONSTRAINT_ARITY[c.kind]
        if len(c.refs) != arity:
            violations.append(
                f"constraint {i}: arity mismatch for {c.kind.value} (expected {arity}, got {len(c.refs)})"
            )
        for r in c.refs:
            if not (0 <= r < n):
                violations.append(f"constraint {i}: ref {r} out of range")
        pk = CONSTRAINT_PARAM.get(c.kind)
        if c.param is not None:
            if pk is None:
                violations.append(f"constraint {i}: {c.kind.value} carries no scalar parameter")
            elif not (0 <= c.param < quant.bins(pk)):
                violations.append(f"constraint {i}: param bin {c.param} out of range")
    return violations


def dequantized_geometry(p: PrimitiveInstance, quant: QuantizationSpec = DEFAULT_QUANT) -> tuple[float, ...]:
    """Bin-center values of a primitive's parameters, in schema order."""
    return tuple(quant.dequantize(b, pk) for b, pk in zip(p.params, p.schema()))
