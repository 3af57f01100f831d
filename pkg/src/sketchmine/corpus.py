"""Raw-float sketches, normalization, and corpus ingestion.

The corpus file is a single JSON document:

    {"sketches": [{"primitives": [{"kind": "line", "construction": false,
                                   "params": [x0, y0, x1, y1]}, ...],
                   "constraints": [{"kind": "coincident", "refs": [0, 1],
                                    "param": 1.5?}, ...]}, ...]}

Raw params are pre-normalization floats. ``write_corpus`` emits the same
shape back, adding a "quantized" block per primitive, so re-ingesting the
output (without augmentation) is a no-op.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .errors import DegenerateSketch, ParseError
from .model import (
    CONSTRAINT_ARITY,
    CONSTRAINT_PARAM,
    DEFAULT_QUANT,
    PRIMITIVE_SCHEMAS,
    ConstraintInstance,
    ConstraintKind,
    ParamKind,
    PrimitiveInstance,
    PrimitiveKind,
    QuantizationSpec,
    SketchGraph,
    dequantized_geometry,
)
from .raster import raster_dedup_key


@dataclass(frozen=True)
class RawPrimitive:
    kind: PrimitiveKind
    construction: bool
    params: tuple[float, ...]


@dataclass(frozen=True)
class RawConstraint:
    kind: ConstraintKind
    refs: tuple[int, ...]
    param: Optional[float] = None


@dataclass(frozen=True)
class RawSketch:
    primitives: tuple[RawPrimitive, ...]
    constraints: tuple[RawConstraint, ...]


@dataclass
class IngestReport:
    total: int = 0
    kept: int = 0
    dropped_size: int = 0
    dropped_duplicate: int = 0
    augmented: int = 0
    errors: list[str] = field(default_factory=list)


def _extent_points(p: RawPrimitive) -> list[tuple[float, float]]:
    v = p.params
    if p.kind is PrimitiveKind.LINE:
        return [(v[0], v[1]), (v[2], v[3])]
    if p.kind is PrimitiveKind.POINT:
        return [(v[0], v[1])]
    # circle and arc both contribute the full circle extent
    cx, cy, r = v[0], v[1], v[2]
    return [(cx - r, cy), (cx + r, cy), (cx, cy - r), (cx, cy + r)]


def normalize_transform(
    raw: RawSketch, quant: QuantizationSpec = DEFAULT_QUANT
) -> tuple[float, float, float]:
    """The (cx, cy, scale) mapping raw geometry into the unit square:
    normalized = (value - center) * scale. Identity for input whose scalars
    already sit exactly on bin centers, which makes re-ingesting written
    corpora a no-op."""
    pts = [pt for p in raw.primitives for pt in _extent_points(p)]
    if not pts or not all(math.isfinite(x) and math.isfinite(y) for x, y in pts):
        raise DegenerateSketch("no finite geometry to normalize")
    xs = [x for x, _ in pts]
    ys = [y for _, y in pts]
    cx, cy = (min(xs) + max(xs)) / 2.0, (min(ys) + max(ys)) / 2.0
    half = max(max(xs) - min(xs), max(ys) - min(ys)) / 2.0
    if half == 0.0:
        raise DegenerateSketch("bounding box has zero extent in both axes")
    identity = _quantize_scaled(raw, 0.0, 0.0, 1.0, quant)
    if denormalized_raw(identity, quant) == raw:
        return (0.0, 0.0, 1.0)
    return (cx, cy, 1.0 / half)


def normalize(raw: RawSketch, quant: QuantizationSpec = DEFAULT_QUANT) -> SketchGraph:
    """Center at the origin, scale uniformly into [-1, 1], then quantize.

    Raises DegenerateSketch when the bounding box has zero extent in both
    axes (or when any coordinate is non-finite).
    """
    cx, cy, scale = normalize_transform(raw, quant)
    return _quantize_scaled(raw, cx, cy, scale, quant)


def _quantize_scaled(
    raw: RawSketch, cx: float, cy: float, scale: float, quant: QuantizationSpec
) -> SketchGraph:
    prims = []
    for p in raw.primitives:
        schema = PRIMITIVE_SCHEMAS[p.kind]
        bins = []
        for value, pk in zip(p.params, schema):
            if pk is ParamKind.COORD:
                # x and y coords alternate in every schema that has them
                offset = cx if _is_x_coord(p.kind, len(bins)) else cy
                bins.append(quant.quantize((value - offset) * scale, pk))
            elif pk is ParamKind.LENGTH:
                bins.append(quant.quantize(value * scale, pk))
            else:
                bins.append(quant.quantize(value, pk))
        prims.append(PrimitiveInstance(p.kind, p.construction, tuple(bins)))
    cons = []
    for c in raw.constraints:
        pk = CONSTRAINT_PARAM.get(c.kind)
        param = None
        if c.param is not None and pk is not None:
            value = c.param * scale if pk is ParamKind.LENGTH else c.param
            param = quant.quantize(value, pk)
        cons.append(ConstraintInstance(c.kind, tuple(c.refs), param))
    return SketchGraph(tuple(prims), tuple(cons))


def _is_x_coord(kind: PrimitiveKind, position: int) -> bool:
    # coordinate params come in (x, y) pairs at the front of every schema
    return position % 2 == 0


def shrink(raw: RawSketch, factor: float) -> RawSketch:
    """Scale geometry about the origin; angles are untouched."""
    prims = []
    for p in raw.primitives:
        schema = PRIMITIVE_SCHEMAS[p.kind]
        params = tuple(
            v * factor if pk in (ParamKind.COORD, ParamKind.LENGTH) else v
            for v, pk in zip(p.params, schema)
        )
        prims.append(RawPrimitive(p.kind, p.construction, params))
    cons = []
    for c in raw.constraints:
        pk = CONSTRAINT_PARAM.get(c.kind)
        param = c.param * factor if (c.param is not None and pk is ParamKind.LENGTH) else c.param
        cons.append(RawConstraint(c.kind, c.refs, param))
    return RawSketch(tuple(prims), tuple(cons))


def denormalized_raw(sketch: SketchGraph, quant: QuantizationSpec = DEFAULT_QUANT) -> RawSketch:
    """Raw-float view of a quantized sketch (bin centers as the floats)."""
    prims = tuple(
        RawPrimitive(p.kind, p.construction, dequantized_geometry(p, quant))
        for p in sketch.primitives
    )
    cons = []
    for c in sketch.constraints:
        pk = CONSTRAINT_PARAM.get(c.kind)
        param = quant.dequantize(c.param, pk) if (c.param is not None and pk) else None
        cons.append(RawConstraint(c.kind, c.refs, param))
    return RawSketch(prims, tuple(cons))


# ---------------------------------------------------------------------------
# JSON corpus format
# ---------------------------------------------------------------------------


def _raw_sketch_from_obj(obj: dict, where: str) -> RawSketch:
    try:
        prims = []
        for j, po in enumerate(obj.get("primitives", [])):
            kind = PrimitiveKind(po["kind"])
            params = tuple(float(v) for v in po["params"])
            if len(params) != len(PRIMITIVE_SCHEMAS[kind]):
                raise ParseError(
                    f"{kind.value} expects {len(PRIMITIVE_SCHEMAS[kind])} params, got {len(params)}",
                    f"{where}.primitives[{j}]",
                )
            prims.append(RawPrimitive(kind, bool(po.get("construction", False)), params))
        cons = []
        n = len(prims)
        for j, co in enumerate(obj.get("constraints", [])):
            kind = ConstraintKind(co["kind"])
            refs = tuple(int(r) for r in co["refs"])
            if len(refs) != CONSTRAINT_ARITY[kind]:
                raise ParseError(
                    f"{kind.value} expects {CONSTRAINT_ARITY[kind]} refs, got {len(refs)}",
                    f"{where}.constraints[{j}]",
                )
            if any(not (0 <= r < n) for r in refs):
                raise ParseError("constraint ref out of range", f"{where}.constraints[{j}]")
            param = co.get("param")
            cons.append(RawConstraint(kind, refs, None if param is None else float(param)))
        return RawSketch(tuple(prims), tuple(cons))
    except ParseError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"malformed record: {exc}", where) from exc


def load_raw_corpus(path: str) -> list[RawSketch]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", path) from exc
    if not isinstance(doc, dict) or "sketches" not in doc:
        raise ParseError('corpus document must contain a "sketches" list', path)
    return [
        _raw_sketch_from_obj(obj, f"{path}:sketches[{i}]")
        for i, obj in enumerate(doc["sketches"])
    ]


def sketch_to_obj(raw: RawSketch, quantized: Optional[SketchGraph] = None) -> dict:
    prims = []
    for j, p in enumerate(raw.primitives):
        po = {
            "kind": p.kind.value,
            "construction": p.construction,
            "params": list(p.params),
        }
        if quantized is not None:
            q = quantized.primitives[j]
            po["quantized"] = list(q.params)
        prims.append(po)
    cons = []
    for j, c in enumerate(raw.constraints):
        co = {"kind": c.kind.value, "refs": list(c.refs)}
        if c.param is not None:
            co["param"] = c.param
        if quantized is not None and quantized.constraints[j].param is not None:
            co["quantized_param"] = quantized.constraints[j].param
        cons.append(co)
    return {"primitives": prims, "constraints": cons}


def write_corpus(path: str, entries: list[tuple[RawSketch, SketchGraph]]) -> None:
    doc = {
        "schema_version": 1,
        "sketches": [sketch_to_obj(raw, q) for raw, q in entries],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


# ---------------------------------------------------------------------------
# Ingestion pipeline
# ---------------------------------------------------------------------------


def ingest_corpus(
    raw_sketches: list[RawSketch],
    size_min: int = 20,
    size_max: int = 50,
    dedup: bool = True,
    augment: bool = False,
    augment_copies: int = 1,
    augment_range: tuple[float, float] = (0.5, 0.8),
    seed: int = 0,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> tuple[list[SketchGraph], IngestReport]:
    """Normalize, size-filter, dedup, and optionally augment a raw corpus.

    Order is deterministic: output follows input order, augmented copies
    directly after their original. Duplicate resolution keeps the first
    occurrence (by raster key) in that order.
    """
    report = IngestReport(total=len(raw_sketches))
    rng = random.Random(seed)
    seen: set[int] = set()
    out: list[SketchGraph] = []

    for idx, raw in enumerate(raw_sketches):
        candidates: list[tuple[RawSketch, bool]] = [(raw, False)]
        if augment:
            try:
                base = denormalized_raw(normalize(raw, quant), quant)
            except DegenerateSketch:
                base = None
            if base is not None:
                for _ in range(augment_copies):
                    factor = rng.uniform(*augment_range)
                    candidates.append((shrink(base, factor), True))
        for cand, is_aug in candidates:
            try:
                if is_aug:
                    # the copy is deliberately smaller than the square;
                    # quantize as-is instead of rescaling it back up
                    sketch = _quantize_scaled(cand, 0.0, 0.0, 1.0, quant)
                else:
                    sketch = normalize(cand, quant)
            except DegenerateSketch as exc:
                report.errors.append(f"sketches[{idx}]: {exc}")
                continue
            if not (size_min <= sketch.n_elements <= size_max):
                report.dropped_size += 1
                continue
            if dedup:
                _, key = raster_dedup_key(sketch, quant)
                if key in seen:
                    report.dropped_duplicate += 1
                    continue
                seen.add(key)
            out.append(sketch)
            if is_aug:
                report.augmented += 1
            else:
                report.kept += 1
    return out, report


def ingest_corpus_file(path: str, **kwargs) -> tuple[list[SketchGraph], IngestReport]:
    return ingest_corpus(load_raw_corpus(path), **kwargs)


# ---------------------------------------------------------------------------
# Constraint scalar recovery
# ---------------------------------------------------------------------------


def _line_dir(g: tuple[float, ...]) -> tuple[float, float]:
    dx, dy = g[2] - g[0], g[3] - g[1]
    n = math.hypot(dx, dy) or 1.0
    return dx / n, dy / n


def recompute_constraint_params(
    sketch: SketchGraph, quant: QuantizationSpec = DEFAULT_QUANT
) -> SketchGraph:
    """Fill missing scalar parameters of constraints from primitive geometry.

    Scalars are deducible from the primitives (distance between parallel
    lines, line length, radius, ...), so they are never generated; this
    post-process reconstitutes them. Existing values are left alone.
    """
    cons = []
    for c in sketch.constraints:
        pk = CONSTRAINT_PARAM.get(c.kind)
        if pk is None or c.param is not None:
            cons.append(c)
            continue
        value = _deduce_scalar(sketch, c, quant)
        param = None if value is None else quant.quantize(value, pk)
        cons.append(ConstraintInstance(c.kind, c.refs, param))
    return SketchGraph(sketch.primitives, tuple(cons))


def _deduce_scalar(sketch: SketchGraph, c: ConstraintInstance, quant: QuantizationSpec):
    geoms = [dequantized_geometry(sketch.primitives[r], quant) for r in c.refs]
    kinds = [sketch.primitives[r].kind for r in c.refs]
    if c.kind is ConstraintKind.LENGTH and kinds[0] is PrimitiveKind.LINE:
        g = geoms[0]
        return math.hypot(g[2] - g[0], g[3] - g[1])
    if c.kind is ConstraintKind.RADIUS and kinds[0] in (PrimitiveKind.CIRCLE, PrimitiveKind.ARC):
        return geoms[0][2]
    if c.kind is ConstraintKind.DIAMETER and kinds[0] in (PrimitiveKind.CIRCLE, PrimitiveKind.ARC):
        return 2.0 * geoms[0][2]
    if c.kind is ConstraintKind.DISTANCE:
        if kinds[0] is PrimitiveKind.LINE and kinds[1] is PrimitiveKind.LINE:
            # perpendicular distance from the second line's start to the first line
            dx, dy = _line_dir(geoms[0])
            px, py = geoms[1][0] - geoms[0][0], geoms[1][1] - geoms[0][1]
            return abs(px * -dy + py * dx)
        a = _center_of(kinds[0], geoms[0])
        b = _center_of(kinds[1], geoms[1])
        return math.hypot(a[0] - b[0], a[1] - b[1])
    if c.kind is ConstraintKind.ANGLE and kinds[0] is PrimitiveKind.LINE and kinds[1] is PrimitiveKind.LINE:
        ax, ay = _line_dir(geoms[0])
        bx, by = _line_dir(geoms[1])
        return math.atan2(ax * by - ay * bx, ax * bx + ay * by) % (2.0 * math.pi)
    return None


def _center_of(kind: PrimitiveKind, g: tuple[float, ...]) -> tuple[float, float]:
    if kind is PrimitiveKind.LINE:
        return ((g[0] + g[2]) / 2.0, (g[1] + g[3]) / 2.0)
    return (g[0], g[1])
