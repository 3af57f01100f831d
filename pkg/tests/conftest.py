"""Shared builders: a fixed 10-element frame concept, planted corpora, and
random sketch generators used across the suite."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from sketchmine.concepts import (
    N_ARGS,
    N_SLOTS,
    ConceptInstance,
    ConceptLibrary,
    ConceptType,
    SketchDecomposition,
    builtin_library,
)
from sketchmine.corpus import RawConstraint, RawPrimitive, RawSketch, normalize
from sketchmine.model import (
    CONSTRAINT_ARITY,
    ConstraintInstance,
    ConstraintKind,
    PrimitiveInstance,
    PrimitiveKind,
    SketchGraph,
)


def raw_line(x0, y0, x1, y1, construction=False):
    return RawPrimitive(PrimitiveKind.LINE, construction, (x0, y0, x1, y1))


def frame_elements(cx=0.0, cy=0.0, w=1.0, h=0.6):
    """The fixed 10-element planted structure: a rectangle frame.

    Four lines chained by coincidence plus one perpendicularity and one
    parallelism; no element references anything outside the group.
    """
    x0, x1 = cx - w / 2, cx + w / 2
    y0, y1 = cy - h / 2, cy + h / 2
    prims = [
        raw_line(x0, y0, x1, y0),
        raw_line(x1, y0, x1, y1),
        raw_line(x1, y1, x0, y1),
        raw_line(x0, y1, x0, y0),
    ]
    cons = [
        RawConstraint(ConstraintKind.COINCIDENT, (0, 1)),
        RawConstraint(ConstraintKind.COINCIDENT, (1, 2)),
        RawConstraint(ConstraintKind.COINCIDENT, (2, 3)),
        RawConstraint(ConstraintKind.COINCIDENT, (3, 0)),
        RawConstraint(ConstraintKind.PERPENDICULAR, (0, 1)),
        RawConstraint(ConstraintKind.PARALLEL, (0, 2)),
    ]
    return prims, cons


def rectangle_sketch_12(cx=0.0, cy=0.0, w=1.2, h=0.8, distance_param=0.8):
    """Frame plus Distance and Horizontal: the 12-element variant."""
    prims, cons = frame_elements(cx, cy, w, h)
    cons = cons + [
        RawConstraint(ConstraintKind.DISTANCE, (0, 2), distance_param),
        RawConstraint(ConstraintKind.HORIZONTAL, (0,)),
    ]
    return normalize(RawSketch(tuple(prims), tuple(cons)))


_NOISE_KINDS = (
    PrimitiveKind.POINT,
    PrimitiveKind.CIRCLE,
    PrimitiveKind.LINE,
    PrimitiveKind.ARC,
)


def _noise_primitive(rng: random.Random) -> RawPrimitive:
    kind = rng.choice(_NOISE_KINDS)
    x, y = rng.uniform(-3, 3), rng.uniform(-3, 3)
    if kind is PrimitiveKind.POINT:
        return RawPrimitive(kind, False, (x, y))
    if kind is PrimitiveKind.CIRCLE:
        return RawPrimitive(kind, False, (x, y, rng.uniform(0.1, 0.8)))
    if kind is PrimitiveKind.LINE:
        return RawPrimitive(kind, False, (x, y, x + rng.uniform(-1, 1), y + rng.uniform(-1, 1)))
    return RawPrimitive(
        kind,
        False,
        (x, y, rng.uniform(0.1, 0.8), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)),
    )


def planted_sketch(rng: random.Random, noise_elements=None, blob_only=False) -> SketchGraph:
    """Planted frame first, then self-contained noise elements."""
    prims, cons = frame_elements(
        rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0), rng.uniform(0.5, 1.5)
    )
    if noise_elements is None:
        noise_elements = rng.randint(10, 30)
    n_noise_prims = 0
    noise_cons = []
    budget = noise_elements
    while budget > 0:
        # small self-contained blobs: pairs with one constraint, or singles
        if budget >= 3 and (blob_only or rng.random() < 0.35):
            a = len(prims)
            prims.append(_noise_primitive(rng))
            prims.append(_noise_primitive(rng))
            kind = rng.choice(
                (ConstraintKind.EQUAL, ConstraintKind.CONCENTRIC, ConstraintKind.TANGENT)
            )
            noise_cons.append(RawConstraint(kind, (a, a + 1)))
            budget -= 3
            n_noise_prims += 2
        else:
            prims.append(_noise_primitive(rng))
            budget -= 1
            n_noise_prims += 1
    cons = cons + noise_cons
    return normalize(RawSketch(tuple(prims), tuple(cons)))


def planted_corpus(n: int, seed: int = 7) -> list[SketchGraph]:
    rng = random.Random(seed)
    return [planted_sketch(rng) for _ in range(n)]


def planted_sketch_frame_last(rng: random.Random, noise_elements=12) -> SketchGraph:
    """Noise first, planted frame last, so suffix masking cuts the frame."""
    frame_prims, frame_cons = frame_elements(
        rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0), rng.uniform(0.5, 1.5)
    )
    prims = []
    noise_cons = []
    budget = noise_elements
    while budget > 0:
        if budget >= 3 and rng.random() < 0.35:
            a = len(prims)
            prims.append(_noise_primitive(rng))
            prims.append(_noise_primitive(rng))
            kind = rng.choice(
                (ConstraintKind.EQUAL, ConstraintKind.CONCENTRIC, ConstraintKind.TANGENT)
            )
            noise_cons.append(RawConstraint(kind, (a, a + 1)))
            budget -= 3
        else:
            prims.append(_noise_primitive(rng))
            budget -= 1
    offset = len(prims)
    prims += frame_prims
    cons = noise_cons + [
        RawConstraint(c.kind, tuple(r + offset for r in c.refs), c.param) for c in frame_cons
    ]
    return normalize(RawSketch(tuple(prims), tuple(cons)))


@pytest.fixture(scope="session")
def small_planted_corpus():
    return planted_corpus(30, seed=11)


# ---------------------------------------------------------------------------
# Random concept structures and decompositions (for transport and key tests)
# ---------------------------------------------------------------------------

_PRIM_CHOICES = tuple(PrimitiveKind)
_CONS_CHOICES = tuple(ConstraintKind)


def random_hard_concept(rng: random.Random, n_prims=None, n_cons=None) -> ConceptType:
    """Random hard structure: primitives first, constraints binding inward,
    outward args allowed, inward args optional."""
    if n_prims is None:
        n_prims = rng.randint(1, 4)
    if n_cons is None:
        n_cons = rng.randint(0, min(5, N_SLOTS - n_prims))
    slots = [rng.choice(_PRIM_CHOICES) for _ in range(n_prims)]
    slots += [rng.choice(_CONS_CHOICES) for _ in range(n_cons)]
    slots += [None] * (N_SLOTS - len(slots))
    m = np.zeros((2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS))
    used_out = set()
    for k in range(n_cons):
        slot = n_prims + k
        arity = CONSTRAINT_ARITY[slots[slot]]
        for r in range(arity):
            if rng.random() < 0.25:
                arg = rng.randrange(N_ARGS)
                m[2 * slot + r, N_SLOTS + arg] = 1.0
                used_out.add(arg)
            else:
                target = rng.randrange(n_prims)
                m[2 * slot + r, target] = 1.0
    for a in range(rng.randint(0, N_ARGS)):
        m[2 * N_SLOTS + a, rng.randrange(n_prims)] = 1.0
    return ConceptType(tuple(slots), m)


def random_primitive(rng: random.Random, kind: PrimitiveKind) -> PrimitiveInstance:
    from sketchmine.model import DEFAULT_QUANT, PRIMITIVE_SCHEMAS

    bins = tuple(rng.randrange(DEFAULT_QUANT.bins(pk)) for pk in PRIMITIVE_SCHEMAS[kind])
    return PrimitiveInstance(kind, rng.random() < 0.1, bins)


def random_hard_decomposition(
    rng: random.Random, n_instances=3
) -> tuple[SketchDecomposition, ConceptLibrary]:
    lib = builtin_library()
    instances = []
    for _ in range(n_instances):
        t = random_hard_concept(rng)
        tid = lib.add(t)
        params = []
        for slot in t.slots:
            params.append(random_primitive(rng, slot) if isinstance(slot, PrimitiveKind) else None)
        instances.append(ConceptInstance(tid, tuple(params)))
    size = n_instances * N_ARGS
    rs = np.zeros((size, size))
    for i in range(n_instances):
        for a in range(N_ARGS):
            if rng.random() < 0.8:
                choices = [
                    (j, b)
                    for j in range(n_instances)
                    if j != i
                    for b in range(N_ARGS)
                ]
                j, b = rng.choice(choices)
                rs[i * N_ARGS + a, j * N_ARGS + b] = 1.0
    return SketchDecomposition(tuple(instances), rs), lib


def random_quantized_sketch(rng: random.Random, n_prims=4, n_cons=4) -> SketchGraph:
    prims = tuple(
        random_primitive(rng, rng.choice(_PRIM_CHOICES)) for _ in range(n_prims)
    )
    cons = []
    for _ in range(n_cons):
        kind = rng.choice(_CONS_CHOICES)
        refs = tuple(rng.randrange(n_prims) for _ in range(CONSTRAINT_ARITY[kind]))
        cons.append(ConstraintInstance(kind, refs))
    return SketchGraph(prims, tuple(cons))
