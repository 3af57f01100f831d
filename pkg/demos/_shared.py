"""Small synthetic-corpus builders shared by the demo scripts."""

import math
import random

from sketchmine import (
    ConstraintKind,
    PrimitiveKind,
    RawConstraint,
    RawPrimitive,
    RawSketch,
    normalize,
)


def frame(cx=0.0, cy=0.0, w=1.0, h=0.6):
    """A rectangle frame: four chained lines, one perpendicularity, one
    parallelism. The recurring motif every demo plants."""
    x0, x1 = cx - w / 2, cx + w / 2
    y0, y1 = cy - h / 2, cy + h / 2
    prims = [
        RawPrimitive(PrimitiveKind.LINE, False, (x0, y0, x1, y0)),
        RawPrimitive(PrimitiveKind.LINE, False, (x1, y0, x1, y1)),
        RawPrimitive(PrimitiveKind.LINE, False, (x1, y1, x0, y1)),
        RawPrimitive(PrimitiveKind.LINE, False, (x0, y1, x0, y0)),
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


def _noise_primitive(rng):
    kind = rng.choice(list(PrimitiveKind))
    x, y = rng.uniform(-3, 3), rng.uniform(-3, 3)
    if kind is PrimitiveKind.POINT:
        return RawPrimitive(kind, False, (x, y))
    if kind is PrimitiveKind.CIRCLE:
        return RawPrimitive(kind, False, (x, y, rng.uniform(0.1, 0.8)))
    if kind is PrimitiveKind.LINE:
        return RawPrimitive(kind, False, (x, y, x + rng.uniform(-1, 1), y + rng.uniform(-1, 1)))
    return RawPrimitive(
        kind, False,
        (x, y, rng.uniform(0.1, 0.8), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)),
    )


def planted_sketch(rng, noise_elements=14):
    prims, cons = frame(
        rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
        rng.uniform(0.8, 2.0), rng.uniform(0.5, 1.5),
    )
    budget = noise_elements
    while budget > 0:
        if budget >= 3 and rng.random() < 0.4:
            a = len(prims)
            prims += [_noise_primitive(rng), _noise_primitive(rng)]
            cons.append(
                RawConstraint(
                    rng.choice((ConstraintKind.EQUAL, ConstraintKind.CONCENTRIC, ConstraintKind.TANGENT)),
                    (a, a + 1),
                )
            )
            budget -= 3
        else:
            prims.append(_noise_primitive(rng))
            budget -= 1
    return normalize(RawSketch(tuple(prims), tuple(cons)))


def planted_corpus(n=40, seed=7):
    rng = random.Random(seed)
    return [planted_sketch(rng) for _ in range(n)]
