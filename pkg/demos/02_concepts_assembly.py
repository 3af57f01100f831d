"""Concept structures: slots, argument interfaces, reference transport.

Builds the classic composition by hand: two arc caps attached to a
rectangular frame through interface arguments, then expands it back into a
flat sketch graph.

Run: python demos/02_concepts_assembly.py
"""

import numpy as np

from sketchmine import (
    ConceptInstance,
    ConceptType,
    ConstraintKind,
    PrimitiveInstance,
    PrimitiveKind,
    SketchDecomposition,
    assemble_sketch,
    builtin_library,
    compose_cross_refs,
    validate_concept_type,
)
from sketchmine.concepts import N_ARGS, N_SLOTS

# Arc cap: one arc, a tangent and two coincidences whose far ends exit
# through the two outward arguments.
cap_slots = (
    PrimitiveKind.ARC,
    ConstraintKind.TANGENT,
    ConstraintKind.COINCIDENT,
    ConstraintKind.COINCIDENT,
) + (None,) * (N_SLOTS - 4)
cap = np.zeros((2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS))
cap[2, 0] = cap[4, 0] = cap[6, 0] = 1.0  # first refs stay on the arc
cap[3, N_SLOTS] = cap[5, N_SLOTS] = 1.0  # tangent/coincident exit via arg 0
cap[7, N_SLOTS + 1] = 1.0  # second coincident exits via arg 1
cap_type = ConceptType(cap_slots, cap)
print("cap validates:", validate_concept_type(cap_type) == [])

# Frame: four lines closed by coincidences, with two inward arguments that
# expose lines 0 and 1 to the outside.
frame_slots = (PrimitiveKind.LINE,) * 4 + (ConstraintKind.COINCIDENT,) * 4 + (None,) * 4
frame = np.zeros((2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS))
for slot, (a, b) in {4: (0, 1), 5: (1, 2), 6: (2, 3), 7: (3, 0)}.items():
    frame[2 * slot, a] = frame[2 * slot + 1, b] = 1.0
frame[2 * N_SLOTS + 0, 1] = 1.0
frame[2 * N_SLOTS + 1, 0] = 1.0
frame_type = ConceptType(frame_slots, frame)

lib = builtin_library()
cap_id = lib.add(cap_type)
frame_id = lib.add(frame_type)


def arc(cx, cy):
    return PrimitiveInstance(PrimitiveKind.ARC, False, (cx, cy, 5, 0, 15))


def line(i):
    return PrimitiveInstance(PrimitiveKind.LINE, False, (10 * i, 5, 10 * i + 5, 70))


cap0 = ConceptInstance(cap_id, (arc(10, 40),) + (None,) * (N_SLOTS - 1))
cap1 = ConceptInstance(cap_id, (arc(70, 40),) + (None,) * (N_SLOTS - 1))
frame_inst = ConceptInstance(frame_id, tuple(line(i) for i in range(4)) + (None,) * (N_SLOTS - 4))

# Cross matrix: outward argument of one instance -> inward argument of
# another. Both caps plug into the frame's two exposed lines.
rs = np.zeros((3 * N_ARGS, 3 * N_ARGS))
rs[0, 2 * N_ARGS + 1] = 1.0  # cap0 arg0 -> frame inward 1 (line 0)
rs[1, 2 * N_ARGS + 0] = 1.0  # cap0 arg1 -> frame inward 0 (line 1)
rs[2, 2 * N_ARGS + 0] = 1.0
rs[3, 2 * N_ARGS + 1] = 1.0
decomp = SketchDecomposition((cap0, cap1, frame_inst), rs)

# The full reference matrix is the product of three transports:
# constraint row -> outward arg -> cross edge -> inward arg -> primitive.
R = compose_cross_refs(decomp, lib)
print("cap0 tangent second ref resolves to column", int(np.argmax(R[3])), "(frame line 0)")

result = assemble_sketch(decomp, lib)
sketch = result.sketch
print(f"assembled: {len(sketch.primitives)} primitives, {len(sketch.constraints)} constraints")
for c in sketch.constraints[:3]:
    print("  ", c.kind.value, "->", c.refs)
print("dropped references:", result.dropped)
