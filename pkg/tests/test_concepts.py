"""Concept structures: validation, expansion, reference transport, assembly.

The two hand-built fixtures mirror a classic composition: a pair of arc
caps attached to a rectangular frame through interface arguments.
"""

import random

import numpy as np
import pytest

from sketchmine.concepts import (
    N_ARGS,
    N_SLOTS,
    ConceptInstance,
    ConceptType,
    SketchDecomposition,
    assemble_sketch,
    builtin_library,
    compose_cross_refs,
    expand_instance,
    library_from_obj,
    library_to_obj,
    structure_mask,
    validate_concept_type,
)
from sketchmine.model import (
    CONSTRAINT_ARITY,
    ConstraintKind,
    PrimitiveInstance,
    PrimitiveKind,
)

from conftest import random_hard_decomposition, random_primitive


def arc_cap_concept() -> ConceptType:
    """Arc + tangent + two coincidences; both constraint tails leave
    through outward arguments."""
    slots = (
        PrimitiveKind.ARC,
        ConstraintKind.TANGENT,
        ConstraintKind.COINCIDENT,
        ConstraintKind.COINCIDENT,
    ) + (None,) * (N_SLOTS - 4)
    m = np.zeros((2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS))
    m[2, 0] = 1.0  # tangent ref0 -> arc
    m[3, N_SLOTS + 0] = 1.0  # tangent ref1 -> outward arg 0
    m[4, 0] = 1.0
    m[5, N_SLOTS + 0] = 1.0
    m[6, 0] = 1.0
    m[7, N_SLOTS + 1] = 1.0
    return ConceptType(slots, m)


def frame_concept_12() -> ConceptType:
    """Four lines, four coincidences, perpendicular, parallel, distance,
    horizontal; two inward arguments expose lines 1 and 0."""
    slots = (PrimitiveKind.LINE,) * 4 + (ConstraintKind.COINCIDENT,) * 4 + (
        ConstraintKind.PERPENDICULAR,
        ConstraintKind.PARALLEL,
        ConstraintKind.DISTANCE,
        ConstraintKind.HORIZONTAL,
    )
    m = np.zeros((2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS))
    bindings = {
        4: (0, 3),
        5: (0, 2),
        6: (1, 2),
        7: (1, 3),
        8: (1, 2),
        9: (2, 3),
        10: (2, 3),
        11: (3,),
    }
    for slot, refs in bindings.items():
        for r, target in enumerate(refs):
            m[2 * slot + r, target] = 1.0
    m[2 * N_SLOTS + 0, 1] = 1.0  # inward arg 0 -> line 1
    m[2 * N_SLOTS + 1, 0] = 1.0  # inward arg 1 -> line 0
    return ConceptType(slots, m)


def _instance(lib, concept, rng):
    tid = lib.add(concept)
    params = tuple(
        random_primitive(rng, s) if isinstance(s, PrimitiveKind) else None
        for s in concept.slots
    )
    return ConceptInstance(tid, params)


def cap_frame_decomposition(rng=None):
    rng = rng or random.Random(0)
    lib = builtin_library()
    i0 = _instance(lib, arc_cap_concept(), rng)
    i1 = ConceptInstance(i0.type_id, _instance(lib, arc_cap_concept(), rng).params)
    lib.concepts.pop()  # both caps share one concept type
    lib.counts.pop()
    lib.gains.pop()
    i2 = _instance(lib, frame_concept_12(), rng)
    rs = np.zeros((3 * N_ARGS, 3 * N_ARGS))
    rs[0, 2 * N_ARGS + 1] = 1.0  # cap0 arg0 -> frame inward 1
    rs[1, 2 * N_ARGS + 0] = 1.0  # cap0 arg1 -> frame inward 0
    rs[2, 2 * N_ARGS + 0] = 1.0  # cap1 arg0 -> frame inward 0
    rs[3, 2 * N_ARGS + 1] = 1.0  # cap1 arg1 -> frame inward 1
    return SketchDecomposition((i0, i1, i2), rs), lib


class TestValidation:
    def test_frame_concept_ok(self):
        assert validate_concept_type(frame_concept_12()) == []
        assert validate_concept_type(arc_cap_concept()) == []

    def test_masked_diagonal_violation(self):
        t = arc_cap_concept()
        bad = t.matrix.copy()
        bad[2, 1] = bad[2, 0]
        bad[2, 0] = 0.0  # tangent ref0 -> itself (slot 1, rows 2..3, col 1)
        violations = validate_concept_type(ConceptType(t.slots, bad))
        assert any("masked" in v for v in violations)

    def test_reference_to_null_slot(self):
        slots = (PrimitiveKind.LINE, ConstraintKind.HORIZONTAL) + (None,) * (N_SLOTS - 2)
        m = np.zeros((2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS))
        m[2, 5] = 1.0  # horizontal ref -> null slot 5
        violations = validate_concept_type(ConceptType(slots, m))
        assert any("non-primitive" in v for v in violations)

    def test_mask_shape(self):
        mask = structure_mask()
        assert mask.shape == (2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS)
        assert mask[0, 0] and mask[1, 0] and not mask[2, 0]
        assert mask[2 * N_SLOTS, N_SLOTS]


class TestExpand:
    def test_arc_cap_elements(self):
        rng = random.Random(1)
        lib = builtin_library()
        inst = _instance(lib, arc_cap_concept(), rng)
        elements, block = expand_instance(inst, lib)
        assert len(elements) == 4
        assert isinstance(elements[0].element, PrimitiveInstance)
        # in-concept references: all three constraints point at the arc
        assert block[2, 0] == 1.0 and block[4, 0] == 1.0 and block[6, 0] == 1.0
        # outward tails are not part of the in-concept block
        assert block[3].sum() == 0.0 and block[5].sum() == 0.0

    def test_all_null_concept_empty(self):
        lib = builtin_library()
        elements, _ = expand_instance(ConceptInstance(0, (None,) * N_SLOTS), lib)
        assert elements == []

    def test_single_line_no_refs(self):
        rng = random.Random(2)
        lib = builtin_library()
        slots = (PrimitiveKind.LINE,) + (None,) * (N_SLOTS - 1)
        t = ConceptType(slots, np.zeros((2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS)))
        inst = _instance(lib, t, rng)
        elements, block = expand_instance(inst, lib)
        assert len(elements) == 1
        assert block.sum() == 0.0


def walk_reference(decomp, lib, i, slot, r):
    """Oracle: resolve one reference by explicitly walking
    ref -> outward arg -> cross edge -> inward arg -> primitive slot."""
    t = lib.get(decomp.instances[i].type_id)
    n = t.n_slots
    row = t.matrix[2 * slot + r]
    if row.sum() == 0:
        return None
    col = int(np.argmax(row))
    if col < n:
        return (i, col)
    arg = col - n
    rs_row = decomp.cross_matrix[i * N_ARGS + arg]
    if rs_row.sum() == 0:
        return None
    tcol = int(np.argmax(rs_row))
    j, b = tcol // N_ARGS, tcol % N_ARGS
    tj = lib.get(decomp.instances[j].type_id)
    in_row = tj.matrix[2 * n + b]
    if in_row.sum() == 0:
        return None
    return (j, int(np.argmax(in_row)))


def transport_matches_walk(decomp, lib) -> bool:
    R = compose_cross_refs(decomp, lib)
    n = lib.get(decomp.instances[0].type_id).n_slots
    for i, inst in enumerate(decomp.instances):
        t = lib.get(inst.type_id)
        for slot in range(n):
            if not t.slot_is_constraint(slot):
                continue
            for r in range(CONSTRAINT_ARITY[t.slots[slot]]):
                row = R[i * 2 * n + 2 * slot + r]
                expected = walk_reference(decomp, lib, i, slot, r)
                if expected is None:
                    if row.sum() != 0:
                        return False
                else:
                    j, s = expected
                    if row[j * n + s] != 1.0 or row.sum() != 1.0:
                        return False
    return True


class TestTransport:
    def test_three_hop_product_example(self):
        decomp, lib = cap_frame_decomposition()
        R = compose_cross_refs(decomp, lib)
        # cap0 tangent ref1 -> arg0 -> frame inward 1 -> frame slot 0
        assert R[3, 2 * N_SLOTS + 0] == 1.0

    def test_soft_cross_splits_mass(self):
        decomp, lib = cap_frame_decomposition()
        rs = decomp.cross_matrix.copy()
        rs[0] = 0.0
        rs[0, 2 * N_ARGS + 0] = 0.5
        rs[0, 2 * N_ARGS + 1] = 0.5
        soft = SketchDecomposition(decomp.instances, rs)
        R = compose_cross_refs(soft, lib)
        assert R[3, 2 * N_SLOTS + 0] == pytest.approx(0.5)
        assert R[3, 2 * N_SLOTS + 1] == pytest.approx(0.5)

    def test_walk_oracle_on_random_decompositions(self):
        rng = random.Random(42)
        for _ in range(100):
            decomp, lib = random_hard_decomposition(rng, n_instances=rng.randint(2, 4))
            assert transport_matches_walk(decomp, lib)

    def test_row_stochastic_preserved_soft(self):
        rng = np.random.default_rng(7)
        decomp, lib = cap_frame_decomposition()
        soft_instances = []
        types = []
        for inst in decomp.instances:
            t = lib.get(inst.type_id)
            m = t.matrix.copy()
            n = t.n_slots
            prim_cols = [s for s in range(n) if t.slot_is_primitive(s)]
            for slot in range(n):
                if not t.slot_is_constraint(slot):
                    continue
                for r in t.ref_rows(slot):
                    w = rng.random(len(prim_cols) + N_ARGS)
                    w /= w.sum()
                    m[r] = 0.0
                    for k, c in enumerate(prim_cols):
                        m[r, c] = w[k]
                    m[r, n:] = w[len(prim_cols):]
            for a in range(N_ARGS):
                w = rng.random(len(prim_cols))
                w /= w.sum()
                m[2 * n + a] = 0.0
                for k, c in enumerate(prim_cols):
                    m[2 * n + a, c] = w[k]
            soft = ConceptType(t.slots, m)
            types.append(lib.add(soft))
            soft_instances.append(ConceptInstance(types[-1], inst.params))
        size = len(soft_instances) * N_ARGS
        rs = np.zeros((size, size))
        for i in range(len(soft_instances)):
            for a in range(N_ARGS):
                cols = [
                    j * N_ARGS + b
                    for j in range(len(soft_instances))
                    if j != i
                    for b in range(N_ARGS)
                ]
                w = rng.random(len(cols))
                w /= w.sum()
                for k, c in enumerate(cols):
                    rs[i * N_ARGS + a, c] = w[k]
        soft_decomp = SketchDecomposition(tuple(soft_instances), rs)
        R = compose_cross_refs(soft_decomp, lib)
        n = N_SLOTS
        for i, tid in enumerate(types):
            t = lib.get(tid)
            for slot in range(n):
                if not t.slot_is_constraint(slot):
                    continue
                for r in t.ref_rows(slot):
                    assert R[i * 2 * n + r].sum() == pytest.approx(1.0, abs=1e-9)

    def test_masked_entries_stay_zero(self):
        decomp, lib = cap_frame_decomposition()
        R = compose_cross_refs(decomp, lib)
        assert np.all(R >= 0)


class TestAssemble:
    def test_cap_frame_program(self):
        decomp, lib = cap_frame_decomposition()
        result = assemble_sketch(decomp, lib)
        sketch = result.sketch
        assert result.dropped == []
        kinds = [p.kind for p in sketch.primitives]
        assert kinds.count(PrimitiveKind.ARC) == 2
        assert kinds.count(PrimitiveKind.LINE) == 4
        by_kind = {}
        for c in sketch.constraints:
            by_kind[c.kind] = by_kind.get(c.kind, 0) + 1
        assert by_kind[ConstraintKind.TANGENT] == 2
        assert by_kind[ConstraintKind.COINCIDENT] == 8
        assert by_kind[ConstraintKind.PERPENDICULAR] == 1
        assert by_kind[ConstraintKind.PARALLEL] == 1
        assert by_kind[ConstraintKind.DISTANCE] == 1
        assert by_kind[ConstraintKind.HORIZONTAL] == 1
        # cap 0 tangent: arc 0 against frame line exposed via inward arg 1
        tangent0 = sketch.constraints[0]
        assert tangent0.kind is ConstraintKind.TANGENT
        assert tangent0.refs == (0, 2)  # arc0, frame slot0 line (global 2)
        assert len(result.provenance.primitives) == 6
        assert len(result.provenance.constraints) == 14

    def test_single_instance_matches_expand(self):
        rng = random.Random(3)
        lib = builtin_library()
        inst = _instance(lib, frame_concept_12(), rng)
        rs = np.zeros((N_ARGS, N_ARGS))
        decomp = SketchDecomposition((inst,), rs)
        result = assemble_sketch(decomp, lib)
        assert result.dropped == []
        elements, _ = expand_instance(inst, lib)
        prims = [e.element for e in elements if isinstance(e.element, PrimitiveInstance)]
        assert list(sketch_prims := result.sketch.primitives) == prims
        assert len(result.sketch.constraints) == 8

    def test_unbound_chain_dropped_with_report(self):
        decomp, lib = cap_frame_decomposition()
        rs = decomp.cross_matrix.copy()
        rs[0] = 0.0  # cap0 arg0 now unbound
        broken = SketchDecomposition(decomp.instances, rs)
        result = assemble_sketch(broken, lib)
        # tangent and one coincident of cap0 lose their second reference
        assert len(result.dropped) == 2
        by_kind = {}
        for c in result.sketch.constraints:
            by_kind[c.kind] = by_kind.get(c.kind, 0) + 1
        assert by_kind[ConstraintKind.TANGENT] == 1
        assert by_kind[ConstraintKind.COINCIDENT] == 7


class TestLibraryIO:
    def test_roundtrip(self):
        decomp, lib = cap_frame_decomposition()
        obj = library_to_obj(lib)
        back = library_from_obj(obj)
        assert len(back) == len(lib)
        assert back.n_builtin == lib.n_builtin
        for a, b in zip(lib.concepts, back.concepts):
            assert a.slots == b.slots
            assert np.array_equal(a.matrix, b.matrix)
