"""Data model, quantization, tokenization, rasterization, and ingestion."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchmine.corpus import (
    RawConstraint,
    RawPrimitive,
    RawSketch,
    denormalized_raw,
    ingest_corpus,
    normalize,
    shrink,
)
from sketchmine.errors import DegenerateSketch, InvalidSketch
from sketchmine.model import (
    DEFAULT_QUANT,
    ConstraintInstance,
    ConstraintKind,
    ParamKind,
    PrimitiveInstance,
    PrimitiveKind,
    SketchGraph,
    validate,
)
from sketchmine.raster import RASTER_SIZE, raster_dedup_key, rasterize
from sketchmine.tokens import detokenize, sequence_length, tokenize

from conftest import frame_elements, raw_line, rectangle_sketch_12


class TestQuantization:
    def test_bin_rule_examples(self):
        q = DEFAULT_QUANT
        assert q.quantize(0.0, ParamKind.COORD) == 40
        assert q.quantize(-1.0, ParamKind.COORD) == 0
        assert q.quantize(1.0, ParamKind.COORD) == 79  # clamped top edge
        assert q.bins(ParamKind.COORD) == 80
        assert q.bins(ParamKind.LENGTH) == 20
        assert q.bins(ParamKind.ANGLE) == 30

    def test_dequantize_is_bin_center(self):
        q = DEFAULT_QUANT
        assert q.dequantize(0, ParamKind.COORD) == pytest.approx(-1 + 0.5 * 2 / 80)
        assert q.dequantize(40, ParamKind.COORD) == pytest.approx(0.0125)

    @given(st.floats(min_value=-1, max_value=1, allow_nan=False))
    def test_quantize_roundtrip_fixed_point(self, v):
        q = DEFAULT_QUANT
        b = q.quantize(v, ParamKind.COORD)
        assert q.quantize(q.dequantize(b, ParamKind.COORD), ParamKind.COORD) == b

    @given(
        st.floats(min_value=-1, max_value=1, allow_nan=False),
        st.floats(min_value=-1, max_value=1, allow_nan=False),
    )
    def test_quantize_monotone(self, a, b):
        q = DEFAULT_QUANT
        if a <= b:
            assert q.quantize(a, ParamKind.COORD) <= q.quantize(b, ParamKind.COORD)


class TestNormalize:
    def test_diagonal_line_to_square_corners(self):
        raw = RawSketch((raw_line(0, 0, 10, 10),), ())
        sketch = normalize(raw)
        assert sketch.primitives[0].params == (0, 0, 79, 79)

    def test_bbox_half_width_after_normalize(self):
        # oracle: recompute the bounding box from dequantized geometry
        rng = random.Random(3)
        prims = tuple(
            raw_line(
                rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-40, 40)
            )
            for _ in range(20)
        )
        sketch = normalize(RawSketch(prims, ()))
        raw_back = denormalized_raw(sketch)
        xs, ys = [], []
        for p in raw_back.primitives:
            xs += [p.params[0], p.params[2]]
            ys += [p.params[1], p.params[3]]
        half = max(max(xs) - min(xs), max(ys) - min(ys)) / 2
        assert abs(half - 1.0) <= 2 / 80  # within one bin width

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateSketch):
            normalize(RawSketch((RawPrimitive(PrimitiveKind.POINT, False, (3.0, 4.0)),), ()))

    def test_normalize_idempotent_on_own_output(self):
        sketch = rectangle_sketch_12()
        again = normalize(denormalized_raw(sketch))
        assert again == sketch


class TestValidate:
    def test_wellformed_rectangle_ok(self):
        assert validate(rectangle_sketch_12()) == []

    def test_arity_mismatch(self):
        s = SketchGraph(
            (PrimitiveInstance(PrimitiveKind.POINT, False, (0, 0)),),
            (ConstraintInstance(ConstraintKind.COINCIDENT, (0,)),),
        )
        assert any("arity mismatch" in v for v in validate(s))

    def test_ref_out_of_range(self):
        s = SketchGraph(
            (PrimitiveInstance(PrimitiveKind.POINT, False, (0, 0)),),
            (ConstraintInstance(ConstraintKind.HORIZONTAL, (1,)),),
        )
        assert any("out of range" in v for v in validate(s))

    def test_param_bin_out_of_range(self):
        s = SketchGraph((PrimitiveInstance(PrimitiveKind.POINT, False, (0, 99)),), ())
        assert any("out of range" in v for v in validate(s))


class TestTokenize:
    def test_empty_sketch(self):
        toks = tokenize(SketchGraph((), ()))
        assert [t.tag for t in toks] == ["START", "END"]

    def test_line_and_horizontal_layout(self):
        s = SketchGraph(
            (PrimitiveInstance(PrimitiveKind.LINE, False, (0, 0, 79, 79)),),
            (ConstraintInstance(ConstraintKind.HORIZONTAL, (0,)),),
        )
        toks = tokenize(s)
        assert [t.tag for t in toks] == ["START", "PRIM", "PARAM", "NEW", "CONSTR", "REF", "END"]
        # the ref token carries the position of the line's type token
        assert toks[5].value == 1

    def test_rectangle_token_count_formula(self):
        s = rectangle_sketch_12()
        toks = tokenize(s)
        # layout rule: START + END + 2 per primitive + (1 + arity) per
        # constraint + one NEW between consecutive elements
        expected = 2 + 2 * 4 + sum(1 + len(c.refs) for c in s.constraints) + (s.n_elements - 1)
        assert len(toks) == expected == sequence_length(s)

    def test_invalid_sketch_raises(self):
        s = SketchGraph((), (ConstraintInstance(ConstraintKind.HORIZONTAL, (0,)),))
        with pytest.raises(InvalidSketch):
            tokenize(s)

    def test_roundtrip_injective(self):
        from conftest import random_quantized_sketch

        rng = random.Random(5)
        for _ in range(25):
            s = random_quantized_sketch(rng)
            if validate(s):
                continue
            # constraint scalar params are not part of the token layout
            stripped = SketchGraph(
                s.primitives,
                tuple(ConstraintInstance(c.kind, c.refs) for c in s.constraints),
            )
            assert detokenize(tokenize(stripped)) == stripped


class TestRaster:
    def test_empty_all_zero(self):
        bitmap, _ = raster_dedup_key(SketchGraph((), ()))
        assert not bitmap.any()

    def test_constraint_permutation_invariant(self):
        s = rectangle_sketch_12()
        flipped = SketchGraph(s.primitives, tuple(reversed(s.constraints)))
        assert raster_dedup_key(s)[1] == raster_dedup_key(flipped)[1]

    def test_full_width_line_single_row(self):
        s = normalize(RawSketch((raw_line(-1, 0, 1, 0),), ()))
        bitmap = rasterize(s)
        rows = np.flatnonzero(bitmap.any(axis=1))
        assert list(rows) == [64]
        assert bitmap[64].sum() > RASTER_SIZE // 2

    def test_geometry_change_changes_hash(self):
        a = normalize(RawSketch((raw_line(-1, 0, 1, 0), raw_line(-1, -1, -1, 1)), ()))
        b = normalize(RawSketch((raw_line(-1, 0.2, 1, 0.2), raw_line(-1, -1, -1, 1)), ()))
        assert raster_dedup_key(a)[1] != raster_dedup_key(b)[1]


def _sized_sketch(n_extra_points: int, jitter: float = 0.0) -> RawSketch:
    prims, cons = frame_elements(w=1.0 + jitter, h=0.7)
    for i in range(n_extra_points):
        prims.append(
            RawPrimitive(PrimitiveKind.POINT, False, (0.1 * i + jitter, -0.2 * i))
        )
    return RawSketch(tuple(prims), tuple(cons))


class TestIngest:
    def test_duplicates_dropped_keep_first(self):
        raws = [_sized_sketch(10)] * 3
        kept, report = ingest_corpus(raws)
        assert len(kept) == 1
        assert report.kept == 1 and report.dropped_duplicate == 2

    def test_size_filter(self):
        small = _sized_sketch(9)  # 10 elements + 9 points = 19
        assert small.primitives and len(small.primitives) + len(small.constraints) == 19
        kept, report = ingest_corpus([small])
        assert kept == [] and report.dropped_size == 1

    def test_size_bounds_inclusive(self):
        lo = _sized_sketch(10)  # exactly 20 elements
        kept, _ = ingest_corpus([lo])
        assert len(kept) == 1

    def test_shrink_definition_exact(self):
        raw = RawSketch((raw_line(-1, -1, 1, 1),), ())
        assert shrink(raw, 0.5).primitives[0].params == (-0.5, -0.5, 0.5, 0.5)

    def test_augment_emits_shrunk_copy(self):
        base = _sized_sketch(10)
        kept, report = ingest_corpus(
            [base], augment=True, augment_range=(0.5, 0.5), seed=1
        )
        assert report.kept == 1 and report.augmented == 1
        orig, aug = kept
        g0 = denormalized_raw(orig).primitives[0].params
        g1 = denormalized_raw(aug).primitives[0].params
        for v0, v1 in zip(g0, g1):
            assert abs(v1 - 0.5 * v0) <= 2 / 80

    def test_ingest_idempotent(self):
        rng = random.Random(9)
        raws = [_sized_sketch(12, jitter=0.01 * i) for i in range(5)]
        first, _ = ingest_corpus(raws)
        second, report = ingest_corpus([denormalized_raw(s) for s in first])
        assert second == first
        assert report.dropped_duplicate == 0

    def test_malformed_record_location(self, tmp_path):
        from sketchmine.corpus import load_raw_corpus
        from sketchmine.errors import ParseError
        import json

        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "sketches": [
                        {"primitives": [], "constraints": []},
                        {"primitives": [{"kind": "line", "params": [0, 0]}], "constraints": []},
                    ]
                }
            )
        )
        with pytest.raises(ParseError) as exc:
            load_raw_corpus(str(path))
        assert "sketches[1]" in str(exc.value)

    def test_vq_over_candidate_features(self):
        from sketchmine.induction import enumerate_candidates, quantize_candidates, feature_dim
        from sketchmine.vq import new_codebook

        sketch = _sized_sketch(10)
        from sketchmine.corpus import normalize

        candidates = list(enumerate_candidates(normalize(sketch)).values())
        assert candidates
        book = new_codebook(size=8, dim=feature_dim(), seed=3)
        assignments, loss = quantize_candidates(candidates, book)
        assert len(assignments) == len(candidates)
        assert loss > 0
