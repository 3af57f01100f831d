"""Data pipeline walkthrough: normalization, quantization, tokens, dedup.

Run: python demos/01_data_pipeline.py
"""

import random

from sketchmine import (
    PrimitiveKind,
    RawPrimitive,
    RawSketch,
    ingest_corpus,
    normalize,
    raster_dedup_key,
    tokenize,
)
from _shared import planted_sketch

# A raw line in arbitrary units. Normalization centers the sketch, scales it
# uniformly into the [-1, 1] square, and quantizes every scalar to bins
# (80 coordinate bins, 20 length bins, 30 angle bins).
raw = RawSketch((RawPrimitive(PrimitiveKind.LINE, False, (0.0, 0.0, 10.0, 10.0)),), ())
sketch = normalize(raw)
print("diagonal line quantized to bins:", sketch.primitives[0].params)

# Tokens: START, per-element groups separated by NEW, END. Reference tokens
# carry the sequence position of the referenced primitive's type token.
rng = random.Random(1)
sample = planted_sketch(rng)
tokens = tokenize(sample)
print(f"sample sketch: {sample.n_elements} elements, {len(tokens)} tokens")
print("first tokens:", [(t.tag, t.value) for t in tokens[:6]])

# Raster dedup: a 128x128 bitmap of the sampled curves; the hash ignores
# constraints entirely, so duplicates differing only in constraint order
# collapse onto one key.
bitmap, key = raster_dedup_key(sample)
print(f"raster bitmap {bitmap.shape}, {int(bitmap.sum())} pixels set, key 0x{key:016x}")

# Ingestion: size filter [20, 50], first-wins dedup, optional shrink
# augmentation with factors in [0.5, 0.8].
from sketchmine.corpus import denormalized_raw

raws = [denormalized_raw(planted_sketch(rng)) for _ in range(6)]
raws.append(raws[0])  # a duplicate
kept, report = ingest_corpus(raws, augment=True, seed=3)
print(
    f"ingest: {report.total} in, {report.kept} kept, {report.augmented} augmented, "
    f"{report.dropped_duplicate} duplicate, {report.dropped_size} size-filtered"
)
