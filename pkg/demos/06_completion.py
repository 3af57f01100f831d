"""Concept-based auto-completion.

Masks a suffix of a sketch, then finishes the partially present concept:
the top candidate appends exactly the concept's missing elements, with
geometry filled by snapping and direction heuristics.

Run: python demos/06_completion.py
"""

import random

from sketchmine import complete_sketch, evaluate, synthesize_partial
from sketchmine.cli import completion_curves
from sketchmine.induction import induce_library
from _shared import frame, planted_corpus
from sketchmine import RawSketch, normalize

corpus = planted_corpus(30, seed=11)
lib = induce_library(corpus, budget=5000)

# A rectangle with one side missing.
prims, cons = frame(w=1.4, h=0.9)
partial = normalize(
    RawSketch(tuple(prims[:3]), tuple(c for c in cons if all(r < 3 for r in c.refs)))
)
print(f"partial: {partial.n_elements} elements")
candidates = complete_sketch(partial, lib, top_k=3)
for rank, cand in enumerate(candidates):
    added = [partial and cand.sketch.primitives[i].kind.value for i in cand.added_primitives]
    cons_added = [cand.sketch.constraints[i].kind.value for i in cand.added_constraints]
    print(f"#{rank}: concept {cand.concept_id}, score {cand.score}, adds {added} + {cons_added}")

# Protocol-style masking: remove a suffix of the primitive list plus the
# constraints that reference it, then complete and score the top candidate
# against the original.
full = corpus[0]
masked = synthesize_partial(full, ratio=0.3, seed=1)
print(
    f"masked {len(masked.removed_primitives)} primitives and "
    f"{len(masked.removed_constraints)} constraints at ratio {masked.ratio}"
)
completed = complete_sketch(masked.sketch, lib, top_k=1)
if completed:
    report = evaluate(completed[0].sketch, full)
    print(f"top-1 vs original: primitive F {report.primitive_f:.3f}, "
          f"constraint F {report.constraint_f:.3f}")

# Per-ratio curves over a small slice of the corpus.
print("ratio, primitive F, constraint F")
for ratio, pf, cf in completion_curves(corpus[:8], lib):
    print(f"{ratio:.1f}, {pf:.3f}, {cf:.3f}")
