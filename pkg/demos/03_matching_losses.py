"""Scoring a decomposition against a target sketch.

The cost matrix combines unary (type + parameter cross-entropy) and binary
(reference-weighted) terms; optimal assignment yields the reconstruction
loss, and two extra terms score reference sharpness and outward-argument
usage. Weights: 50/1 inside the cost matrix, 1/20/1/25 across the totals.

Run: python demos/03_matching_losses.py
"""

import random

from sketchmine import builtin_library, parse_sketch
from sketchmine.induction import induce_library
from sketchmine.matching import (
    decomposition_to_generated,
    loss_bias,
    loss_sharp,
    loss_total,
    match_graphs,
    score_decomposition,
)
from _shared import planted_corpus

corpus = planted_corpus(20, seed=5)
lib = induce_library(corpus, budget=4000)
sketch = corpus[0]

# A lossless parse reconstructs the sketch exactly: reconstruction and
# sharpness vanish; the bias term counts cross-concept references.
result = parse_sketch(sketch, lib)
losses = score_decomposition(result.decomposition, lib, sketch)
print("parse losses:", {k: round(v, 6) for k, v in losses.items()})

# The same sketch parsed against the builtin-only library still reconstructs
# exactly, but every constraint routes through wrapper arguments, which the
# bias term now charges.
trivial = parse_sketch(sketch, builtin_library())
losses_trivial = score_decomposition(trivial.decomposition, builtin_library(), sketch)
print("builtin-only parse:", {k: round(v, 4) for k, v in losses_trivial.items()})

# Matching internals: the assignment and the per-side cost components.
generated, R = decomposition_to_generated(result.decomposition, lib)
match, recon = match_graphs(generated, R, sketch)
n_matched = int((match.sigma >= 0).sum())
print(
    f"{len(generated)} generated slots cover {sketch.n_elements} targets "
    f"({n_matched} matched), matched cost {match.matched_cost:.2e}"
)
print("loss_total(1, 1, 1, 1) =", loss_total(1, 1, 1, 1))
