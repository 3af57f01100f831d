"""Codebook dynamics: EMA convergence, decay invariance, dead-code revival,
and quantizing candidate-concept features.

Run: python demos/04_codebook.py
"""

import numpy as np

from sketchmine import assign_and_loss, ema_update, new_codebook, revive_dead
from sketchmine.induction import enumerate_candidates, feature_dim, quantize_candidates
from _shared import planted_corpus

# A constant query pulls its prototype in geometrically (decay 0.99).
book = new_codebook(size=8, dim=4, seed=1)
target = np.array([[0.4, -0.2, 0.7, 0.1]])
code = assign_and_loss(target, book)[0][0]
err0 = np.linalg.norm(book.prototypes[code] - target[0])
for step in (1, 10, 100, 500):
    while book.step < step:
        ema_update(book, target, np.array([code]))
    err = np.linalg.norm(book.prototypes[code] - target[0])
    print(f"step {step:4d}: error ratio {err / err0:.3e}")

# Batches that leave a code unused only deepen its pending decay; the
# prototype ratio is untouched, bit for bit.
before = book.prototypes.copy()
ema_update(book, np.zeros((0, 4)), np.zeros(0, dtype=int))
print("decay-only step keeps prototypes bit-identical:", np.array_equal(book.prototypes, before))

# Dead-code revival fires every 100 batches and donates the worst-served
# recent query to an unused code.
book2 = new_codebook(size=3, dim=2, seed=2)
book2.m = np.array([[0.0, 0.0], [1.0, 0.0], [40.0, 40.0]])
book2.n = np.ones(3)
stream = np.array([[0.1, 0.0], [0.9, 0.0], [5.0, 5.0]])
for step in range(100):
    a, _ = assign_and_loss(stream, book2)
    ema_update(book2, stream, a)
    book2, revived = revive_dead(book2, stream)
    if revived is not None:
        print(f"batch {step}: revived code {revived} with prototype {book2.prototypes[revived]}")

# Structural feature vectors of enumerated candidates can be quantized the
# same way, tracking the diversity of the candidate pool.
corpus = planted_corpus(5, seed=9)
candidates = list(enumerate_candidates(corpus[0]).values())
fbook = new_codebook(size=16, dim=feature_dim(), seed=3)
assignments, loss = quantize_candidates(candidates, fbook)
print(f"{len(candidates)} candidates -> {len(set(assignments))} codes, loss {loss:.2f}")
