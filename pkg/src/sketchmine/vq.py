"""Vector-quantization codebook with EMA prototype updates.

Prototypes are the ratio m_i / n_i of two accumulators. Decay is tracked
lazily as a per-code scale factor, so batches that leave a code unused
shrink its accumulators without touching the stored ratio; the prototype is
then bit-identical across any number of pure-decay steps. Dead codes are
revived periodically by stealing the recent query that is worst served by
the book.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DimensionMismatch

DECAY = 0.99
COMMITMENT_BETA = 1.0
REVIVAL_PERIOD = 100  # batches between dead-code revivals


class Codebook:
    """K prototype vectors with scalar and vector accumulators.

    `n` and `m` expose the effective (decayed) accumulators; internally a
    per-code pending scale keeps the m/n ratio exact for untouched codes.
    """

    def __init__(self, n: np.ndarray, m: np.ndarray, step: int = 0):
        self._n = np.asarray(n, dtype=float).copy()
        self._m = np.asarray(m, dtype=float).copy()
        self._scale = np.ones(len(self._n))
        self.step = step
        self.batches_since_revival = 0
        self.used_since_revival = np.zeros(self.size, dtype=bool)

    @property
    def size(self) -> int:
        return self._m.shape[0]

    @property
    def dim(self) -> int:
        return self._m.shape[1]

    @property
    def n(self) -> np.ndarray:
        return self._scale * self._n

    @n.setter
    def n(self, value):
        self._n = np.asarray(value, dtype=float).copy()
        self._scale = np.ones(len(self._n))

    @property
    def m(self) -> np.ndarray:
        return self._scale[:, None] * self._m

    @m.setter
    def m(self, value):
        self._m = np.asarray(value, dtype=float).copy()

    @property
    def prototypes(self) -> np.ndarray:
        # the pending scale cancels in the ratio, exactly
        return self._m / self._n[:, None]


def new_codebook(size: int = 1000, dim: int = 8, seed: int = 0) -> Codebook:
    """Accumulators start at n=1 and a random unit vector."""
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(size, dim))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    return Codebook(n=np.ones(size), m=m)


def assign_and_loss(
    queries: np.ndarray, book: Codebook, beta: float = COMMITMENT_BETA
) -> tuple[np.ndarray, float]:
    """Nearest-prototype assignment (lowest index wins ties) and the
    quantization loss.

    Without gradients both halves of the commitment objective reduce to the
    same distance, so the loss is (1 + beta) times the mean query-to-
    prototype distance.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    if queries.shape[1] != book.dim:
        raise DimensionMismatch(f"queries have dim {queries.shape[1]}, book has {book.dim}")
    protos = book.prototypes
    d2 = ((queries[:, None, :] - protos[None, :, :]) ** 2).sum(axis=2)
    assignments = np.argmin(d2, axis=1)
    dists = np.sqrt(d2[np.arange(len(queries)), assignments])
    loss = float((1.0 + beta) * dists.mean()) if len(queries) else 0.0
    return assignments, loss


def ema_update(
    book: Codebook, queries: np.ndarray, assignments: np.ndarray, gamma: float = DECAY
) -> Codebook:
    """One accumulator step. Codes with no queries this batch only deepen
    their pending decay, which leaves their prototype untouched."""
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    counts = np.bincount(assignments, minlength=book.size).astype(float)
    touched = counts > 0
    book._scale[~touched] *= gamma
    if np.any(touched):
        sums = np.zeros_like(book._m)
        np.add.at(sums, assignments, queries)
        eff_n = book._scale[touched] * book._n[touched]
        eff_m = book._scale[touched, None] * book._m[touched]
        book._n[touched] = gamma * eff_n + (1.0 - gamma) * counts[touched]
        book._m[touched] = gamma * eff_m + (1.0 - gamma) * sums[touched]
        book._scale[touched] = 1.0
    book.step += 1
    book.batches_since_revival += 1
    book.used_since_revival |= touched
    return book


def revive_dead(
    book: Codebook, recent_queries: np.ndarray, period: int = REVIVAL_PERIOD
) -> tuple[Codebook, int | None]:
    """Every `period` batches, replace one unused code with the recent query
    farthest from its own nearest prototype. Returns the revived index, or
    None when nothing fired."""
    if book.batches_since_revival < period:
        return book, None
    book.batches_since_revival = 0
    unused = np.flatnonzero(~book.used_since_revival)
    book.used_since_revival[:] = False
    if unused.size == 0:
        return book, None
    recent_queries = np.atleast_2d(np.asarray(recent_queries, dtype=float))
    if recent_queries.shape[0] == 0:
        return book, None
    protos = book.prototypes
    d2 = ((recent_queries[:, None, :] - protos[None, :, :]) ** 2).sum(axis=2)
    worst = int(np.argmax(d2.min(axis=1)))
    code = int(unused[0])
    book._n[code] = 1.0
    book._m[code] = recent_queries[worst]
    book._scale[code] = 1.0
    return book, code


# ---------------------------------------------------------------------------
# Checkpoint format: little-endian header (K, d, step as int64) followed by
# row-major float64 blocks for prototypes, n, and m.
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<3q")


def save_codebook(book: Codebook, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(book.size, book.dim, book.step))
        fh.write(book.prototypes.astype("<f8").tobytes())
        fh.write(book.n.astype("<f8").tobytes())
        fh.write(book.m.astype("<f8").tobytes())


def load_codebook(path: str) -> Codebook:
    with open(path, "rb") as fh:
        size, dim, step = _HEADER.unpack(fh.read(_HEADER.size))
        protos = np.frombuffer(fh.read(8 * size * dim), dtype="<f8").reshape(size, dim)
        n = np.frombuffer(fh.read(8 * size), dtype="<f8").copy()
        m = np.frombuffer(fh.read(8 * size * dim), dtype="<f8").reshape(size, dim).copy()
    book = Codebook(n=n, m=m, step=step)
    # prototypes are derived; the stored copy is for external consumers
    assert np.allclose(book.prototypes, protos)
    return book
