"""Cost matrices, optimal assignment, and the induction losses.

Targets index the rows of every cost matrix, generated elements the columns.
A generated element is a distribution over element kinds (plus the empty
kind) and, for each primitive kind, a distribution per parameter; hard
generations are one-hot throughout. All logs are floored at EPS so exact
zeros stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .concepts import (
    N_ARGS,
    N_SLOTS,
    ConceptLibrary,
    SketchDecomposition,
    compose_cross_refs,
)
from .errors import InfeasibleMatch, ShapeMismatch, UnmatchedTarget
from .model import (
    CONSTRAINT_KINDS,
    DEFAULT_QUANT,
    PRIMITIVE_KINDS,
    PRIMITIVE_SCHEMAS,
    ConstraintKind,
    PrimitiveInstance,
    PrimitiveKind,
    QuantizationSpec,
    SketchGraph,
)

EPS = 1e-9

N_KINDS = len(PRIMITIVE_KINDS) + len(CONSTRAINT_KINDS)
NULL_INDEX = N_KINDS  # index of the empty kind in a type distribution

W_UNARY = 50.0
W_BINARY = 1.0
LOSS_WEIGHTS = {"recon": 1.0, "sharp": 20.0, "vq": 1.0, "bias": 25.0}


def kind_index(kind) -> int:
    if isinstance(kind, PrimitiveKind):
        return PRIMITIVE_KINDS.index(kind)
    return len(PRIMITIVE_KINDS) + CONSTRAINT_KINDS.index(kind)


def _segment_sizes(kind: PrimitiveKind, quant: QuantizationSpec) -> list[int]:
    # construction flag first, then one slot per schema parameter
    return [2] + [quant.bins(pk) for pk in PRIMITIVE_SCHEMAS[kind]]


@dataclass
class GeneratedElement:
    """Soft element: kind distribution plus per-kind parameter segments."""

    type_dist: np.ndarray
    param_dists: dict[PrimitiveKind, list[np.ndarray]] = field(default_factory=dict)

    def segment(self, kind: PrimitiveKind, quant: QuantizationSpec = DEFAULT_QUANT):
        if kind not in self.param_dists:
            # unknown segments read as uniform
            self.param_dists[kind] = [
                np.full(n, 1.0 / n) for n in _segment_sizes(kind, quant)
            ]
        return self.param_dists[kind]


def null_element() -> GeneratedElement:
    dist = np.zeros(N_KINDS + 1)
    dist[NULL_INDEX] = 1.0
    return GeneratedElement(dist)


def element_from_primitive(
    p: PrimitiveInstance, quant: QuantizationSpec = DEFAULT_QUANT
) -> GeneratedElement:
    dist = np.zeros(N_KINDS + 1)
    dist[kind_index(p.kind)] = 1.0
    seg = []
    for n, value in zip(_segment_sizes(p.kind, quant), (int(p.construction),) + p.params):
        one = np.zeros(n)
        one[value] = 1.0
        seg.append(one)
    return GeneratedElement(dist, {p.kind: seg})


def element_from_constraint_kind(kind: ConstraintKind) -> GeneratedElement:
    dist = np.zeros(N_KINDS + 1)
    dist[kind_index(kind)] = 1.0
    return GeneratedElement(dist)


def unary_cost_matrix(
    generated: list[GeneratedElement],
    target: SketchGraph,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> np.ndarray:
    """Cross-entropy of each target element under each generated element.

    Parameter terms read the generated segment of the target's kind (type
    casting), summed over the construction flag and every schema parameter.
    Constraint targets contribute the type term only; their scalar
    parameters are deduced from geometry downstream and never scored.
    """
    k_tgt = target.n_elements
    n_gen = len(generated)
    C = np.zeros((k_tgt, n_gen))
    for q, g in enumerate(generated):
        tdist = g.type_dist
        for pi, p in enumerate(target.primitives):
            cost = -np.log(max(tdist[kind_index(p.kind)], EPS))
            seg = g.segment(p.kind, quant)
            values = (int(p.construction),) + p.params
            for dist, v in zip(seg, values):
                cost += -np.log(max(dist[v], EPS))
            C[pi, q] = cost
        for ci, c in enumerate(target.constraints):
            C[len(target.primitives) + ci, q] = -np.log(max(tdist[kind_index(c.kind)], EPS))
    return C


def binary_cost_matrix(c_ury: np.ndarray, R: np.ndarray, target: SketchGraph) -> np.ndarray:
    """Reference-weighted unary costs (zero rows for non-constraint targets)."""
    k_tgt, n_gen = c_ury.shape
    if R.shape != (2 * n_gen, n_gen):
        raise ShapeMismatch(f"reference matrix {R.shape}, expected {(2 * n_gen, n_gen)}")
    C = np.zeros_like(c_ury)
    n_prims = len(target.primitives)
    for ci, c in enumerate(target.constraints):
        p = n_prims + ci
        row = np.zeros(n_gen)
        for r, ref in enumerate(c.refs):
            # R rows 2q+r across all q; skip the term when p.r does not exist
            row += R[r::2] @ c_ury[ref]
        C[p] = row
    return C


@dataclass
class MatchingResult:
    sigma: np.ndarray  # generated index -> target index, -1 for unmatched
    matched_cost: float
    cost: np.ndarray
    c_ury: np.ndarray
    c_bry: np.ndarray

    def inverse(self, k_tgt: int) -> np.ndarray:
        inv = np.full(k_tgt, -1, dtype=int)
        for q, p in enumerate(self.sigma):
            if p >= 0:
                inv[p] = q
        return inv


def solve_assignment(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rectangular optimal assignment covering every row."""
    return linear_sum_assignment(cost)


def match_graphs(
    generated: list[GeneratedElement],
    R: np.ndarray,
    target: SketchGraph,
    w_ury: float = W_UNARY,
    w_bry: float = W_BINARY,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> tuple[MatchingResult, float]:
    """Optimal generated-to-target matching plus the reconstruction loss.

    The reconstruction loss averages the matched cost over all generated
    slots; unmatched slots contribute only their null-type likelihood.
    """
    k_tgt = target.n_elements
    n_gen = len(generated)
    if n_gen < k_tgt:
        raise InfeasibleMatch(f"{n_gen} generated slots cannot cover {k_tgt} targets")
    c_ury = unary_cost_matrix(generated, target, quant)
    c_bry = binary_cost_matrix(c_ury, R, target)
    C = w_ury * c_ury + w_bry * c_bry
    rows, cols = solve_assignment(C)
    sigma = np.full(n_gen, -1, dtype=int)
    for p, q in zip(rows, cols):
        sigma[q] = p
    matched_cost = float(C[rows, cols].sum())
    total = matched_cost
    for q, g in enumerate(generated):
        if sigma[q] < 0:
            total += -np.log(max(g.type_dist[NULL_INDEX], EPS))
    recon = total / n_gen if n_gen else 0.0
    return MatchingResult(sigma, matched_cost, C, c_ury, c_bry), recon


def loss_sharp(R: np.ndarray, result: MatchingResult, target: SketchGraph) -> float:
    """Negative log-likelihood of each matched reference being one-hot."""
    n_prims = len(target.primitives)
    k_tgt = target.n_elements
    inv = result.inverse(k_tgt)
    total = 0.0
    n_cons = len(target.constraints)
    if n_cons == 0:
        return 0.0
    for ci, c in enumerate(target.constraints):
        q = inv[n_prims + ci]
        if q < 0:
            raise UnmatchedTarget(f"target constraint {ci} has no matched generation")
        for r, ref in enumerate(c.refs):
            j = inv[ref]
            if j < 0:
                raise UnmatchedTarget(f"target primitive {ref} has no matched generation")
            total += -np.log(max(R[2 * q + r, j], EPS))
    return total / n_cons


def loss_bias(
    decomp: SketchDecomposition,
    lib: ConceptLibrary,
    result: MatchingResult,
    target: SketchGraph,
) -> float:
    """Accumulated probability of matched constraint references leaving
    their concept through outward arguments."""
    n_prims = len(target.primitives)
    n_cons = len(target.constraints)
    if n_cons == 0:
        return 0.0
    inv = result.inverse(target.n_elements)
    types = [lib.get(inst.type_id) for inst in decomp.instances]
    n = types[0].n_slots if types else N_SLOTS
    total = 0.0
    for ci, c in enumerate(target.constraints):
        q = inv[n_prims + ci]
        if q < 0:
            raise UnmatchedTarget(f"target constraint {ci} has no matched generation")
        inst, slot = q // n, q % n
        m = types[inst].matrix
        for r in range(len(c.refs)):
            total += float(m[2 * slot + r, n : n + N_ARGS].sum())
    return total / n_cons


def loss_total(
    recon: float,
    sharp: float,
    vq: float,
    bias: float,
    weights: Optional[dict] = None,
) -> float:
    w = dict(LOSS_WEIGHTS)
    if weights:
        w.update(weights)
    return w["recon"] * recon + w["sharp"] * sharp + w["vq"] * vq + w["bias"] * bias


# ---------------------------------------------------------------------------
# Decomposition scoring helpers
# ---------------------------------------------------------------------------


def decomposition_to_generated(
    decomp: SketchDecomposition,
    lib: ConceptLibrary,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> tuple[list[GeneratedElement], np.ndarray]:
    """Hard generated elements (instance-major slot order) plus their
    composed reference matrix, ready for the loss pipeline."""
    generated: list[GeneratedElement] = []
    for inst in decomp.instances:
        t = lib.get(inst.type_id)
        for s, slot in enumerate(t.slots):
            if slot is None:
                generated.append(null_element())
            elif isinstance(slot, PrimitiveKind):
                p = inst.params[s]
                generated.append(
                    element_from_primitive(p, quant) if p else null_element()
                )
            else:
                generated.append(element_from_constraint_kind(slot))
    R = compose_cross_refs(decomp, lib)
    return generated, R


def score_decomposition(
    decomp: SketchDecomposition,
    lib: ConceptLibrary,
    target: SketchGraph,
    vq: float = 0.0,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> dict:
    """All loss components of a decomposition against a target sketch."""
    generated, R = decomposition_to_generated(decomp, lib, quant)
    result, recon = match_graphs(generated, R, target, quant=quant)
    sharp = loss_sharp(R, result, target)
    bias = loss_bias(decomp, lib, result, target)
    return {
        "recon": recon,
        "sharp": sharp,
        "vq": vq,
        "bias": bias,
        "total": loss_total(recon, sharp, vq, bias),
    }
