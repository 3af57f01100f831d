"""Reconstruction F-scores, modularity, and library statistics.

Primitives are put in correspondence by optimal assignment on unary bin
distances (type mismatch costs infinity); a matched pair is correct when the
types agree, the construction flags agree, and every scalar bin differs by
at most 10% of its quantization levels. A constraint is correct when its
type matches and each of its references maps onto the corresponding target
reference through a correct primitive pair. Constraint scalar parameters are
deducible from geometry and are not scored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .concepts import Provenance
from .matching import solve_assignment
from .model import DEFAULT_QUANT, QuantizationSpec, SketchGraph

_BIG = 1e15  # sentinel for forbidden pairs; keeps the solver feasible


@dataclass
class Correspondence:
    """generated primitive index -> target primitive index (or -1), with the
    subset of pairs that count as correct."""

    mapping: np.ndarray
    correct_pairs: set[tuple[int, int]] = field(default_factory=set)

    def target_of(self, gen_index: int) -> int:
        return int(self.mapping[gen_index]) if gen_index < len(self.mapping) else -1


@dataclass
class EvalReport:
    primitive_f: float
    constraint_f: float
    primitive_precision: float
    primitive_recall: float
    constraint_precision: float
    constraint_recall: float
    modularity_percent: Optional[float] = None
    counts: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "primitive_f": self.primitive_f,
            "constraint_f": self.constraint_f,
            "primitive_precision": self.primitive_precision,
            "primitive_recall": self.primitive_recall,
            "constraint_precision": self.constraint_precision,
            "constraint_recall": self.constraint_recall,
            "modularity_percent": self.modularity_percent,
            "counts": self.counts,
        }


def _f(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if (p + r) > 0 else 0.0


def primitive_correspondence(
    generated: SketchGraph,
    target: SketchGraph,
    tolerance_fraction: float = 0.1,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> Correspondence:
    """Assignment of generated to target primitives on unary bin distances."""
    n_gen, n_tgt = len(generated.primitives), len(target.primitives)
    mapping = np.full(n_gen, -1, dtype=int)
    corr = Correspondence(mapping)
    if n_gen == 0 or n_tgt == 0:
        return corr
    cost = np.full((n_gen, n_tgt), _BIG)
    for i, g in enumerate(generated.primitives):
        for j, t in enumerate(target.primitives):
            if g.kind is not t.kind:
                continue
            d = float(np.abs(np.array(g.params) - np.array(t.params)).sum())
            d += 0.0 if g.construction == t.construction else quant.coord_bins
            cost[i, j] = d
    rows, cols = solve_assignment(cost)
    for i, j in zip(rows, cols):
        if cost[i, j] >= _BIG:
            continue
        mapping[i] = j
        g, t = generated.primitives[i], target.primitives[j]
        if g.construction != t.construction:
            continue
        ok = True
        for gb, tb, pk in zip(g.params, t.params, g.schema()):
            if abs(gb - tb) > math.floor(tolerance_fraction * quant.bins(pk)):
                ok = False
                break
        if ok:
            corr.correct_pairs.add((i, j))
    return corr


def _constraint_signatures(sketch: SketchGraph, prim_map) -> list[tuple]:
    sigs = []
    for c in sketch.constraints:
        sigs.append((c.kind, tuple(prim_map(r) for r in c.refs)))
    return sigs


def fscore(
    generated: SketchGraph,
    target: SketchGraph,
    tolerance_fraction: float = 0.1,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> tuple[float, float, Correspondence, list[int]]:
    """Primitive and constraint F-scores plus the primitive correspondence.

    The last return value lists, for each generated constraint, the target
    constraint it was credited with (or -1), matched in index order among
    equal signatures.
    """
    corr = primitive_correspondence(generated, target, tolerance_fraction, quant)
    correct_of_gen = {i: j for i, j in corr.correct_pairs}

    def gen_ref_map(r: int) -> int:
        return correct_of_gen.get(r, -1)

    gen_sigs = _constraint_signatures(generated, gen_ref_map)
    tgt_sigs = _constraint_signatures(target, lambda r: r)

    available: dict[tuple, list[int]] = {}
    for j, sig in enumerate(tgt_sigs):
        available.setdefault(sig, []).append(j)
    credited = []
    n_correct = 0
    for sig in gen_sigs:
        bucket = available.get(sig)
        if bucket and all(t >= 0 for t in sig[1]):
            credited.append(bucket.pop(0))
            n_correct += 1
        else:
            credited.append(-1)

    n_prim_correct = len(corr.correct_pairs)
    pp = n_prim_correct / len(generated.primitives) if generated.primitives else 0.0
    pr = n_prim_correct / len(target.primitives) if target.primitives else 0.0
    cp = n_correct / len(generated.constraints) if generated.constraints else 0.0
    cr = n_correct / len(target.constraints) if target.constraints else 0.0
    if not generated.primitives and not target.primitives:
        pp = pr = 1.0
    if not generated.constraints and not target.constraints:
        cp = cr = 1.0
    return _f(pp, pr), _f(cp, cr), corr, credited


def modularity(
    generated: SketchGraph,
    provenance: Provenance,
    credited: list[int],
) -> Optional[float]:
    """Percentage of correct constraints whose references stay inside their
    own concept instance. Undefined (None) when nothing is correct."""
    correct = [gi for gi, t in enumerate(credited) if t >= 0]
    if not correct:
        return None
    inside = 0
    for gi in correct:
        inst, _ = provenance.constraints[gi]
        c = generated.constraints[gi]
        if all(provenance.primitives[r][0] == inst for r in c.refs):
            inside += 1
    return 100.0 * inside / len(correct)


def evaluate(
    generated: SketchGraph,
    target: SketchGraph,
    provenance: Optional[Provenance] = None,
    tolerance_fraction: float = 0.1,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> EvalReport:
    pf, cf, corr, credited = fscore(generated, target, tolerance_fraction, quant)
    mod = modularity(generated, provenance, credited) if provenance else None
    n_prim_correct = len(corr.correct_pairs)
    n_cons_correct = sum(1 for t in credited if t >= 0)
    pp = n_prim_correct / len(generated.primitives) if generated.primitives else 1.0
    pr = n_prim_correct / len(target.primitives) if target.primitives else 1.0
    cp = n_cons_correct / len(generated.constraints) if generated.constraints else 1.0
    cr = n_cons_correct / len(target.constraints) if target.constraints else 1.0
    return EvalReport(
        primitive_f=pf,
        constraint_f=cf,
        primitive_precision=pp,
        primitive_recall=pr,
        constraint_precision=cp,
        constraint_recall=cr,
        modularity_percent=mod,
        counts={
            "generated_primitives": len(generated.primitives),
            "target_primitives": len(target.primitives),
            "generated_constraints": len(generated.constraints),
            "target_constraints": len(target.constraints),
            "correct_primitives": n_prim_correct,
            "correct_constraints": n_cons_correct,
        },
    )


def library_stats(lib, parses: list) -> dict:
    """Per-concept usage (sorted descending) and a complexity histogram of
    non-null slot counts."""
    usage = [0] * len(lib.concepts)
    for res in parses:
        for inst in res.decomposition.instances:
            if lib.concepts[inst.type_id].n_elements > 0 or inst.type_id == 0:
                usage[inst.type_id] += 1
    order = sorted(range(len(usage)), key=lambda i: (-usage[i], i))
    histogram: dict[int, int] = {}
    for t in lib.concepts:
        histogram[t.n_elements] = histogram.get(t.n_elements, 0) + 1
    return {
        "usage": [{"type_id": i, "count": usage[i]} for i in order],
        "complexity_histogram": dict(sorted(histogram.items())),
    }
