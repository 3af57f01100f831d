"""Concept-based auto-completion.

Partial inputs are synthesized by dropping a suffix of the primitive list
(plus every constraint that references a dropped primitive). Completion
parses the partial, then looks for library concepts that partially match
the still-unexplained elements; each partial match contributes a candidate
that appends the concept's missing elements. Structure is exact by
construction; geometry for the new primitives is filled by constraint
propagation heuristics, in a fixed order: coincidence snapping, direction
constraints, length mirroring, and a reflection fallback.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .concepts import ConceptLibrary, ConceptType
from .corpus import recompute_constraint_params
from .induction import _pattern_order, parse_rank
from .model import (
    DEFAULT_QUANT,
    PRIMITIVE_SCHEMAS,
    ConstraintInstance,
    ConstraintKind,
    PrimitiveInstance,
    PrimitiveKind,
    QuantizationSpec,
    SketchGraph,
    dequantized_geometry,
)

DEFAULT_TOP_K = 5


@dataclass(frozen=True)
class PartialSketch:
    sketch: SketchGraph
    removed_primitives: tuple[int, ...]
    removed_constraints: tuple[int, ...]
    ratio: float


def synthesize_partial(
    sketch: SketchGraph, ratio: Optional[float] = None, seed: int = 0
) -> PartialSketch:
    """Drop the last ceil(ratio * n_primitives) primitives and every
    constraint that references one. Ratio is sampled uniformly from
    (0, 0.5] when not given."""
    rng = random.Random(seed)
    if ratio is None:
        ratio = rng.uniform(1e-9, 0.5)
    n = len(sketch.primitives)
    n_removed = math.ceil(ratio * n)
    keep = n - n_removed
    removed_prims = tuple(range(keep, n))
    kept_cons = []
    removed_cons = []
    for ci, c in enumerate(sketch.constraints):
        if any(r >= keep for r in c.refs):
            removed_cons.append(ci)
        else:
            kept_cons.append(c)
    partial = SketchGraph(sketch.primitives[:keep], tuple(kept_cons))
    return PartialSketch(partial, removed_prims, tuple(removed_cons), ratio)


@dataclass
class CompletionCandidate:
    sketch: SketchGraph
    concept_id: int
    score: float
    added_primitives: list[int] = field(default_factory=list)
    added_constraints: list[int] = field(default_factory=list)
    dropped_refs: int = 0
    # concept attribution per element of `sketch` (None = inherited/unknown)
    primitive_concepts: list[Optional[int]] = field(default_factory=list)
    constraint_concepts: list[Optional[int]] = field(default_factory=list)


def _find_partial_match(
    concept: ConceptType, sketch: SketchGraph, allowed: set[int]
) -> Optional[tuple[dict[int, int], dict[int, int]]]:
    """Largest mapping of a subset of the concept's slots onto `allowed`
    elements, consistent with the concept's internal bindings. Returns
    (slot -> element, outward arg -> element) or None."""
    n_prims = len(sketch.primitives)
    order = _pattern_order(concept)
    bindings: dict[int, list] = {}
    for s in range(concept.n_slots):
        if concept.slot_is_constraint(s):
            refs = []
            for r in concept.ref_rows(s):
                row = concept.matrix[r]
                refs.append(int(np.argmax(row)) if row.sum() > 0 else None)
            bindings[s] = refs

    best: dict = {"mapping": None, "out": None, "size": 0}
    mapping: dict[int, int] = {}
    used: set[int] = set()
    out_binding: dict[int, int] = {}
    budget = {"nodes": 500_000}  # deterministic cap on the skip search

    def candidates(slot):
        kind = concept.slots[slot]
        if isinstance(kind, PrimitiveKind):
            for e in sorted(allowed):
                if e < n_prims and e not in used and sketch.primitives[e].kind is kind:
                    yield e
        else:
            for e in sorted(allowed):
                if e >= n_prims and e not in used and sketch.constraints[e - n_prims].kind is kind:
                    yield e

    def constraint_ok(slot, e, trial_out):
        c = sketch.constraints[e - n_prims]
        refs = bindings[slot]
        if len(c.refs) != len(refs):
            return False
        for r, col in enumerate(refs):
            target = c.refs[r]
            if col is None:
                return False
            if col < concept.n_slots:
                if mapping.get(col) != target:
                    return False
            else:
                arg = col - concept.n_slots
                if arg in trial_out:
                    if trial_out[arg] != target:
                        return False
                elif target in trial_out.values():
                    return False
                else:
                    trial_out[arg] = target
        return True

    def record():
        size = len(mapping)
        if size > best["size"]:
            image = set(mapping.values())
            if any(t in image for t in out_binding.values()):
                return
            if not _mapped_slots_connected(concept, set(mapping)):
                return
            best.update(mapping=dict(mapping), out=dict(out_binding), size=size)

    def backtrack(i):
        budget["nodes"] -= 1
        if budget["nodes"] < 0:
            return
        if i == len(order):
            record()
            return
        slot = order[i]
        kind = concept.slots[slot]
        if kind is None:
            backtrack(i + 1)
            return
        if isinstance(kind, PrimitiveKind):
            for e in candidates(slot):
                mapping[slot] = e
                used.add(e)
                backtrack(i + 1)
                used.discard(e)
                del mapping[slot]
            backtrack(i + 1)  # leave the slot missing
            return
        for e in candidates(slot):
            trial_out = dict(out_binding)
            mapping[slot] = e
            used.add(e)
            if constraint_ok(slot, e, trial_out):
                saved = dict(out_binding)
                out_binding.clear()
                out_binding.update(trial_out)
                backtrack(i + 1)
                out_binding.clear()
                out_binding.update(saved)
            used.discard(e)
            del mapping[slot]
        backtrack(i + 1)

    backtrack(0)
    if best["mapping"]:
        return best["mapping"], best["out"]
    return None


def _mapped_slots_connected(concept: ConceptType, slots: set[int]) -> bool:
    """The mapped region must be connected in the concept's internal
    reference graph (constraint slot edges to its bound primitive slots)."""
    if len(slots) <= 1:
        return True
    adj: dict[int, set[int]] = {s: set() for s in slots}
    for s in slots:
        if not concept.slot_is_constraint(s):
            continue
        for r in concept.ref_rows(s):
            row = concept.matrix[r]
            if row.sum() == 0:
                continue
            col = int(np.argmax(row))
            if col < concept.n_slots and col in slots:
                adj[s].add(col)
                adj[col].add(s)
    seen = set()
    stack = [next(iter(slots))]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(adj[u] - seen)
    return seen == slots


def complete_sketch(
    partial: SketchGraph,
    lib: ConceptLibrary,
    top_k: int = DEFAULT_TOP_K,
    quant: QuantizationSpec = DEFAULT_QUANT,
) -> list[CompletionCandidate]:
    """Ranked completion candidates.

    Runs the greedy cover with incomplete matches allowed: in rank order,
    each concept claims its largest (full or partial) match among the still
    unexplained elements. Partial claims become candidates that append the
    concept's missing elements. Empty list when nothing matches; a partial
    that whole concepts fully explain yields the identity completion first.
    """
    n_prims = len(partial.primitives)
    n_elements = partial.n_elements
    uncovered = set(range(n_elements))
    # concept attribution of retained elements, for candidate coloring
    prim_concepts: list = [None] * n_prims
    cons_concepts: list = [None] * len(partial.constraints)
    fully_covered_by_whole = True
    pending: list[tuple[int, dict, dict, list]] = []

    for type_id in parse_rank(lib):
        concept = lib.concepts[type_id]
        if concept.n_elements < 2:
            continue
        while uncovered:
            found = _find_partial_match(concept, partial, uncovered)
            if found is None:
                break
            mapping, out_binding = found
            if len(mapping) < 2:
                # a single matched element is no structural evidence
                break
            missing = [
                s
                for s in range(concept.n_slots)
                if concept.slots[s] is not None and s not in mapping
            ]
            for slot, e in mapping.items():
                if e < n_prims:
                    prim_concepts[e] = type_id
                else:
                    cons_concepts[e - n_prims] = type_id
            if missing:
                fully_covered_by_whole = False
                pending.append((type_id, mapping, out_binding, missing))
            uncovered -= set(mapping.values())

    if uncovered:
        fully_covered_by_whole = False

    candidates: list[CompletionCandidate] = []
    if fully_covered_by_whole and n_elements > 0:
        candidates.append(
            CompletionCandidate(
                partial,
                concept_id=-1,
                score=float("inf"),
                primitive_concepts=list(prim_concepts),
                constraint_concepts=list(cons_concepts),
            )
        )
    for type_id, mapping, out_binding, missing in pending:
        cand = _build_candidate(
            partial, lib, type_id, mapping, out_binding, missing,
            prim_concepts, cons_concepts, quant,
        )
        if cand is not None:
            candidates.append(cand)

    ranked = sorted(
        enumerate(candidates), key=lambda ic: (-ic[1].score, ic[1].concept_id, ic[0])
    )
    return [c for _, c in ranked[:top_k]]


def _build_candidate(
    partial: SketchGraph,
    lib: ConceptLibrary,
    type_id: int,
    mapping: dict[int, int],
    out_binding: dict[int, int],
    missing: list[int],
    prim_concepts: list,
    cons_concepts: list,
    quant: QuantizationSpec,
) -> Optional[CompletionCandidate]:
    concept = lib.concepts[type_id]
    n_prims = len(partial.primitives)

    new_prims: list[PrimitiveInstance] = []
    new_index: dict[int, int] = {}  # slot -> global index in completed sketch
    for s in missing:
        if concept.slot_is_primitive(s):
            new_index[s] = n_prims + len(new_prims)
            new_prims.append(None)  # geometry filled below

    new_cons: list[ConstraintInstance] = []
    dropped = 0
    plans: list[tuple[int, list[int]]] = []  # (slot, resolved refs)
    for s in missing:
        if not concept.slot_is_constraint(s):
            continue
        refs = []
        ok = True
        for r in concept.ref_rows(s):
            row = concept.matrix[r]
            if row.sum() == 0:
                ok = False
                break
            col = int(np.argmax(row))
            if col < concept.n_slots:
                if col in mapping:
                    refs.append(mapping[col])
                elif col in new_index:
                    refs.append(new_index[col])
                else:
                    ok = False
                    break
            else:
                arg = col - concept.n_slots
                if arg in out_binding:
                    refs.append(out_binding[arg])
                else:
                    ok = False  # no context pins this outward reference
                    break
        if ok:
            plans.append((s, refs))
        else:
            dropped += 1

    if not new_prims and not plans:
        return None

    geometry = _solve_geometry(partial, concept, mapping, new_index, plans, quant)
    for s, gi in new_index.items():
        kind = concept.slots[s]
        raw = geometry[gi]
        bins = tuple(
            quant.quantize(v, pk) for v, pk in zip(raw, PRIMITIVE_SCHEMAS[kind])
        )
        new_prims[gi - n_prims] = PrimitiveInstance(kind, False, bins)

    for s, refs in plans:
        new_cons.append(ConstraintInstance(concept.slots[s], tuple(refs)))

    completed = SketchGraph(
        partial.primitives + tuple(new_prims),
        partial.constraints + tuple(new_cons),
    )
    completed = recompute_constraint_params(completed, quant)
    n_added = len(new_prims) + len(new_cons)
    cand = CompletionCandidate(
        completed,
        concept_id=type_id,
        score=float(lib.counts[type_id] * n_added),
        added_primitives=list(range(n_prims, n_prims + len(new_prims))),
        added_constraints=list(
            range(len(partial.constraints), len(partial.constraints) + len(new_cons))
        ),
        dropped_refs=dropped,
        primitive_concepts=list(prim_concepts) + [type_id] * len(new_prims),
        constraint_concepts=list(cons_concepts) + [type_id] * len(new_cons),
    )
    for s, e in mapping.items():
        if e < n_prims:
            cand.primitive_concepts[e] = type_id
        else:
            cand.constraint_concepts[e - n_prims] = type_id
    return cand


# ---------------------------------------------------------------------------
# Geometry heuristics
# ---------------------------------------------------------------------------


def _solve_geometry(partial, concept, mapping, new_index, plans, quant):
    """Float geometry for the new primitives.

    Order is fixed: reflection initialization, coincidence snapping (new
    lines prefer endpoints no existing coincidence occupies), direction
    constraints, then length mirroring."""
    n_prims = len(partial.primitives)
    geo: dict[int, list[float]] = {}
    known: dict[int, tuple] = {
        e: (partial.primitives[e].kind, list(dequantized_geometry(partial.primitives[e], quant)))
        for e in range(n_prims)
    }

    matched_pts = []
    for s, e in mapping.items():
        if e < n_prims:
            matched_pts.extend(_control_points(*known[e]))
    if matched_pts:
        cx = (min(p[0] for p in matched_pts) + max(p[0] for p in matched_pts)) / 2.0
        cy = (min(p[1] for p in matched_pts) + max(p[1] for p in matched_pts)) / 2.0
    else:
        cx = cy = 0.0

    buddies = [e for s, e in sorted(mapping.items()) if e < n_prims]
    for s, gi in sorted(new_index.items()):
        kind = concept.slots[s]
        buddy = next(
            (e for e in buddies if partial.primitives[e].kind is kind),
            buddies[0] if buddies else None,
        )
        if buddy is not None:
            bk, bg = known[buddy]
            geo[gi] = _reflect(kind, bk, bg, cx, cy)
        else:
            geo[gi] = _default_geometry(kind)

    def geom_of(ref):
        if ref < n_prims:
            return known[ref][0], known[ref][1], False
        return None if ref not in geo else (_kind_of_new(ref), geo[ref], True)

    def _kind_of_new(ref):
        for s, gi in new_index.items():
            if gi == ref:
                return concept.slots[s]
        return None

    # endpoints already used by the partial's own coincidences
    occupied: set[tuple[int, int]] = set()
    for c in partial.constraints:
        if c.kind is not ConstraintKind.COINCIDENT or len(c.refs) != 2:
            continue
        a, b = c.refs
        best = None
        for ia, (_, qa) in enumerate(_endpoints(*known[a])):
            for ib, (_, qb) in enumerate(_endpoints(*known[b])):
                d = math.hypot(qa[0] - qb[0], qa[1] - qb[1])
                if best is None or d < best[0]:
                    best = (d, ia, ib)
        if best is not None:
            occupied.add((a, best[1]))
            occupied.add((b, best[2]))

    # pass 1a: place new lines from their coincident partners, preferring
    # each partner's free endpoint
    placed_lines: set[int] = set()
    for s, gi in sorted(new_index.items()):
        if concept.slots[s] is not PrimitiveKind.LINE:
            continue
        targets = []
        for ps, refs in plans:
            if concept.slots[ps] is not ConstraintKind.COINCIDENT or len(refs) != 2:
                continue
            if gi not in refs or refs[0] == refs[1]:
                continue
            other = refs[0] if refs[1] == gi else refs[1]
            if other >= n_prims and other not in placed_lines:
                continue  # unplaced new elements are unreliable anchors
            other_geom = geom_of(other)
            if other_geom is None:
                continue
            pts = _endpoints(other_geom[0], other_geom[1])
            free = [i for i in range(len(pts)) if (other, i) not in occupied]
            idx = free[0] if free else 0
            targets.append((other, idx, pts[idx][1]))
            if len(targets) == 2:
                break
        if len(targets) == 2:
            (_, _, p0), (_, _, p1) = targets
            geo[gi][0:4] = [p0[0], p0[1], p1[0], p1[1]]
            for other, idx, _ in targets:
                occupied.add((other, idx))
            occupied.add((gi, 0))
            occupied.add((gi, 1))
            placed_lines.add(gi)
        elif len(targets) == 1:
            other, idx, p = targets[0]
            g = geo[gi]
            d0 = math.hypot(g[0] - p[0], g[1] - p[1])
            d1 = math.hypot(g[2] - p[0], g[3] - p[1])
            off = 0 if d0 <= d1 else 2
            dx, dy = p[0] - g[off], p[1] - g[off + 1]
            geo[gi][0:4] = [g[0] + dx, g[1] + dy, g[2] + dx, g[3] + dy]
            occupied.add((other, idx))
            occupied.add((gi, off // 2))
            placed_lines.add(gi)

    # pass 1b: remaining coincidences, nearest-endpoint snap; elements
    # pinned in 1a are frozen so the snap moves the other side
    for s, refs in plans:
        kind = concept.slots[s]
        if kind is not ConstraintKind.COINCIDENT or len(refs) != 2:
            continue
        sides = []
        for r in refs:
            g = geom_of(r)
            if g is None:
                sides = None
                break
            kind_r, geom_r, movable = g
            sides.append((kind_r, geom_r, movable and r not in placed_lines))
        if sides is None or not (sides[0][2] or sides[1][2]):
            continue
        _snap_coincident(sides[0], sides[1])
    # pass 2: direction constraints
    for s, refs in plans:
        kind = concept.slots[s]
        if kind in (ConstraintKind.HORIZONTAL, ConstraintKind.VERTICAL):
            g = geom_of(refs[0])
            if g and g[2] and g[0] is PrimitiveKind.LINE:
                _flatten_line(g[1], horizontal=kind is ConstraintKind.HORIZONTAL)
        elif kind in (ConstraintKind.PARALLEL, ConstraintKind.PERPENDICULAR) and len(refs) == 2:
            a, b = geom_of(refs[0]), geom_of(refs[1])
            _align_lines(a, b, perpendicular=kind is ConstraintKind.PERPENDICULAR)
    # pass 3: lengths and equality
    for s, refs in plans:
        kind = concept.slots[s]
        if kind is ConstraintKind.EQUAL and len(refs) == 2:
            a, b = geom_of(refs[0]), geom_of(refs[1])
            _mirror_size(a, b)
    return geo


def _control_points(kind, g):
    if kind is PrimitiveKind.LINE:
        return [(g[0], g[1]), (g[2], g[3])]
    if kind is PrimitiveKind.POINT:
        return [(g[0], g[1])]
    return [(g[0], g[1])]


def _reflect(kind, buddy_kind, bg, cx, cy):
    def rx(x):
        return 2 * cx - x

    def ry(y):
        return 2 * cy - y

    if kind is buddy_kind:
        if kind is PrimitiveKind.LINE:
            return [rx(bg[0]), ry(bg[1]), rx(bg[2]), ry(bg[3])]
        if kind is PrimitiveKind.POINT:
            return [rx(bg[0]), ry(bg[1])]
        if kind is PrimitiveKind.CIRCLE:
            return [rx(bg[0]), ry(bg[1]), bg[2]]
        if kind is PrimitiveKind.ARC:
            return [rx(bg[0]), ry(bg[1]), bg[2], (bg[3] + math.pi) % (2 * math.pi), (bg[4] + math.pi) % (2 * math.pi)]
    base = _control_points(buddy_kind, bg)[0]
    return _default_geometry(kind, rx(base[0]), ry(base[1]))


def _default_geometry(kind, x=0.0, y=0.0):
    if kind is PrimitiveKind.LINE:
        return [x - 0.25, y, x + 0.25, y]
    if kind is PrimitiveKind.POINT:
        return [x, y]
    if kind is PrimitiveKind.CIRCLE:
        return [x, y, 0.25]
    return [x, y, 0.25, 0.0, math.pi]


def _endpoints(kind, g):
    if kind is PrimitiveKind.LINE:
        return [(0, (g[0], g[1])), (2, (g[2], g[3]))]
    if kind is PrimitiveKind.POINT:
        return [(0, (g[0], g[1]))]
    if kind is PrimitiveKind.ARC:
        return [
            (None, (g[0] + g[2] * math.cos(g[3]), g[1] + g[2] * math.sin(g[3]))),
            (None, (g[0] + g[2] * math.cos(g[4]), g[1] + g[2] * math.sin(g[4]))),
        ]
    return [(None, (g[0], g[1]))]


def _snap_coincident(a, b):
    if a is None or b is None:
        return
    ka, ga, mova = a
    kb, gb, movb = b
    if not mova and not movb:
        return
    pa = _endpoints(ka, ga)
    pb = _endpoints(kb, gb)
    best = None
    for ia, (offa, qa) in enumerate(pa):
        for ib, (offb, qb) in enumerate(pb):
            d = math.hypot(qa[0] - qb[0], qa[1] - qb[1])
            if best is None or d < best[0]:
                best = (d, offa, qa, offb, qb)
    _, offa, qa, offb, qb = best
    if movb and kb is PrimitiveKind.LINE and offb is not None:
        gb[offb], gb[offb + 1] = qa
    elif movb and kb is PrimitiveKind.POINT:
        gb[0], gb[1] = qa
    elif mova and ka is PrimitiveKind.LINE and offa is not None:
        ga[offa], ga[offa + 1] = qb
    elif mova and ka is PrimitiveKind.POINT:
        ga[0], ga[1] = qb


def _flatten_line(g, horizontal):
    if horizontal:
        ym = (g[1] + g[3]) / 2.0
        g[1] = g[3] = ym
    else:
        xm = (g[0] + g[2]) / 2.0
        g[0] = g[2] = xm


def _align_lines(a, b, perpendicular):
    if a is None or b is None:
        return
    ka, ga, mova = a
    kb, gb, movb = b
    if ka is not PrimitiveKind.LINE or kb is not PrimitiveKind.LINE:
        return
    src, dst, movable = (ga, gb, movb) if movb else (gb, ga, mova)
    if not movable:
        return
    dx, dy = src[2] - src[0], src[3] - src[1]
    n = math.hypot(dx, dy) or 1.0
    dx, dy = dx / n, dy / n
    if perpendicular:
        dx, dy = -dy, dx
    # both orientations satisfy the constraint; keep the closer one so an
    # already-correct line is left alone
    cx_, cy_ = dst[2] - dst[0], dst[3] - dst[1]
    if dx * cx_ + dy * cy_ < 0:
        dx, dy = -dx, -dy
    mx, my = (dst[0] + dst[2]) / 2.0, (dst[1] + dst[3]) / 2.0
    half = math.hypot(dst[2] - dst[0], dst[3] - dst[1]) / 2.0
    dst[0], dst[1] = mx - dx * half, my - dy * half
    dst[2], dst[3] = mx + dx * half, my + dy * half


def _mirror_size(a, b):
    if a is None or b is None:
        return
    ka, ga, mova = a
    kb, gb, movb = b
    src, dst, movable, dk = (ga, gb, movb, kb) if movb else (gb, ga, mova, ka)
    if not movable:
        return
    sk = ka if movb else kb
    if sk is PrimitiveKind.LINE and dk is PrimitiveKind.LINE:
        target = math.hypot(src[2] - src[0], src[3] - src[1])
        mx, my = (dst[0] + dst[2]) / 2.0, (dst[1] + dst[3]) / 2.0
        dx, dy = dst[2] - dst[0], dst[3] - dst[1]
        n = math.hypot(dx, dy) or 1.0
        dx, dy = dx / n * target / 2.0, dy / n * target / 2.0
        dst[0], dst[1], dst[2], dst[3] = mx - dx, my - dy, mx + dx, my + dy
    elif sk in (PrimitiveKind.CIRCLE, PrimitiveKind.ARC) and dk in (
        PrimitiveKind.CIRCLE,
        PrimitiveKind.ARC,
    ):
        dst[2] = src[2]
