"""Search-based concept library induction and sketch parsing.

Candidate structures are connected element subsets of a sketch's constraint
graph whose boundary fits the argument budget. Subsets are enumerated with a
depth-first extension scheme (each connected subset visited exactly once,
deterministic order, hard per-sketch budget), canonicalized up to slot and
argument permutation, pooled with counts across the corpus, and selected
greedily by coverage gain. Parsing is a greedy cover of a sketch by library
concepts with full boundary-routing checks, so the resulting decomposition
always reassembles into the source sketch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .concepts import (
    MIN_INSTANCES,
    N_ARGS,
    N_SLOTS,
    ConceptInstance,
    ConceptLibrary,
    ConceptType,
    Provenance,
    SketchDecomposition,
    builtin_library,
    null_instance,
)
from .errors import EmptyCorpus
from .model import (
    CONSTRAINT_KINDS,
    PRIMITIVE_KINDS,
    ConstraintKind,
    PrimitiveKind,
    SketchGraph,
)

ENUM_BUDGET = 20000  # visited subsets per sketch
LAMBDA_BIAS = 0.5  # boundary penalty weight in the selection gain
MATCH_NODE_BUDGET = 500_000  # backtracking nodes per concept match attempt


# ---------------------------------------------------------------------------
# Element graph
# ---------------------------------------------------------------------------


def element_adjacency(sketch: SketchGraph) -> list[list[int]]:
    """Bipartite incidence between constraints and their referenced
    primitives, over element ids (primitives first, then constraints)."""
    n_prims = len(sketch.primitives)
    adj: list[set[int]] = [set() for _ in range(sketch.n_elements)]
    for ci, c in enumerate(sketch.constraints):
        e = n_prims + ci
        for r in c.refs:
            adj[e].add(r)
            adj[r].add(e)
    return [sorted(s) for s in adj]


# ---------------------------------------------------------------------------
# Subset -> concept conversion
# ---------------------------------------------------------------------------


def concept_from_subset(
    sketch: SketchGraph, subset: list[int]
) -> Optional[tuple[ConceptType, tuple[int, int], list[int]]]:
    """Hard concept type for a connected element subset.

    Returns (concept, (inward, outward), slot_elements) or None when the
    boundary does not fit the argument budget. Slot order is internal
    primitives in sketch order, then internal constraints in sketch order.
    """
    n_prims = len(sketch.primitives)
    subset_set = set(subset)
    prim_ids = sorted(e for e in subset if e < n_prims)
    cons_ids = sorted(e for e in subset if e >= n_prims)
    if len(subset) > N_SLOTS:
        return None

    slot_of_prim = {p: i for i, p in enumerate(prim_ids)}
    slots: list = [sketch.primitives[p].kind for p in prim_ids]
    slots += [sketch.constraints[e - n_prims].kind for e in cons_ids]
    slots += [None] * (N_SLOTS - len(slots))

    matrix = np.zeros((2 * N_SLOTS + N_ARGS, N_SLOTS + N_ARGS))
    outward: dict[int, int] = {}  # external prim -> outward arg
    for k, e in enumerate(cons_ids):
        slot = len(prim_ids) + k
        c = sketch.constraints[e - n_prims]
        for r, ref in enumerate(c.refs):
            if ref in slot_of_prim:
                matrix[2 * slot + r, slot_of_prim[ref]] = 1.0
            else:
                if ref not in outward:
                    if len(outward) == N_ARGS:
                        return None
                    outward[ref] = len(outward)
                matrix[2 * slot + r, N_SLOTS + outward[ref]] = 1.0

    demanded = sorted(
        {
            ref
            for ci, c in enumerate(sketch.constraints)
            if (n_prims + ci) not in subset_set
            for ref in c.refs
            if ref in slot_of_prim
        }
    )
    if len(demanded) > N_ARGS:
        return None
    for a, p in enumerate(demanded):
        matrix[2 * N_SLOTS + a, slot_of_prim[p]] = 1.0

    concept = ConceptType(tuple(slots), matrix)
    return concept, (len(demanded), len(outward)), prim_ids + cons_ids


# ---------------------------------------------------------------------------
# Connected subset enumeration (depth-first extension, each subset once)
# ---------------------------------------------------------------------------


def enumerate_subsets(
    sketch: SketchGraph,
    budget: int = ENUM_BUDGET,
    max_size: int = N_SLOTS,
):
    """Yield connected element subsets of size 2..max_size, each exactly
    once, in deterministic depth-first order, visiting at most `budget`
    subsets."""
    adj = element_adjacency(sketch)
    n = sketch.n_elements
    visited = 0

    def extend(sub: list[int], ext: list[int], root: int, blocked: set[int]):
        nonlocal visited
        for idx, w in enumerate(ext):
            if visited >= budget:
                return
            visited += 1
            new_sub = sub + [w]
            if len(new_sub) >= 2:
                yield new_sub
            if len(new_sub) >= max_size:
                continue
            new_blocked = blocked | set(ext[idx:])
            fresh = [u for u in adj[w] if u > root and u not in new_blocked]
            if fresh or idx + 1 < len(ext):
                yield from extend(new_sub, ext[idx + 1 :] + fresh, root, new_blocked | set(fresh))

    for root in range(n):
        if visited >= budget:
            break
        visited += 1
        ext = [u for u in adj[root] if u > root]
        yield from extend([root], ext, root, {root} | set(ext))


@dataclass
class CandidateConcept:
    concept: ConceptType
    key: bytes
    count: int = 0
    boundary: tuple[int, int] = (0, 0)

    @property
    def n_elements(self) -> int:
        return self.concept.n_elements


def enumerate_candidates(
    sketch: SketchGraph,
    budget: int = ENUM_BUDGET,
    max_size: int = N_SLOTS,
) -> dict[bytes, CandidateConcept]:
    """All boundary-feasible candidate concepts of one sketch, keyed by
    canonical form. Counts tally occurrences (overlaps included)."""
    out: dict[bytes, CandidateConcept] = {}
    for subset in enumerate_subsets(sketch, budget, max_size):
        built = concept_from_subset(sketch, subset)
        if built is None:
            continue
        concept, boundary, _ = built
        key = canonical_key(concept)
        cand = out.get(key)
        if cand is None:
            out[key] = CandidateConcept(concept, key, 1, boundary)
        else:
            cand.count += 1
    return out


# ---------------------------------------------------------------------------
# Canonical labeling of concept structures
# ---------------------------------------------------------------------------


def _concept_parts(concept: ConceptType):
    """Slot-free view: primitive kinds, constraint bindings, inward targets."""
    prims: list[int] = []  # kind ids
    prim_of_slot: dict[int, int] = {}
    for s, kind in enumerate(concept.slots):
        if isinstance(kind, PrimitiveKind):
            prim_of_slot[s] = len(prims)
            prims.append(PRIMITIVE_KINDS.index(kind))
    cons: list[tuple[int, tuple]] = []  # (kind id, refs)
    for s, kind in enumerate(concept.slots):
        if not isinstance(kind, ConstraintKind):
            continue
        refs = []
        for r in concept.ref_rows(s):
            row = concept.matrix[r]
            if row.sum() == 0:
                refs.append(None)
                continue
            col = int(np.argmax(row))
            if col < concept.n_slots:
                refs.append(("p", prim_of_slot[col]))
            else:
                refs.append(("o", col - concept.n_slots))
        cons.append((CONSTRAINT_KINDS.index(kind), tuple(refs)))
    inward = []
    for a, slot in concept.inward_targets().items():
        inward.append(prim_of_slot[slot])
    return prims, cons, inward


def _refine(prims, cons, inward, prim_colors):
    """One isomorphism-invariant color refinement round over primitives.

    Reference targets are coded as ints: -2 absent, -1 outward argument,
    otherwise the current primitive color."""
    cons_colors = []
    for kind, refs in cons:
        sig = tuple(
            -2 if ref is None else (-1 if ref[0] == "o" else prim_colors[ref[1]])
            for ref in refs
        )
        cons_colors.append((kind, sig))
    incidences = [[] for _ in prims]
    for k, (kind, refs) in enumerate(cons):
        for r, ref in enumerate(refs):
            if ref is not None and ref[0] == "p":
                incidences[ref[1]].append((cons_colors[k], r))
    inward_hits = [0] * len(prims)
    for p in inward:
        inward_hits[p] += 1
    raw = [
        (prim_colors[i], tuple(sorted(incidences[i])), inward_hits[i])
        for i in range(len(prims))
    ]
    ranking = {sig: rank for rank, sig in enumerate(sorted(set(raw)))}
    return [ranking[sig] for sig in raw]


def _leaf_serial(prims, cons, inward, order):
    """Serialization for a fixed primitive order; minimal over outward-arg
    relabelings. Constraint rows and inward targets are sorted, which makes
    their own ordering irrelevant."""
    pos = {p: i for i, p in enumerate(order)}
    out_args = sorted({ref[1] for _, refs in cons for ref in refs if ref and ref[0] == "o"})
    best = None
    for perm in itertools.permutations(range(len(out_args))):
        relabel = {a: perm[i] for i, a in enumerate(out_args)}
        rows = sorted(
            (
                kind,
                tuple(
                    -1 if ref is None else (pos[ref[1]] if ref[0] == "p" else 1000 + relabel[ref[1]])
                    for ref in refs
                ),
            )
            for kind, refs in cons
        )
        serial = (
            tuple(prims[p] for p in order),
            tuple(rows),
            tuple(sorted(pos[p] for p in inward)),
            len(out_args),
        )
        if best is None or serial < best:
            best = serial
    return best


_KEY_CACHE: dict[bytes, bytes] = {}
_KEY_CACHE_MAX = 200_000


def canonical_key(concept: ConceptType) -> bytes:
    """Canonical byte string, invariant under slot and argument permutation.

    Exhaustive minimization over type-respecting primitive orders, pruned by
    iterated color refinement with individualization on ties.
    """
    exact = concept.key_bytes()
    cached = _KEY_CACHE.get(exact)
    if cached is not None:
        return cached
    key = _canonical_key_uncached(concept)
    if len(_KEY_CACHE) < _KEY_CACHE_MAX:
        _KEY_CACHE[exact] = key
    return key


def _canonical_key_uncached(concept: ConceptType) -> bytes:
    prims, cons, inward = _concept_parts(concept)
    if not prims and not cons:
        return b"null"
    best: Optional[tuple] = None

    def stabilize(colors):
        while True:
            new = _refine(prims, cons, inward, colors)
            # refined ranks are finer or equal; stop at a fixed point
            if _partition(new) == _partition(colors):
                return new
            colors = new

    def _partition(colors):
        groups: dict[int, list[int]] = {}
        for i, c in enumerate(colors):
            groups.setdefault(c, []).append(i)
        return sorted(tuple(v) for v in groups.values())

    def search(colors):
        nonlocal best
        colors = stabilize(colors)
        cells: dict[int, list[int]] = {}
        for i, c in enumerate(colors):
            cells.setdefault(c, []).append(i)
        ordered_cells = [cells[c] for c in sorted(cells)]
        target = next((cell for cell in ordered_cells if len(cell) > 1), None)
        if target is None:
            order = [cell[0] for cell in ordered_cells]
            serial = _leaf_serial(prims, cons, inward, order)
            if best is None or serial < best:
                best = serial
            return
        for member in target:
            branched = list(colors)
            branched[member] = -1  # individualize: unique smallest color
            search(branched)

    search(_initial_colors(prims))
    return repr(best).encode()


def _initial_colors(prims):
    ranking = {k: r for r, k in enumerate(sorted(set(prims)))}
    return [ranking[k] for k in prims]


# ---------------------------------------------------------------------------
# Greedy library selection
# ---------------------------------------------------------------------------


def selection_gain(count: int, n_elements: int, boundary: tuple[int, int], lambda_bias: float) -> float:
    return count * (n_elements - 1) - lambda_bias * count * sum(boundary)


def induce_library(
    corpus: list[SketchGraph],
    max_size: int = 1000,
    lambda_bias: float = LAMBDA_BIAS,
    budget: int = ENUM_BUDGET,
) -> ConceptLibrary:
    """Pool canonical candidates over the corpus and select greedily by
    gain = count * (elements - 1) - lambda * count * boundary_refs, until
    the size cap or no positive gain remains. Deterministic: ties break by
    higher count, then smaller canonical key."""
    if not corpus:
        raise EmptyCorpus("cannot induce a library from zero sketches")
    pool: dict[bytes, CandidateConcept] = {}
    for sketch in corpus:
        for key, cand in enumerate_candidates(sketch, budget).items():
            have = pool.get(key)
            if have is None:
                pool[key] = cand
            else:
                have.count += cand.count
    ranked = sorted(
        pool.values(),
        key=lambda c: (
            -selection_gain(c.count, c.n_elements, c.boundary, lambda_bias),
            -c.count,
            c.key,
        ),
    )
    lib = builtin_library(lambda_bias)
    for cand in ranked:
        if len(lib) - lib.n_builtin >= max_size:
            break
        if selection_gain(cand.count, cand.n_elements, cand.boundary, lambda_bias) <= 0:
            break
        lib.add(cand.concept, cand.count, selection_gain(cand.count, cand.n_elements, cand.boundary, lambda_bias))
    return lib


# ---------------------------------------------------------------------------
# Parsing: greedy cover with routing guarantees
# ---------------------------------------------------------------------------


@dataclass
class ParseResult:
    decomposition: SketchDecomposition
    provenance: Provenance  # source element -> (instance, slot)
    residual_elements: int = 0  # elements that fell back to builtin wrappers
    warnings: list[str] = field(default_factory=list)


def _pattern_order(concept: ConceptType) -> list[int]:
    """Slot visit order for backtracking: walk the concept's internal
    reference graph so every constraint follows its primitives."""
    prim_slots = [s for s in range(concept.n_slots) if concept.slot_is_primitive(s)]
    cons_slots = [s for s in range(concept.n_slots) if concept.slot_is_constraint(s)]
    cons_targets = {}
    for s in cons_slots:
        targets = []
        for r in concept.ref_rows(s):
            row = concept.matrix[r]
            if row.sum() > 0:
                col = int(np.argmax(row))
                if col < concept.n_slots:
                    targets.append(col)
        cons_targets[s] = targets
    order: list[int] = []
    placed: set[int] = set()
    pending_cons = set(cons_slots)
    pending_prims = [s for s in prim_slots]
    while pending_prims or pending_cons:
        progressed = True
        while progressed:
            progressed = False
            for s in sorted(pending_cons):
                if all(t in placed for t in cons_targets[s]):
                    order.append(s)
                    placed.add(s)
                    pending_cons.discard(s)
                    progressed = True
        if pending_prims:
            # prefer a primitive referenced by a pending constraint
            nxt = None
            for s in sorted(pending_cons):
                for t in cons_targets[s]:
                    if t in pending_prims and all(
                        u in placed or u == t for u in cons_targets[s]
                    ):
                        nxt = t
                        break
                if nxt is not None:
                    break
            if nxt is None:
                nxt = pending_prims[0]
            order.append(nxt)
            placed.add(nxt)
            pending_prims.remove(nxt)
        elif pending_cons:
            s = sorted(pending_cons)[0]
            order.append(s)
            placed.add(s)
            pending_cons.discard(s)
    return order


def _find_match(
    concept: ConceptType,
    sketch: SketchGraph,
    covered: set[int],
    owner: dict[int, tuple[int, int]],
    lib: ConceptLibrary,
    instances: list[tuple[int, dict[int, int]]],
    adj_cons_of_prim: dict[int, list[int]],
) -> Optional[dict[int, int]]:
    """First valid mapping slot -> element id of `concept` onto uncovered
    elements, or None. Valid means: kinds match, internal references equal
    the concept's bindings, outward bindings are consistent, every mapped
    primitive that outside constraints reference is exposed by an inward
    argument, and outward targets already owned are reachable through their
    owner's inward arguments."""
    n_prims = len(sketch.primitives)
    order = _pattern_order(concept)
    bindings: dict[int, list] = {}
    for s in range(concept.n_slots):
        if concept.slot_is_constraint(s):
            refs = []
            for r in concept.ref_rows(s):
                row = concept.matrix[r]
                col = int(np.argmax(row)) if row.sum() > 0 else None
                refs.append(col)
            bindings[s] = refs

    inward_exposed = set(concept.inward_targets().values())
    mapping: dict[int, int] = {}
    used: set[int] = set()
    out_binding: dict[int, int] = {}
    nodes = 0  # deterministic cap; a missed match only costs coverage  # outward arg -> element id

    def candidates(slot: int):
        kind = concept.slots[slot]
        if isinstance(kind, PrimitiveKind):
            # anchor on a neighbor constraint already mapped, else scan
            for e in range(n_prims):
                if e in covered or e in used:
                    continue
                if sketch.primitives[e].kind is kind:
                    yield e
        else:
            for ci, c in enumerate(sketch.constraints):
                e = n_prims + ci
                if e in covered or e in used:
                    continue
                if c.kind is kind:
                    yield e

    def consistent_constraint(slot: int, e: int, trial_out: dict[int, int]) -> bool:
        c = sketch.constraints[e - len(sketch.primitives)]
        refs = bindings[slot]
        for r, col in enumerate(refs):
            if r >= len(c.refs):
                return False
            target = c.refs[r]
            if col is None:
                return False
            if col < concept.n_slots:
                if col not in mapping or mapping[col] != target:
                    return False
            else:
                arg = col - concept.n_slots
                if arg in trial_out:
                    if trial_out[arg] != target:
                        return False
                else:
                    if target in trial_out.values():
                        return False  # distinct args bind distinct primitives
                    trial_out[arg] = target
        return len(c.refs) == len(refs)

    def backtrack(i: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > MATCH_NODE_BUDGET:
            return False
        if i == len(order):
            return finalize()
        slot = order[i]
        kind = concept.slots[slot]
        if kind is None:
            return backtrack(i + 1)
        if isinstance(kind, PrimitiveKind):
            for e in candidates(slot):
                mapping[slot] = e
                used.add(e)
                if backtrack(i + 1):
                    return True
                used.discard(e)
                del mapping[slot]
            return False
        for e in candidates(slot):
            trial_out = dict(out_binding)
            mapping[slot] = e
            used.add(e)
            if consistent_constraint(slot, e, trial_out):
                saved = dict(out_binding)
                out_binding.clear()
                out_binding.update(trial_out)
                if backtrack(i + 1):
                    return True
                out_binding.clear()
                out_binding.update(saved)
            used.discard(e)
            del mapping[slot]
        return False

    def finalize() -> bool:
        image = set(mapping.values())
        # outward targets must be outside the match
        for arg, target in out_binding.items():
            if target in image:
                return False
        # inward exposure: every mapped primitive referenced from outside
        for slot, e in mapping.items():
            if not concept.slot_is_primitive(slot):
                continue
            externally_referenced = any(
                ce not in image for ce in adj_cons_of_prim.get(e, [])
            )
            if externally_referenced and slot not in inward_exposed:
                return False
        # already-owned outward targets must be reachable via their owner
        for arg, target in out_binding.items():
            if target in owner:
                inst_idx, slot_t = owner[target]
                owner_type = lib.get(instances[inst_idx][0])
                if slot_t not in set(owner_type.inward_targets().values()):
                    return False
        return True

    if backtrack(0):
        return dict(mapping)
    return None


def parse_rank(lib: ConceptLibrary) -> list[int]:
    """Cover order for induced concepts: per-occurrence gain, then corpus
    count, then library position."""
    return sorted(
        lib.induced_ids,
        key=lambda i: (
            -(
                (lib.concepts[i].n_elements - 1)
                - lib.lambda_bias * sum(lib.concepts[i].boundary_arity())
            ),
            -lib.counts[i],
            i,
        ),
    )


def parse_sketch(
    sketch: SketchGraph,
    lib: ConceptLibrary,
) -> ParseResult:
    """Greedy lossless cover of a sketch by library concepts.

    Uncovered primitives fall back to single-primitive concepts and
    uncovered constraints to single-constraint wrappers, so the parse never
    drops an element. Instances beyond the padding minimum grow the
    decomposition with a warning.
    """
    n_prims = len(sketch.primitives)
    covered: set[int] = set()
    owner: dict[int, tuple[int, int]] = {}
    instances: list[tuple[int, dict[int, int]]] = []  # (type id, slot -> element)
    warnings: list[str] = []
    adj_cons_of_prim: dict[int, list[int]] = {}
    for ci, c in enumerate(sketch.constraints):
        for ref in c.refs:
            adj_cons_of_prim.setdefault(ref, []).append(n_prims + ci)

    concept_rank = parse_rank(lib)

    for type_id in concept_rank:
        concept = lib.concepts[type_id]
        if concept.n_elements == 0:
            continue
        while True:
            match = _find_match(
                concept, sketch, covered, owner, lib, instances, adj_cons_of_prim
            )
            if match is None:
                break
            inst_idx = len(instances)
            instances.append((type_id, match))
            for slot, e in match.items():
                covered.add(e)
                owner[e] = (inst_idx, slot)

    residual = 0
    for e in range(n_prims):
        if e not in covered:
            kind = sketch.primitives[e].kind
            type_id = 1 + PRIMITIVE_KINDS.index(kind)
            inst_idx = len(instances)
            instances.append((type_id, {0: e}))
            covered.add(e)
            owner[e] = (inst_idx, 0)
            residual += 1
    for ci in range(len(sketch.constraints)):
        e = n_prims + ci
        if e not in covered:
            kind = sketch.constraints[ci].kind
            type_id = 1 + len(PRIMITIVE_KINDS) + CONSTRAINT_KINDS.index(kind)
            inst_idx = len(instances)
            instances.append((type_id, {0: e}))
            covered.add(e)
            owner[e] = (inst_idx, 0)
            residual += 1

    n_inst = max(len(instances), MIN_INSTANCES)
    if len(instances) > MIN_INSTANCES:
        warnings.append(
            f"decomposition uses {len(instances)} instances (padding minimum is {MIN_INSTANCES})"
        )

    concept_instances: list[ConceptInstance] = []
    for type_id, mapping in instances:
        t = lib.get(type_id)
        params: list = [None] * t.n_slots
        cparams: list = [None] * t.n_slots
        for slot, e in mapping.items():
            if e < n_prims:
                params[slot] = sketch.primitives[e]
            else:
                cparams[slot] = sketch.constraints[e - n_prims].param
        concept_instances.append(ConceptInstance(type_id, tuple(params), tuple(cparams)))
    while len(concept_instances) < n_inst:
        concept_instances.append(null_instance(lib))

    cross = np.zeros((n_inst * N_ARGS, n_inst * N_ARGS))
    for inst_idx, (type_id, mapping) in enumerate(instances):
        t = lib.get(type_id)
        # recover the outward-arg binding of this instance from its mapping
        for s in range(t.n_slots):
            if not t.slot_is_constraint(s) or s not in mapping:
                continue
            e = mapping[s]
            c = sketch.constraints[e - n_prims]
            for r_local, r in enumerate(t.ref_rows(s)):
                row = t.matrix[r]
                if row.sum() == 0:
                    continue
                col = int(np.argmax(row))
                if col < t.n_slots:
                    continue
                arg = col - t.n_slots
                target = c.refs[r_local]
                j, slot_t = owner[target]
                tj = lib.get(instances[j][0])
                inward = {slot: a for a, slot in tj.inward_targets().items()}
                b = inward[slot_t]
                cross[inst_idx * N_ARGS + arg, j * N_ARGS + b] = 1.0

    decomp = SketchDecomposition(tuple(concept_instances), cross)
    prov = Provenance(primitives=[None] * n_prims, constraints=[None] * len(sketch.constraints))
    for e, (inst_idx, slot) in owner.items():
        if e < n_prims:
            prov.primitives[e] = (inst_idx, slot)
        else:
            prov.constraints[e - n_prims] = (inst_idx, slot)
    return ParseResult(decomp, prov, residual, warnings)


# ---------------------------------------------------------------------------
# Structural feature vectors (codebook integration)
# ---------------------------------------------------------------------------


def quantize_candidates(candidates: list[CandidateConcept], book) -> tuple[np.ndarray, float]:
    """Assign candidate structural features to codebook prototypes.

    Observational: lets a codebook track the structural diversity of the
    candidate pool (assignments plus quantization loss); selection itself
    stays greedy and exact.
    """
    from .vq import assign_and_loss

    features = np.stack([concept_feature(c.concept) for c in candidates])
    return assign_and_loss(features, book)


def concept_feature(concept: ConceptType) -> np.ndarray:
    """Flattened slot-kind one-hots plus the structure matrix."""
    n_kinds = len(PRIMITIVE_KINDS) + len(CONSTRAINT_KINDS) + 1
    onehots = np.zeros((concept.n_slots, n_kinds))
    for s, kind in enumerate(concept.slots):
        if kind is None:
            onehots[s, -1] = 1.0
        elif isinstance(kind, PrimitiveKind):
            onehots[s, PRIMITIVE_KINDS.index(kind)] = 1.0
        else:
            onehots[s, len(PRIMITIVE_KINDS) + CONSTRAINT_KINDS.index(kind)] = 1.0
    return np.concatenate([onehots.ravel(), concept.matrix.ravel()])


def feature_dim(n_slots: int = N_SLOTS, n_args: int = N_ARGS) -> int:
    n_kinds = len(PRIMITIVE_KINDS) + len(CONSTRAINT_KINDS) + 1
    return n_slots * n_kinds + (2 * n_slots + n_args) * (n_slots + n_args)
