"""Reusable concept structures and their composition into sketches.

A concept type is a fixed array of typed slots (primitive kind, constraint
kind, or null) plus a row-stochastic structure matrix that binds constraint
references to slots or to interface arguments. Inward arguments receive
references from outside the concept and forward them to an internal
primitive; outward arguments let internal constraints reach primitives of
other concept instances. A decomposition combines several instances through
a cross matrix that connects outward arguments to inward arguments, and the
three-matrix product of (reference rows) x (cross block) x (inward rows)
resolves every cross-instance reference down to a primitive slot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ShapeMismatch, UnknownConceptType
from .model import (
    CONSTRAINT_ARITY,
    CONSTRAINT_PARAM,
    ConstraintInstance,
    ConstraintKind,
    PrimitiveInstance,
    PrimitiveKind,
    SketchGraph,
)

N_SLOTS = 12  # max elements per concept
N_ARGS = 2  # max inward and max outward arguments
MIN_INSTANCES = 5  # decompositions are padded with null instances up to this

SlotKind = Union[PrimitiveKind, ConstraintKind, None]


def structure_mask(n_slots: int = N_SLOTS, n_args: int = N_ARGS) -> np.ndarray:
    """Forbidden entries of a structure matrix (True = must be zero)."""
    mask = np.zeros((2 * n_slots + n_args, n_slots + n_args), dtype=bool)
    for i in range(n_slots):
        mask[2 * i : 2 * i + 2, i] = True  # an element referring back to itself
    mask[2 * n_slots :, n_slots:] = True  # inward args referring to outward args
    return mask


def cross_mask(n_instances: int, n_args: int = N_ARGS) -> np.ndarray:
    """Forbidden entries of a cross matrix: own-instance argument loops."""
    size = n_instances * n_args
    mask = np.zeros((size, size), dtype=bool)
    for i in range(n_instances):
        mask[i * n_args : (i + 1) * n_args, i * n_args : (i + 1) * n_args] = True
    return mask


def harden(matrix: np.ndarray) -> np.ndarray:
    """Per-row argmax one-hot (lowest index wins ties); zero rows stay zero."""
    out = np.zeros_like(matrix)
    for i, row in enumerate(matrix):
        if row.sum() > 0:
            out[i, int(np.argmax(row))] = 1.0
    return out


def is_hard(matrix: np.ndarray) -> bool:
    return bool(np.all((matrix == 0.0) | (matrix == 1.0)))


@dataclass
class ConceptType:
    """A structure: slot kinds plus the binding matrix. Parameters live on
    instances, never here."""

    slots: tuple[SlotKind, ...]
    matrix: np.ndarray

    def __post_init__(self):
        n = len(self.slots)
        expected = (2 * n + N_ARGS, n + N_ARGS)
        if self.matrix.shape != expected:
            raise ShapeMismatch(f"structure matrix {self.matrix.shape}, expected {expected}")
        self.matrix = np.asarray(self.matrix, dtype=float)

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    def slot_is_constraint(self, i: int) -> bool:
        return isinstance(self.slots[i], ConstraintKind)

    def slot_is_primitive(self, i: int) -> bool:
        return isinstance(self.slots[i], PrimitiveKind)

    @property
    def n_elements(self) -> int:
        return sum(1 for s in self.slots if s is not None)

    def ref_rows(self, slot: int) -> range:
        arity = CONSTRAINT_ARITY[self.slots[slot]] if self.slot_is_constraint(slot) else 0
        return range(2 * slot, 2 * slot + arity)

    def in_block(self) -> np.ndarray:
        """References of internal constraints onto internal primitives."""
        n = self.n_slots
        return self.matrix[: 2 * n, :n]

    def out_block(self) -> np.ndarray:
        """References of internal constraints onto outward arguments."""
        n = self.n_slots
        return self.matrix[: 2 * n, n:]

    def inward_block(self) -> np.ndarray:
        """Inward arguments onto internal primitives."""
        n = self.n_slots
        return self.matrix[2 * n :, :n]

    def inward_targets(self) -> dict[int, int]:
        """arg index -> primitive slot, for bound (nonzero) inward args."""
        block = harden(self.inward_block())
        return {a: int(np.argmax(block[a])) for a in range(N_ARGS) if block[a].sum() > 0}

    def used_outward_args(self) -> list[int]:
        block = self.out_block()
        return [a for a in range(N_ARGS) if block[:, a].sum() > 0]

    def boundary_arity(self) -> tuple[int, int]:
        """(inward, outward) argument usage."""
        return (len(self.inward_targets()), len(self.used_outward_args()))

    def key_bytes(self) -> bytes:
        """Exact representation bytes (not permutation invariant)."""
        slot_ids = tuple(-1 if s is None else _slot_kind_id(s) for s in self.slots)
        return repr(slot_ids).encode() + self.matrix.tobytes()


def _slot_kind_id(kind: SlotKind) -> int:
    if isinstance(kind, PrimitiveKind):
        return list(PrimitiveKind).index(kind)
    return 4 + list(ConstraintKind).index(kind)


def slot_kind_name(kind: SlotKind) -> str:
    return "null" if kind is None else kind.value


def slot_kind_from_name(name: str) -> SlotKind:
    if name == "null":
        return None
    try:
        return PrimitiveKind(name)
    except ValueError:
        return ConstraintKind(name)


def validate_concept_type(t: ConceptType, tol: float = 1e-9) -> list[str]:
    """Report structural violations of a concept type (never raises)."""
    violations: list[str] = []
    n = t.n_slots
    mask = structure_mask(n, N_ARGS)
    m = t.matrix
    if np.any(m[mask] != 0.0):
        violations.append("self-reference masked entries must be exactly 0")
    if np.any(m < 0.0):
        violations.append("negative probability entries")
    meaningful = np.zeros(2 * n + N_ARGS, dtype=bool)
    for i in range(n):
        for r in t.ref_rows(i):
            meaningful[r] = True
    for r in range(2 * n + N_ARGS):
        s = m[r].sum()
        if meaningful[r]:
            if abs(s - 1.0) > tol:
                violations.append(f"row {r} sums to {s}, expected 1")
        elif r < 2 * n and s > tol:
            violations.append(f"row {r} belongs to no constraint reference but carries mass")
        elif r >= 2 * n and s > tol and abs(s - 1.0) > tol:
            violations.append(f"inward-argument row {r} sums to {s}, expected 0 or 1")
    # references may only land on non-null primitive slots or outward args
    for i in range(n):
        for r in t.ref_rows(i):
            for j in range(n):
                if m[r, j] > tol and not t.slot_is_primitive(j):
                    violations.append(f"row {r} assigns {m[r, j]:.3g} to non-primitive slot {j}")
    for a in range(N_ARGS):
        row = m[2 * n + a]
        for j in range(n):
            if row[j] > tol and not t.slot_is_primitive(j):
                violations.append(f"inward arg {a} targets non-primitive slot {j}")
    return violations


@dataclass
class ConceptInstance:
    """A concept type instantiated with primitive parameters."""

    type_id: int
    params: tuple[Optional[PrimitiveInstance], ...]  # one entry per slot
    constraint_params: tuple[Optional[int], ...] = None  # scalar bins, per slot

    def __post_init__(self):
        if self.constraint_params is None:
            self.constraint_params = (None,) * len(self.params)


def validate_instance(inst: ConceptInstance, lib: "ConceptLibrary") -> list[str]:
    if not (0 <= inst.type_id < len(lib.concepts)):
        return [f"unknown concept type {inst.type_id}"]
    t = lib.concepts[inst.type_id]
    violations = []
    if len(inst.params) != t.n_slots:
        return [f"expected {t.n_slots} param slots, got {len(inst.params)}"]
    for i, slot in enumerate(t.slots):
        p = inst.params[i]
        if isinstance(slot, PrimitiveKind):
            if p is None:
                violations.append(f"slot {i} ({slot.value}) missing parameters")
            elif p.kind is not slot:
                violations.append(f"slot {i} parameters are {p.kind.value}, slot is {slot.value}")
        elif p is not None:
            violations.append(f"slot {i} carries parameters but is not a primitive")
    return violations


@dataclass
class SketchDecomposition:
    """Concept instances plus the cross matrix wiring their arguments."""

    instances: tuple[ConceptInstance, ...]
    cross_matrix: np.ndarray

    def __post_init__(self):
        size = len(self.instances) * N_ARGS
        if self.cross_matrix.shape != (size, size):
            raise ShapeMismatch(
                f"cross matrix {self.cross_matrix.shape}, expected {(size, size)}"
            )
        self.cross_matrix = np.asarray(self.cross_matrix, dtype=float)

    @property
    def n_instances(self) -> int:
        return len(self.instances)


@dataclass
class ConceptLibrary:
    """Ordered concept collection. Entries 0..n_builtin-1 are the null
    concept, one single-primitive concept per primitive kind (with an inward
    argument so wrapped primitives stay reachable), and one single-constraint
    wrapper per constraint kind (with outward arguments per reference)."""

    concepts: list[ConceptType] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    gains: list[float] = field(default_factory=list)
    n_builtin: int = 0
    lambda_bias: float = 0.5

    def add(self, concept: ConceptType, count: int = 0, gain: float = 0.0) -> int:
        self.concepts.append(concept)
        self.counts.append(count)
        self.gains.append(gain)
        return len(self.concepts) - 1

    def __len__(self) -> int:
        return len(self.concepts)

    def get(self, type_id: int) -> ConceptType:
        if not (0 <= type_id < len(self.concepts)):
            raise UnknownConceptType(f"type id {type_id} not in library of {len(self.concepts)}")
        return self.concepts[type_id]

    @property
    def induced_ids(self) -> list[int]:
        return list(range(self.n_builtin, len(self.concepts)))


def null_concept(n_slots: int = N_SLOTS) -> ConceptType:
    return ConceptType((None,) * n_slots, np.zeros((2 * n_slots + N_ARGS, n_slots + N_ARGS)))


def primitive_concept(kind: PrimitiveKind, n_slots: int = N_SLOTS) -> ConceptType:
    slots = (kind,) + (None,) * (n_slots - 1)
    m = np.zeros((2 * n_slots + N_ARGS, n_slots + N_ARGS))
    m[2 * n_slots, 0] = 1.0  # inward arg 0 exposes the primitive
    return ConceptType(slots, m)


def constraint_wrapper(kind: ConstraintKind, n_slots: int = N_SLOTS) -> ConceptType:
    slots = (kind,) + (None,) * (n_slots - 1)
    m = np.zeros((2 * n_slots + N_ARGS, n_slots + N_ARGS))
    for r in range(CONSTRAINT_ARITY[kind]):
        m[r, n_slots + r] = 1.0  # each reference leaves through its own arg
    return ConceptType(slots, m)


def builtin_library(lambda_bias: float = 0.5) -> ConceptLibrary:
    lib = ConceptLibrary(lambda_bias=lambda_bias)
    lib.add(null_concept())
    for pk in PrimitiveKind:
        lib.add(primitive_concept(pk))
    for ck in ConstraintKind:
        lib.add(constraint_wrapper(ck))
    lib.n_builtin = len(lib.concepts)
    return lib


def null_instance(lib: ConceptLibrary) -> ConceptInstance:
    return ConceptInstance(0, (None,) * lib.concepts[0].n_slots)


# ---------------------------------------------------------------------------
# Expansion and composition
# ---------------------------------------------------------------------------


@dataclass
class ExpandedElement:
    slot: int
    element: Union[PrimitiveInstance, ConstraintInstance]


def expand_instance(
    inst: ConceptInstance, lib: ConceptLibrary
) -> tuple[list[ExpandedElement], np.ndarray]:
    """Materialize the non-null slots of an instance.

    Constraint elements come back as skeletons with empty refs; resolving
    references needs the whole decomposition. The second return is the
    in-concept reference block (constraint rows onto primitive slots).
    """
    t = lib.get(inst.type_id)
    elements: list[ExpandedElement] = []
    for i, slot in enumerate(t.slots):
        if slot is None:
            continue
        if isinstance(slot, PrimitiveKind):
            p = inst.params[i]
            if p is None:
                p = PrimitiveInstance(slot, False, (0,) * len(_schema_len(slot)))
            elements.append(ExpandedElement(i, p))
        else:
            elements.append(
                ExpandedElement(i, ConstraintInstance(slot, (), inst.constraint_params[i]))
            )
    return elements, t.in_block().copy()


def _schema_len(kind: PrimitiveKind):
    from .model import PRIMITIVE_SCHEMAS

    return PRIMITIVE_SCHEMAS[kind]


def compose_cross_refs(decomp: SketchDecomposition, lib: ConceptLibrary) -> np.ndarray:
    """Full reference matrix over all instances.

    Shape (2 * n_inst * n_slots) x (n_inst * n_slots). Diagonal blocks carry
    each instance's in-concept references; block (i, j) routes instance i's
    references through its outward arguments, the cross matrix, and j's
    inward arguments.
    """
    n_inst = decomp.n_instances
    types = [lib.get(inst.type_id) for inst in decomp.instances]
    n = types[0].n_slots if types else N_SLOTS
    for t in types:
        if t.n_slots != n:
            raise ShapeMismatch("instances disagree on slot count")
    rows, cols = 2 * n, n
    R = np.zeros((n_inst * rows, n_inst * cols))
    rs = decomp.cross_matrix
    for i, ti in enumerate(types):
        R[i * rows : (i + 1) * rows, i * cols : (i + 1) * cols] = ti.in_block()
        out_i = ti.out_block()
        for j, tj in enumerate(types):
            if i == j:
                continue
            cross = rs[i * N_ARGS : (i + 1) * N_ARGS, j * N_ARGS : (j + 1) * N_ARGS]
            if not np.any(cross):
                continue
            block = out_i @ cross @ tj.inward_block()
            R[i * rows : (i + 1) * rows, j * cols : (j + 1) * cols] = block
    return R


@dataclass
class Provenance:
    """element index -> (instance index, slot index) for an assembled sketch."""

    primitives: list[tuple[int, int]] = field(default_factory=list)
    constraints: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class AssemblyResult:
    sketch: SketchGraph
    provenance: Provenance
    dropped: list[str] = field(default_factory=list)


def assemble_sketch(decomp: SketchDecomposition, lib: ConceptLibrary) -> AssemblyResult:
    """Expand a hard decomposition into a concrete sketch.

    Constraints whose reference chain does not land on a concrete primitive
    slot are dropped and reported, never raised.
    """
    n_inst = decomp.n_instances
    types = [lib.get(inst.type_id) for inst in decomp.instances]
    n = types[0].n_slots if types else N_SLOTS
    R = harden(compose_cross_refs(decomp, lib))

    prim_index: dict[tuple[int, int], int] = {}
    prims: list[PrimitiveInstance] = []
    prov = Provenance()
    for i, (inst, t) in enumerate(zip(decomp.instances, types)):
        for s, slot in enumerate(t.slots):
            if isinstance(slot, PrimitiveKind):
                p = inst.params[s]
                if p is None:
                    continue
                prim_index[(i, s)] = len(prims)
                prims.append(p)
                prov.primitives.append((i, s))

    cons: list[ConstraintInstance] = []
    dropped: list[str] = []
    for i, (inst, t) in enumerate(zip(decomp.instances, types)):
        for s, slot in enumerate(t.slots):
            if not isinstance(slot, ConstraintKind):
                continue
            refs = []
            ok = True
            for r in t.ref_rows(s):
                row = R[i * 2 * n + r]
                if row.sum() == 0:
                    dropped.append(f"instance {i} slot {s} ref {r - 2 * s}: unbound chain")
                    ok = False
                    break
                col = int(np.argmax(row))
                target = (col // n, col % n)
                if target not in prim_index:
                    dropped.append(
                        f"instance {i} slot {s} ref {r - 2 * s}: resolves to empty slot {target}"
                    )
                    ok = False
                    break
                refs.append(prim_index[target])
            if ok:
                cons.append(ConstraintInstance(slot, tuple(refs), inst.constraint_params[s]))
                prov.constraints.append((i, s))
    return AssemblyResult(SketchGraph(tuple(prims), tuple(cons)), prov, dropped)


# ---------------------------------------------------------------------------
# Library serialization
# ---------------------------------------------------------------------------


def library_to_obj(lib: ConceptLibrary) -> dict:
    return {
        "schema_version": 1,
        "k_l0": N_SLOTS,
        "k_arg": N_ARGS,
        "n_builtin": lib.n_builtin,
        "lambda_bias": lib.lambda_bias,
        "concepts": [
            {
                "slots": [slot_kind_name(s) for s in t.slots],
                "matrix": t.matrix.tolist(),
                "hard": is_hard(t.matrix),
                "count": c,
                "gain": g,
            }
            for t, c, g in zip(lib.concepts, lib.counts, lib.gains)
        ],
    }


def library_from_obj(obj: dict) -> ConceptLibrary:
    if obj.get("k_l0", N_SLOTS) != N_SLOTS or obj.get("k_arg", N_ARGS) != N_ARGS:
        raise ShapeMismatch("library file disagrees on slot/argument counts")
    lib = ConceptLibrary(lambda_bias=float(obj.get("lambda_bias", 0.5)))
    for co in obj["concepts"]:
        t = ConceptType(
            tuple(slot_kind_from_name(s) for s in co["slots"]),
            np.array(co["matrix"], dtype=float),
        )
        lib.add(t, int(co.get("count", 0)), float(co.get("gain", 0.0)))
    lib.n_builtin = int(obj.get("n_builtin", 0))
    return lib


def save_library(lib: ConceptLibrary, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(library_to_obj(lib), fh)


def load_library(path: str) -> ConceptLibrary:
    with open(path, "r", encoding="utf-8") as fh:
        return library_from_obj(json.load(fh))


def decomposition_to_obj(decomp: SketchDecomposition, lib: ConceptLibrary) -> dict:
    insts = []
    for inst in decomp.instances:
        t = lib.get(inst.type_id)
        params = []
        for s in range(t.n_slots):
            p = inst.params[s]
            if p is None:
                params.append(None)
            else:
                params.append(
                    {"construction": p.construction, "params": list(p.params)}
                )
        insts.append(
            {
                "type_id": inst.type_id,
                "params": params,
                "constraint_params": list(inst.constraint_params),
            }
        )
    return {
        "schema_version": 1,
        "instances": insts,
        "cross_matrix": decomp.cross_matrix.tolist(),
    }


def decomposition_from_obj(obj: dict, lib: ConceptLibrary) -> SketchDecomposition:
    instances = []
    for io in obj["instances"]:
        t = lib.get(int(io["type_id"]))
        params = []
        for s, po in enumerate(io["params"]):
            if po is None:
                params.append(None)
            else:
                params.append(
                    PrimitiveInstance(t.slots[s], bool(po["construction"]), tuple(po["params"]))
                )
        instances.append(
            ConceptInstance(
                int(io["type_id"]),
                tuple(params),
                tuple(io.get("constraint_params", [None] * t.n_slots)),
            )
        )
    return SketchDecomposition(tuple(instances), np.array(obj["cross_matrix"], dtype=float))
