"""Symbolic token sequences for sketches.

Layout: START, then per-primitive [type, packed-param] groups, then
per-constraint [type, ref x arity] groups, with NEW between consecutive
element groups and END last. Ref tokens carry the sequence position of the
referenced primitive's type token, not the primitive index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import InvalidSketch
from .model import (
    CONSTRAINT_ARITY,
    ConstraintInstance,
    ConstraintKind,
    PrimitiveInstance,
    PrimitiveKind,
    SketchGraph,
    validate,
)


@dataclass(frozen=True)
class Token:
    tag: str  # START | END | NEW | PRIM | PARAM | CONSTR | REF
    value: Union[None, str, int, tuple] = None


TokenSequence = tuple[Token, ...]


def tokenize(sketch: SketchGraph) -> TokenSequence:
    """Serialize a validated sketch into its symbolic token sequence."""
    violations = validate(sketch)
    if violations:
        raise InvalidSketch(violations)

    tokens: list[Token] = [Token("START")]
    prim_type_pos: list[int] = []
    first = True
    for p in sketch.primitives:
        if not first:
            tokens.append(Token("NEW"))
        first = False
        prim_type_pos.append(len(tokens))
        tokens.append(Token("PRIM", p.kind.value))
        tokens.append(Token("PARAM", (int(p.construction),) + tuple(p.params)))
    for c in sketch.constraints:
        if not first:
            tokens.append(Token("NEW"))
        first = False
        tokens.append(Token("CONSTR", c.kind.value))
        for r in c.refs:
            tokens.append(Token("REF", prim_type_pos[r]))
    tokens.append(Token("END"))
    return tuple(tokens)


def detokenize(tokens: TokenSequence) -> SketchGraph:
    """Inverse of :func:`tokenize`; round-trips bit-exactly on valid input."""
    pos_to_prim: dict[int, int] = {}
    primitives: list[PrimitiveInstance] = []
    constraints: list[ConstraintInstance] = []
    i = 0
    if not tokens or tokens[0].tag != "START":
        raise ValueError("token sequence must begin with START")
    i = 1
    while i < len(tokens) and tokens[i].tag not in ("END",):
        tok = tokens[i]
        if tok.tag == "NEW":
            i += 1
            continue
        if tok.tag == "PRIM":
            param = tokens[i + 1]
            if param.tag != "PARAM":
                raise ValueError(f"primitive token at {i} not followed by PARAM")
            packed = param.value
            pos_to_prim[i] = len(primitives)
            primitives.append(
                PrimitiveInstance(PrimitiveKind(tok.value), bool(packed[0]), tuple(packed[1:]))
            )
            i += 2
        elif tok.tag == "CONSTR":
            kind = ConstraintKind(tok.value)
            arity = CONSTRAINT_ARITY[kind]
            refs = []
            for k in range(arity):
                ref = tokens[i + 1 + k]
                if ref.tag != "REF":
                    raise ValueError(f"constraint at {i} missing ref {k}")
                refs.append(pos_to_prim[ref.value])
            constraints.append(ConstraintInstance(kind, tuple(refs)))
            i += 1 + arity
        else:
            raise ValueError(f"unexpected token {tok.tag} at {i}")
    return SketchGraph(tuple(primitives), tuple(constraints))


def sequence_length(sketch: SketchGraph) -> int:
    """Token count implied by the layout, without materializing the tokens."""
    n_el = sketch.n_elements
    length = 2  # START + END
    length += 2 * len(sketch.primitives)
    length += sum(1 + CONSTRAINT_ARITY[c.kind] for c in sketch.constraints)
    length += max(0, n_el - 1)  # NEW separators
    return length
