"""Modular concept discovery for parametric CAD sketches.

The toolkit ingests constraint-graph sketch corpora, discovers a library of
reusable sketch concepts by combinatorial search under explicit loss
functions, parses sketches into concept instances, evaluates reconstruction
and modularity, and completes partial sketches concept by concept.
"""

from .model import (
    CONSTRAINT_ARITY,
    CONSTRAINT_PARAM,
    DEFAULT_QUANT,
    PRIMITIVE_SCHEMAS,
    ConstraintInstance,
    ConstraintKind,
    ParamKind,
    PrimitiveInstance,
    PrimitiveKind,
    QuantizationSpec,
    SketchGraph,
    validate,
)
from .corpus import (
    IngestReport,
    RawConstraint,
    RawPrimitive,
    RawSketch,
    ingest_corpus,
    ingest_corpus_file,
    load_raw_corpus,
    normalize,
    recompute_constraint_params,
    write_corpus,
)
from .tokens import Token, detokenize, tokenize
from .raster import raster_dedup_key, rasterize
from .concepts import (
    MIN_INSTANCES,
    N_ARGS,
    N_SLOTS,
    AssemblyResult,
    ConceptInstance,
    ConceptLibrary,
    ConceptType,
    SketchDecomposition,
    assemble_sketch,
    builtin_library,
    compose_cross_refs,
    expand_instance,
    load_library,
    save_library,
    validate_concept_type,
)
from .matching import (
    GeneratedElement,
    MatchingResult,
    binary_cost_matrix,
    loss_bias,
    loss_sharp,
    loss_total,
    match_graphs,
    score_decomposition,
    unary_cost_matrix,
)
from .vq import Codebook, assign_and_loss, ema_update, new_codebook, revive_dead
from .induction import (
    CandidateConcept,
    ParseResult,
    canonical_key,
    enumerate_candidates,
    induce_library,
    parse_sketch,
)
from .completion import (
    CompletionCandidate,
    PartialSketch,
    complete_sketch,
    synthesize_partial,
)
from .metrics import EvalReport, evaluate, fscore, library_stats, modularity

__version__ = "0.1.0"
