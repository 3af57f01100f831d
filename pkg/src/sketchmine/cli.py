"""Command-line frontend: ingest, induce, parse, complete, eval, stats, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .completion import complete_sketch, synthesize_partial
from .concepts import (
    assemble_sketch,
    decomposition_to_obj,
    library_to_obj,
    load_library,
    save_library,
)
from .corpus import (
    denormalized_raw,
    ingest_corpus,
    load_raw_corpus,
    normalize,
    sketch_to_obj,
    write_corpus,
)
from .induction import induce_library, parse_sketch
from .matching import score_decomposition
from .metrics import evaluate, library_stats
from .model import validate
from .service import ServiceConfig, serve_forever
from .svg import render_svg


def _load_single_sketch(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    from .corpus import _raw_sketch_from_obj

    if "sketches" in doc:
        return _raw_sketch_from_obj(doc["sketches"][0], f"{path}:sketches[0]")
    return _raw_sketch_from_obj(doc, path)


def cmd_ingest(args) -> int:
    raws = load_raw_corpus(args.corpus)
    sketches, report = ingest_corpus(
        raws,
        size_min=args.size_min,
        size_max=args.size_max,
        augment=not args.no_augment,
        augment_copies=args.augment_copies,
        seed=args.seed,
    )
    write_corpus(args.out, [(denormalized_raw(s), s) for s in sketches])
    print(
        json.dumps(
            {
                "total": report.total,
                "kept": report.kept,
                "augmented": report.augmented,
                "dropped_size": report.dropped_size,
                "dropped_duplicate": report.dropped_duplicate,
                "errors": report.errors,
            }
        )
    )
    return 0


def cmd_induce(args) -> int:
    sketches, _ = _ingested(args.corpus)
    lib = induce_library(
        sketches,
        max_size=args.max_size,
        lambda_bias=args.lambda_bias,
        budget=args.budget,
    )
    save_library(lib, args.lib)
    print(
        json.dumps(
            {"concepts": len(lib.concepts), "induced": len(lib.concepts) - lib.n_builtin}
        )
    )
    return 0


def _ingested(path: str):
    raws = load_raw_corpus(path)
    return ingest_corpus(raws, size_min=0, size_max=10**9, dedup=False, augment=False)


def cmd_parse(args) -> int:
    lib = load_library(args.lib)
    raw = _load_single_sketch(args.sketch)
    sketch = normalize(raw)
    violations = validate(sketch)
    if violations:
        print(json.dumps({"error": violations}), file=sys.stderr)
        return 1
    result = parse_sketch(sketch, lib)
    prim_concepts = [
        result.decomposition.instances[inst].type_id if inst is not None else None
        for inst, _ in result.provenance.primitives
    ]
    prim_concepts = [t if t is not None and t >= lib.n_builtin else None for t in prim_concepts]
    out = {
        "schema_version": 1,
        "decomposition": decomposition_to_obj(result.decomposition, lib),
        "provenance": {
            "primitives": [list(x) for x in result.provenance.primitives],
            "constraints": [list(x) for x in result.provenance.constraints],
        },
        "residual_elements": result.residual_elements,
        "warnings": result.warnings,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(out, fh)
    else:
        print(json.dumps(out))
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_svg(sketch, prim_concepts))
    return 0


def cmd_complete(args) -> int:
    lib = load_library(args.lib)
    raw = _load_single_sketch(args.partial)
    sketch = normalize(raw)
    candidates = complete_sketch(sketch, lib, args.top_k)
    out = {
        "schema_version": 1,
        "candidates": [
            {
                "sketch": sketch_to_obj(denormalized_raw(c.sketch), c.sketch),
                "concept_id": c.concept_id,
                "score": None if c.score == float("inf") else c.score,
                "identity": c.score == float("inf"),
                "added_primitives": c.added_primitives,
                "added_constraints": c.added_constraints,
                "primitive_concepts": c.primitive_concepts,
                "constraint_concepts": c.constraint_concepts,
            }
            for c in candidates
        ],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(out, fh)
    else:
        print(json.dumps(out))
    return 0


def cmd_eval(args) -> int:
    lib = load_library(args.lib)
    sketches, _ = _ingested(args.corpus)
    reports = []
    loss_rows = []
    for sketch in sketches:
        result = parse_sketch(sketch, lib)
        assembly = assemble_sketch(result.decomposition, lib)
        reports.append(evaluate(assembly.sketch, sketch, assembly.provenance))
        if args.losses:
            loss_rows.append(score_decomposition(result.decomposition, lib, sketch))
    n = len(reports) or 1
    summary = {
        "schema_version": 1,
        "sketches": len(reports),
        "primitive_f_mean": sum(r.primitive_f for r in reports) / n,
        "constraint_f_mean": sum(r.constraint_f for r in reports) / n,
        "modularity_mean": _mean_or_none([r.modularity_percent for r in reports]),
        "per_sketch": [r.as_dict() for r in reports],
    }
    if args.losses:
        for row in loss_rows:
            print(json.dumps(row))
        summary["losses"] = loss_rows
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(summary, fh)
    print(
        json.dumps(
            {k: summary[k] for k in ("sketches", "primitive_f_mean", "constraint_f_mean", "modularity_mean")}
        )
    )
    if args.curves:
        rows = completion_curves(sketches, lib)
        with open(args.curves, "w", encoding="utf-8") as fh:
            fh.write("ratio,primitive_f,constraint_f\n")
            for ratio, pf, cf in rows:
                fh.write(f"{ratio},{pf},{cf}\n")
    return 0


def _mean_or_none(values):
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def completion_curves(sketches, lib, ratios=(0.1, 0.2, 0.3, 0.4, 0.5), seed: int = 0):
    """Per-ratio mean F-scores of top-1 completions against the originals."""
    rows = []
    for ratio in ratios:
        pfs, cfs = [], []
        for i, sketch in enumerate(sketches):
            partial = synthesize_partial(sketch, ratio, seed=seed + i)
            candidates = complete_sketch(partial.sketch, lib, top_k=1)
            completed = candidates[0].sketch if candidates else partial.sketch
            report = evaluate(completed, sketch)
            pfs.append(report.primitive_f)
            cfs.append(report.constraint_f)
        n = len(pfs) or 1
        rows.append((ratio, sum(pfs) / n, sum(cfs) / n))
    return rows


def cmd_stats(args) -> int:
    lib = load_library(args.lib)
    if args.corpus:
        sketches, _ = _ingested(args.corpus)
        parses = [parse_sketch(s, lib) for s in sketches]
        stats = library_stats(lib, parses)
    else:
        stats = {"library": {"concepts": len(lib.concepts), "builtin": lib.n_builtin}}
    out = json.dumps({"schema_version": 1, **stats})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        print(out)
    return 0


def cmd_serve(args) -> int:
    lib_path = args.lib or os.environ.get("CONCEPT_LIB")
    if not lib_path:
        print("no library: pass --lib or set CONCEPT_LIB", file=sys.stderr)
        return 2
    lib = load_library(lib_path)
    bind = args.bind or os.environ.get("BIND_ADDR", "127.0.0.1:8080")
    host, _, port = bind.rpartition(":")
    serve_forever(lib, ServiceConfig(bind_host=host or "127.0.0.1", bind_port=int(port)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sketchmine")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize, filter, dedup, augment a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--size-min", type=int, default=20)
    p.add_argument("--size-max", type=int, default=50)
    p.add_argument("--no-augment", action="store_true")
    p.add_argument("--augment-copies", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("induce", help="induce a concept library from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lib", required=True)
    p.add_argument("--max-size", type=int, default=1000)
    p.add_argument("--lambda-bias", type=float, default=0.5)
    p.add_argument("--budget", type=int, default=20000)
    p.add_argument("--seed", type=int, default=17)  # reserved; induction is deterministic
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("parse", help="parse a sketch into concept instances")
    p.add_argument("--lib", required=True)
    p.add_argument("--sketch", required=True)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("complete", help="complete a partial sketch")
    p.add_argument("--lib", required=True)
    p.add_argument("--partial", required=True)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("eval", help="round-trip evaluation over a corpus")
    p.add_argument("--lib", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--report")
    p.add_argument("--losses", action="store_true")
    p.add_argument("--curves")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="library usage statistics")
    p.add_argument("--lib", required=True)
    p.add_argument("--corpus")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--lib")
    p.add_argument("--bind")
    p.set_defaults(func=cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
