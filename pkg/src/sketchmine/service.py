"""HTTP service exposing parse, completion, library, and stats endpoints.

Endpoints: POST /v1/parse, POST /v1/complete, GET /v1/library, GET /v1/stats,
GET /healthz. Bodies mirror the CLI file formats. Handlers share an
immutable library snapshot; swapping the library is an atomic reference
swap. Responses carry the library content hash so clients can detect swaps.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .completion import complete_sketch
from .concepts import ConceptLibrary, assemble_sketch, decomposition_to_obj, library_to_obj, validate_concept_type
from .corpus import (
    _quantize_scaled,
    _raw_sketch_from_obj,
    denormalized_raw,
    normalize,
    normalize_transform,
    sketch_to_obj,
)
from .errors import DegenerateSketch, ParseError
from .induction import parse_sketch
from .metrics import evaluate
from .model import (
    CONSTRAINT_PARAM,
    DEFAULT_QUANT,
    PRIMITIVE_SCHEMAS,
    ParamKind,
    dequantized_geometry,
    validate,
)
from .svg import render_svg

MAX_BODY_BYTES = 1 << 20


@dataclass
class ServiceConfig:
    bind_host: str = "127.0.0.1"
    bind_port: int = 8080
    max_body_bytes: int = MAX_BODY_BYTES
    cors_origin: str = "*"


class LibrarySnapshot:
    def __init__(self, lib: ConceptLibrary):
        violations = [
            v for t in lib.concepts for v in validate_concept_type(t)
        ]
        if violations:
            raise ValueError(f"library failed validation: {violations[:3]}")
        self.lib = lib
        doc = json.dumps(library_to_obj(lib), sort_keys=True).encode()
        self.content_hash = hashlib.sha256(doc).hexdigest()


class ServiceState:
    """Holds the swappable snapshot; handlers read it once per request."""

    def __init__(self, lib: ConceptLibrary, config: ServiceConfig):
        self.config = config
        self._lock = threading.Lock()
        self._snapshot = LibrarySnapshot(lib)

    @property
    def snapshot(self) -> LibrarySnapshot:
        return self._snapshot

    def swap_library(self, lib: ConceptLibrary) -> None:
        snap = LibrarySnapshot(lib)
        with self._lock:
            self._snapshot = snap


def _sketch_from_request(obj: dict):
    if "sketches" in obj:
        if not obj["sketches"]:
            raise ParseError("empty sketches list", "request")
        obj = obj["sketches"][0]
    return _raw_sketch_from_obj(obj, "request")


def handle_parse(state: ServiceState, body: dict) -> tuple[dict, dict]:
    """Core of POST /v1/parse; returns (response json, extra headers)."""
    raw = _sketch_from_request(body)
    try:
        sketch = normalize(raw)
    except DegenerateSketch as exc:
        raise ParseError(str(exc), "request") from exc
    violations = validate(sketch)
    if violations:
        raise ParseError("; ".join(violations), "request")
    snap = state.snapshot
    result = parse_sketch(sketch, snap.lib)
    assembly = assemble_sketch(result.decomposition, snap.lib)
    report = evaluate(assembly.sketch, sketch, assembly.provenance)
    roundtrip = report.primitive_f == 1.0 and report.constraint_f == 1.0
    prim_concepts = [
        result.decomposition.instances[inst].type_id
        for inst, _ in result.provenance.primitives
    ]
    response = {
        "schema_version": 1,
        "sketch": sketch_to_obj(denormalized_raw(sketch), sketch),
        "decomposition": decomposition_to_obj(result.decomposition, snap.lib),
        "provenance": {
            "primitives": [list(x) for x in result.provenance.primitives],
            "constraints": [list(x) for x in result.provenance.constraints],
        },
        "primitive_concepts": [
            tid if tid >= snap.lib.n_builtin else None for tid in prim_concepts
        ],
        "residual_elements": result.residual_elements,
        "warnings": result.warnings,
        "svg": render_svg(
            sketch,
            [tid if tid >= snap.lib.n_builtin else None for tid in prim_concepts],
        ),
        "report": report.as_dict(),
    }
    headers = {"x-roundtrip": "ok" if roundtrip else "mismatch"}
    return response, headers


def _unmap_value(value: float, kind: ParamKind, cx: float, cy: float, scale: float, is_x: bool):
    if kind is ParamKind.COORD:
        return value / scale + (cx if is_x else cy)
    if kind is ParamKind.LENGTH:
        return value / scale
    return value


def _candidate_obj(cand, raw, cx, cy, scale) -> dict:
    """Candidate JSON with geometry mapped back into the client's frame:
    the retained prefix is the request verbatim, added elements are the
    normalized completion inverse-transformed."""
    n_prims, n_cons = len(raw.primitives), len(raw.constraints)
    prims = []
    for i, q in enumerate(cand.sketch.primitives):
        if i < n_prims:
            params = list(raw.primitives[i].params)
            construction = raw.primitives[i].construction
        else:
            geo = dequantized_geometry(q)
            schema = PRIMITIVE_SCHEMAS[q.kind]
            params = [
                _unmap_value(v, pk, cx, cy, scale, pos % 2 == 0)
                for pos, (v, pk) in enumerate(zip(geo, schema))
            ]
            construction = q.construction
        prims.append(
            {
                "kind": q.kind.value,
                "construction": construction,
                "params": params,
                "quantized": list(q.params),
            }
        )
    cons = []
    for i, q in enumerate(cand.sketch.constraints):
        co = {"kind": q.kind.value, "refs": list(q.refs)}
        if i < n_cons and raw.constraints[i].param is not None:
            co["param"] = raw.constraints[i].param
        elif q.param is not None:
            pk = CONSTRAINT_PARAM[q.kind]
            co["param"] = _unmap_value(
                DEFAULT_QUANT.dequantize(q.param, pk), pk, cx, cy, scale, False
            )
        if q.param is not None:
            co["quantized_param"] = q.param
        cons.append(co)
    return {
        "sketch": {"primitives": prims, "constraints": cons},
        "concept_id": cand.concept_id,
        "score": cand.score if cand.score != float("inf") else None,
        "identity": cand.score == float("inf"),
        "added_primitives": cand.added_primitives,
        "added_constraints": cand.added_constraints,
        "primitive_concepts": cand.primitive_concepts,
        "constraint_concepts": cand.constraint_concepts,
        "svg": render_svg(cand.sketch, cand.primitive_concepts),
    }


def handle_complete(state: ServiceState, body: dict) -> tuple[dict, dict]:
    top_k = int(body.get("top_k", 5))
    raw = _sketch_from_request(body)
    snap = state.snapshot
    if not raw.primitives:
        return {"schema_version": 1, "candidates": []}, {}
    try:
        cx, cy, scale = normalize_transform(raw)
    except DegenerateSketch as exc:
        raise ParseError(str(exc), "request") from exc
    sketch = _quantize_scaled(raw, cx, cy, scale, DEFAULT_QUANT)
    violations = validate(sketch)
    if violations:
        raise ParseError("; ".join(violations), "request")
    candidates = complete_sketch(sketch, snap.lib, top_k)
    out = [_candidate_obj(cand, raw, cx, cy, scale) for cand in candidates]
    return {"schema_version": 1, "candidates": out}, {}


def handle_stats(state: ServiceState) -> dict:
    snap = state.snapshot
    lib = snap.lib
    sizes: dict[int, int] = {}
    for t in lib.concepts:
        sizes[t.n_elements] = sizes.get(t.n_elements, 0) + 1
    return {
        "schema_version": 1,
        "concepts": len(lib.concepts),
        "builtin": lib.n_builtin,
        "induced": len(lib.concepts) - lib.n_builtin,
        "lambda_bias": lib.lambda_bias,
        "complexity_histogram": dict(sorted(sizes.items())),
        "counts": lib.counts,
    }


def make_handler(state: ServiceState):
    class Handler(BaseHTTPRequestHandler):
        server_version = "sketchmine"

        def log_message(self, *args):  # tests stay quiet
            pass

        def _send(self, code: int, payload: dict, headers: dict | None = None):
            body = json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("content-type", "application/json")
            self.send_header("content-length", str(len(body)))
            self.send_header("access-control-allow-origin", state.config.cors_origin)
            self.send_header("x-library-hash", state.snapshot.content_hash)
            for k, v in (headers or {}).items():
                self.send_header(k, v)
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("access-control-allow-origin", state.config.cors_origin)
            self.send_header("access-control-allow-methods", "GET, POST, OPTIONS")
            self.send_header("access-control-allow-headers", "content-type")
            self.end_headers()

        def do_GET(self):
            if self.path == "/healthz":
                self._send(200, {"status": "ok"})
            elif self.path == "/v1/library":
                self._send(200, library_to_obj(state.snapshot.lib))
            elif self.path == "/v1/stats":
                self._send(200, handle_stats(state))
            else:
                self._send(404, {"error": "not found"})

        def do_POST(self):
            length = int(self.headers.get("content-length", 0))
            if length > state.config.max_body_bytes:
                remaining = length  # drain so the client can finish writing
                while remaining > 0:
                    chunk = self.rfile.read(min(remaining, 1 << 16))
                    if not chunk:
                        break
                    remaining -= len(chunk)
                self._send(413, {"error": "request body too large"})
                return
            data = self.rfile.read(length)
            try:
                body = json.loads(data)
            except json.JSONDecodeError as exc:
                self._send(400, {"error": f"parse error at offset {exc.pos}"})
                return
            try:
                if self.path == "/v1/parse":
                    payload, headers = handle_parse(state, body)
                    self._send(200, payload, headers)
                elif self.path == "/v1/complete":
                    payload, headers = handle_complete(state, body)
                    self._send(200, payload, headers)
                else:
                    self._send(404, {"error": "not found"})
            except ParseError as exc:
                self._send(400, {"error": str(exc)})

    return Handler


def make_server(lib: ConceptLibrary, config: ServiceConfig | None = None) -> ThreadingHTTPServer:
    config = config or ServiceConfig()
    state = ServiceState(lib, config)
    server = ThreadingHTTPServer((config.bind_host, config.bind_port), make_handler(state))
    server.state = state
    return server


def serve_forever(lib: ConceptLibrary, config: ServiceConfig | None = None) -> None:
    server = make_server(lib, config)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
