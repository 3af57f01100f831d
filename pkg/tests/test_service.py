"""HTTP service endpoints over an in-process server."""

import json
import random
import threading
import urllib.error
import urllib.request

import pytest

from sketchmine.corpus import denormalized_raw, sketch_to_obj
from sketchmine.induction import induce_library
from sketchmine.service import ServiceConfig, make_server

from conftest import frame_elements, planted_corpus
from sketchmine.corpus import RawSketch


@pytest.fixture(scope="module")
def server():
    corpus = planted_corpus(10, seed=37)
    lib = induce_library(corpus, budget=3000)
    srv = make_server(lib, ServiceConfig(bind_host="127.0.0.1", bind_port=0))
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    host, port = srv.server_address[:2]
    yield f"http://{host}:{port}"
    srv.shutdown()


def _post(base, path, payload, raw=None):
    data = raw if raw is not None else json.dumps(payload).encode()
    req = urllib.request.Request(
        base + path, data=data, headers={"content-type": "application/json"}
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read()), dict(resp.headers)
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read()), dict(exc.headers)


def _get(base, path):
    with urllib.request.urlopen(base + path) as resp:
        return resp.status, json.loads(resp.read()), dict(resp.headers)


def frame_request_body(keep_lines=4):
    prims, cons = frame_elements(w=1.4, h=0.9)
    prims = prims[:keep_lines]
    cons = [c for c in cons if all(r < keep_lines for r in c.refs)]
    return {"schema_version": 1, **sketch_to_obj(RawSketch(tuple(prims), tuple(cons)))}


class TestEndpoints:
    def test_healthz(self, server):
        status, body, _ = _get(server, "/healthz")
        assert status == 200 and body["status"] == "ok"

    def test_parse_rectangle(self, server):
        status, body, headers = _post(server, "/v1/parse", frame_request_body())
        assert status == 200
        assert headers["x-roundtrip"] == "ok"
        assert body["report"]["primitive_f"] == 1.0
        assert body["report"]["constraint_f"] == 1.0
        assert body["svg"].startswith("<svg")
        # one induced instance covers all four lines
        concepts = set(body["primitive_concepts"])
        assert len(concepts) == 1 and None not in concepts

    def test_parse_deterministic(self, server):
        a = _post(server, "/v1/parse", frame_request_body())
        b = _post(server, "/v1/parse", frame_request_body())
        assert a[1] == b[1]

    def test_malformed_json_400(self, server):
        status, body, _ = _post(server, "/v1/parse", None, raw=b"{not json")
        assert status == 400
        assert "parse error at offset" in body["error"]

    def test_payload_too_large_413(self, server):
        status, _, _ = _post(server, "/v1/parse", None, raw=b" " * (2 << 20))
        assert status == 413

    def test_invalid_sketch_400(self, server):
        bad = {"primitives": [{"kind": "line", "params": [0, 0]}], "constraints": []}
        status, body, _ = _post(server, "/v1/parse", bad)
        assert status == 400 and "error" in body

    def test_complete_three_sided(self, server):
        status, body, _ = _post(
            server, "/v1/complete", {**frame_request_body(keep_lines=3), "top_k": 5}
        )
        assert status == 200
        candidates = body["candidates"]
        assert candidates
        top = candidates[0]
        assert len(top["added_primitives"]) == 1
        added_kinds = [
            top["sketch"]["primitives"][i]["kind"] for i in top["added_primitives"]
        ]
        assert added_kinds == ["line"]

    def test_complete_whole_sketch_identity_first(self, server):
        status, body, _ = _post(server, "/v1/complete", frame_request_body())
        assert status == 200
        assert body["candidates"][0]["identity"] is True

    def test_complete_empty_sketch(self, server):
        status, body, _ = _post(
            server, "/v1/complete", {"primitives": [], "constraints": []}
        )
        assert status == 200 and body["candidates"] == []

    def test_library_and_stats(self, server):
        status, lib_obj, headers = _get(server, "/v1/library")
        assert status == 200
        assert lib_obj["k_l0"] == 12 and lib_obj["k_arg"] == 2
        assert "x-library-hash" in headers
        status2, stats, headers2 = _get(server, "/v1/stats")
        assert status2 == 200
        assert stats["induced"] == len(lib_obj["concepts"]) - stats["builtin"]
        assert headers["x-library-hash"] == headers2["x-library-hash"]

    def test_cors_preflight(self, server):
        req = urllib.request.Request(server + "/v1/parse", method="OPTIONS")
        with urllib.request.urlopen(req) as resp:
            assert resp.status == 204
            assert resp.headers["access-control-allow-origin"] == "*"

    def test_not_found(self, server):
        status, _, _ = _post(server, "/v1/unknown", {})
        assert status == 404
