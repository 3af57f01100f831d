"""The HTTP service: parse and complete over the wire.

Starts an in-process server on an ephemeral port, exercises every endpoint,
and shuts down. The JSON bodies are exactly the CLI file formats.

Run: python demos/07_service.py
"""

import json
import threading
import urllib.request

from sketchmine.corpus import sketch_to_obj, RawSketch
from sketchmine.induction import induce_library
from sketchmine.service import ServiceConfig, make_server
from _shared import frame, planted_corpus

lib = induce_library(planted_corpus(15, seed=13), budget=4000)
server = make_server(lib, ServiceConfig(bind_host="127.0.0.1", bind_port=0))
threading.Thread(target=server.serve_forever, daemon=True).start()
host, port = server.server_address[:2]
base = f"http://{host}:{port}"
print("serving on", base)


def call(path, payload=None):
    if payload is None:
        with urllib.request.urlopen(base + path) as resp:
            return resp.status, json.loads(resp.read()), dict(resp.headers)
    req = urllib.request.Request(
        base + path, data=json.dumps(payload).encode(),
        headers={"content-type": "application/json"},
    )
    with urllib.request.urlopen(req) as resp:
        return resp.status, json.loads(resp.read()), dict(resp.headers)


status, body, _ = call("/healthz")
print("/healthz ->", status, body)

prims, cons = frame(w=1.3, h=0.8)
sketch_body = sketch_to_obj(RawSketch(tuple(prims), tuple(cons)))
status, body, headers = call("/v1/parse", sketch_body)
print(
    f"/v1/parse -> {status}, roundtrip {headers['x-roundtrip']}, "
    f"{len(body['decomposition']['instances'])} instances, svg {len(body['svg'])} bytes"
)

partial = sketch_to_obj(
    RawSketch(tuple(prims[:3]), tuple(c for c in cons if all(r < 3 for r in c.refs)))
)
status, body, _ = call("/v1/complete", {**partial, "top_k": 3})
top = body["candidates"][0]
print(
    f"/v1/complete -> {status}, {len(body['candidates'])} candidates, "
    f"top adds {len(top['added_primitives'])} primitives "
    f"+ {len(top['added_constraints'])} constraints"
)

status, body, _ = call("/v1/stats")
print("/v1/stats ->", status, {k: body[k] for k in ("concepts", "builtin", "induced")})

server.shutdown()
print("done")
