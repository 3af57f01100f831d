"""Record service responses for the studio's contract tests.

Builds the same library the demos use, drives the service handlers
in-process with the exact 3-sided rectangle the tests draw, and freezes the
responses into test/fixtures/studio.json. Re-run after changing the service
or the induction defaults:

    python frontend/scripts/record_fixtures.py
"""

import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "demos"))

from _shared import planted_corpus  # noqa: E402

from sketchmine.induction import induce_library  # noqa: E402
from sketchmine.service import ServiceConfig, ServiceState, handle_complete, handle_parse  # noqa: E402
from sketchmine.svg import PALETTE  # noqa: E402

# The rectangle's three drawn sides plus the constraints among them; the
# studio test replays these exact elements.
PARTIAL = {
    "schema_version": 1,
    "primitives": [
        {"kind": "line", "construction": False, "params": [-0.7, -0.45, 0.7, -0.45]},
        {"kind": "line", "construction": False, "params": [0.7, -0.45, 0.7, 0.45]},
        {"kind": "line", "construction": False, "params": [0.7, 0.45, -0.7, 0.45]},
    ],
    "constraints": [
        {"kind": "coincident", "refs": [0, 1]},
        {"kind": "coincident", "refs": [1, 2]},
        {"kind": "perpendicular", "refs": [0, 1]},
        {"kind": "parallel", "refs": [0, 2]},
    ],
}


def merge(partial: dict, candidate: dict) -> dict:
    """The client's accept rule: append the candidate's added elements."""
    doc = json.loads(json.dumps(partial))
    sketch = candidate["sketch"]
    for i in candidate["added_primitives"]:
        p = sketch["primitives"][i]
        doc["primitives"].append(
            {"kind": p["kind"], "construction": p["construction"], "params": p["params"]}
        )
    for i in candidate["added_constraints"]:
        c = sketch["constraints"][i]
        entry = {"kind": c["kind"], "refs": c["refs"]}
        if c.get("param") is not None:
            entry["param"] = c["param"]
        doc["constraints"].append(entry)
    return doc


def main() -> None:
    lib = induce_library(planted_corpus(30, seed=7), budget=5000)
    state = ServiceState(lib, ServiceConfig())

    complete_response, _ = handle_complete(state, {**PARTIAL, "top_k": 5})
    assert complete_response["candidates"], "expected completion candidates"
    top = complete_response["candidates"][0]
    accepted = merge(PARTIAL, top)
    parse_response, parse_headers = handle_parse(state, accepted)

    fixtures = {
        "palette": list(PALETTE),
        "partial": PARTIAL,
        "complete_response": complete_response,
        "accepted_document": accepted,
        "parse_response": parse_response,
        "parse_headers": parse_headers,
    }
    out = ROOT / "frontend" / "test" / "fixtures" / "studio.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixtures, indent=1))
    concepts = set(parse_response["primitive_concepts"])
    print(f"wrote {out}")
    print(f"accepted document parses into concepts: {concepts}")
    assert len(concepts) == 1 and None not in concepts, "expected a single-concept parse"


if __name__ == "__main__":
    main()
