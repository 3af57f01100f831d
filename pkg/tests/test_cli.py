"""End-to-end CLI flows over temp files."""

import json
import random
import subprocess
import sys

import pytest

from sketchmine.cli import main
from sketchmine.corpus import denormalized_raw, sketch_to_obj

from conftest import planted_corpus, planted_sketch_frame_last


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "corpus.json"
    corpus = planted_corpus(12, seed=41)
    doc = {"sketches": [sketch_to_obj(denormalized_raw(s)) for s in corpus]}
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, corpus_file):
    d = tmp_path_factory.mktemp("cli_artifacts")
    ingested = str(d / "ingested.json")
    lib = str(d / "lib.json")
    assert main(["ingest", "--corpus", corpus_file, "--out", ingested, "--no-augment"]) == 0
    assert (
        main(
            [
                "induce",
                "--corpus",
                ingested,
                "--lib",
                lib,
                "--max-size",
                "200",
                "--budget",
                "3000",
            ]
        )
        == 0
    )
    return {"dir": d, "ingested": ingested, "lib": lib}


class TestCliFlow:
    def test_ingest_report(self, corpus_file, tmp_path, capsys):
        out = str(tmp_path / "out.json")
        assert main(["ingest", "--corpus", corpus_file, "--out", out, "--no-augment"]) == 0
        report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert report["kept"] > 0
        doc = json.loads(open(out).read())
        assert doc["schema_version"] == 1
        assert "quantized" in doc["sketches"][0]["primitives"][0]

    def test_ingest_augment_flag(self, corpus_file, tmp_path, capsys):
        out = str(tmp_path / "aug.json")
        assert main(["ingest", "--corpus", corpus_file, "--out", out]) == 0
        report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert report["augmented"] > 0

    def test_parse_with_svg(self, workdir, tmp_path, capsys):
        sketch_file = str(tmp_path / "sketch.json")
        ingested = json.loads(open(workdir["ingested"]).read())
        sketch_file_doc = {"sketches": [ingested["sketches"][0]]}
        open(sketch_file, "w").write(json.dumps(sketch_file_doc))
        out = str(tmp_path / "decomp.json")
        svg = str(tmp_path / "out.svg")
        assert (
            main(
                ["parse", "--lib", workdir["lib"], "--sketch", sketch_file, "--out", out, "--svg", svg]
            )
            == 0
        )
        decomp = json.loads(open(out).read())
        assert decomp["schema_version"] == 1
        assert len(decomp["decomposition"]["instances"]) >= 5
        assert open(svg).read().startswith("<svg")

    def test_complete(self, workdir, tmp_path, capsys):
        rng = random.Random(43)
        sketch = planted_sketch_frame_last(rng, noise_elements=12)
        partial_doc = {"sketches": [sketch_to_obj(denormalized_raw(sketch))]}
        # chop the final line off the raw record to make it partial
        partial_doc["sketches"][0]["primitives"] = partial_doc["sketches"][0]["primitives"][:-1]
        partial_doc["sketches"][0]["constraints"] = [
            c
            for c in partial_doc["sketches"][0]["constraints"]
            if all(r < len(partial_doc["sketches"][0]["primitives"]) for r in c["refs"])
        ]
        pfile = str(tmp_path / "partial.json")
        open(pfile, "w").write(json.dumps(partial_doc))
        out = str(tmp_path / "candidates.json")
        assert main(["complete", "--lib", workdir["lib"], "--partial", pfile, "--out", out]) == 0
        doc = json.loads(open(out).read())
        assert doc["candidates"], "expected at least one candidate"
        assert doc["candidates"][0]["added_primitives"]

    def test_eval_report_and_curves(self, workdir, tmp_path, capsys):
        report = str(tmp_path / "report.json")
        curves = str(tmp_path / "curves.csv")
        assert (
            main(
                [
                    "eval",
                    "--lib",
                    workdir["lib"],
                    "--corpus",
                    workdir["ingested"],
                    "--report",
                    report,
                    "--curves",
                    curves,
                ]
            )
            == 0
        )
        doc = json.loads(open(report).read())
        assert doc["primitive_f_mean"] == 1.0
        assert doc["constraint_f_mean"] == 1.0
        lines = open(curves).read().strip().splitlines()
        assert lines[0] == "ratio,primitive_f,constraint_f"
        assert len(lines) == 6

    def test_eval_losses(self, workdir, capsys):
        assert (
            main(["eval", "--lib", workdir["lib"], "--corpus", workdir["ingested"], "--losses"])
            == 0
        )
        out_lines = capsys.readouterr().out.strip().splitlines()
        rows = [json.loads(l) for l in out_lines if l.startswith("{")]
        loss_rows = [r for r in rows if "total" in r]
        assert loss_rows
        for row in loss_rows:
            assert row["recon"] == pytest.approx(0.0, abs=1e-9)
            assert row["sharp"] == pytest.approx(0.0, abs=1e-9)

    def test_stats(self, workdir, tmp_path):
        out = str(tmp_path / "stats.json")
        assert (
            main(
                ["stats", "--lib", workdir["lib"], "--corpus", workdir["ingested"], "--out", out]
            )
            == 0
        )
        doc = json.loads(open(out).read())
        assert doc["usage"][0]["count"] > 0
        assert "complexity_histogram" in doc


class TestDeterminism:
    def test_induce_byte_identical_across_processes(self, corpus_file, tmp_path):
        ingested = str(tmp_path / "i.json")
        assert main(["ingest", "--corpus", corpus_file, "--out", ingested, "--no-augment"]) == 0
        libs = []
        for i in range(2):
            lib = str(tmp_path / f"lib{i}.json")
            proc = subprocess.run(
                [
                    sys.executable,
                    "-m",
                    "sketchmine.cli",
                    "induce",
                    "--corpus",
                    ingested,
                    "--lib",
                    lib,
                    "--budget",
                    "2000",
                ],
                capture_output=True,
                env={"PYTHONHASHSEED": str(i), "PATH": "/usr/bin:/bin"},
            )
            assert proc.returncode == 0, proc.stderr.decode()
            libs.append(open(lib, "rb").read())
        assert libs[0] == libs[1]
