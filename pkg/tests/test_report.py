import json
import shutil
from pathlib import Path

import pytest

from nous.config import load_config
from nous.engine import Engine
from nous.report import write_report

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "drone"


@pytest.fixture
def engine(tmp_path, monkeypatch):
    for name in ("curated.tsv", "seeds.jsonl", "stream.jsonl", "nous.json"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    monkeypatch.chdir(tmp_path)
    engine = Engine(load_config("nous.json"))
    engine.load_kb("curated.tsv")
    engine.load_seeds("seeds.jsonl")
    engine.ingest_file("stream.jsonl")
    return engine


def test_report_writes_figures_and_tables(engine, tmp_path):
    manifest = write_report(engine, str(tmp_path / "out"))
    assert set(manifest["files"]) == {
        "confidence_histogram.png", "pattern_supports.png",
        "predicate_counts.png", "summary.tsv", "predicates.tsv",
        "patterns.tsv"}
    out = tmp_path / "out"
    for name in manifest["files"]:
        path = out / name
        assert path.stat().st_size > 0
        if name.endswith(".png"):
            assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    summary = dict(
        line.split("\t") for line in
        (out / "summary.tsv").read_text().strip().splitlines()[1:])
    assert int(summary["facts"]) == engine.store.fact_count
    assert int(summary["curatedFacts"]) + int(summary["extractedFacts"]) \
        == engine.store.fact_count

    pattern_rows = (out / "patterns.tsv").read_text().strip().splitlines()[1:]
    assert len(pattern_rows) == len(engine.trending)


def test_report_on_empty_engine(tmp_path, monkeypatch):
    (tmp_path / "nous.json").write_text("{}", encoding="utf-8")
    monkeypatch.chdir(tmp_path)
    engine = Engine(load_config("nous.json"))
    manifest = write_report(engine, str(tmp_path / "out"))
    assert (tmp_path / "out" / "summary.tsv").exists()
    assert len(manifest["files"]) == 6
