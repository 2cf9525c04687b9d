"""Parsers and the streaming fusion pipeline.

The curated KB arrives as TSV (subject, predicate, object, optional
confidence); raw triples arrive as JSON-lines.  `ingest_stream` drives each
raw triple through predicate mapping, entity linking and confidence
scoring, appends the admitted fact, and hands completed batches to the
miner callback.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable, Iterator

from .errors import EmptyFile, FileNotFound, NousError, ParseError
from .linker import LinkDecision
from .store import CURATED, KgStore, Namespace, Origin, normalize_label


@dataclass(frozen=True)
class RawTriple:
    timestamp: int
    source_id: str
    subject_mention: str
    predicate_phrase: str
    object_mention: str
    context_tokens: tuple[str, ...] = ()


@dataclass
class Batch:
    index: int
    seqs: list[int]


@dataclass
class IngestReport:
    admitted: int = 0
    new_entities: int = 0
    unmapped_predicates: int = 0
    rejected: int = 0
    merged: int = 0
    batches: list[Batch] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "admitted": self.admitted,
            "newEntities": self.new_entities,
            "unmappedPredicates": self.unmapped_predicates,
            "rejected": self.rejected,
            "merged": self.merged,
            "batches": len(self.batches),
        }


def _parse_timestamp(value, line_no: int) -> int:
    if isinstance(value, bool):
        raise ParseError(line_no, "ts must be an epoch integer or YYYY-MM-DD")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            dt = datetime.strptime(value, "%Y-%m-%d").replace(tzinfo=timezone.utc)
        except ValueError:
            raise ParseError(line_no, f"bad date {value!r}") from None
        return int(dt.timestamp())
    raise ParseError(line_no, "ts must be an epoch integer or YYYY-MM-DD")


def parse_raw_triple_line(line: str, line_no: int = 0) -> RawTriple:
    """One JSON object -> RawTriple; unknown keys are ignored."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ParseError(line_no, f"invalid JSON: {e.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError(line_no, "line is not a JSON object")
    for key in ("ts", "source", "subj", "pred", "obj"):
        if key not in obj:
            raise ParseError(line_no, f"missing {key}")
    ts = _parse_timestamp(obj["ts"], line_no)
    subj = str(obj["subj"]).strip()
    pred = str(obj["pred"]).strip()
    objm = str(obj["obj"]).strip()
    if not subj or not pred or not objm:
        raise ParseError(line_no, "subj, pred and obj must be non-empty")
    ctx = obj.get("ctx", [])
    if not isinstance(ctx, list):
        raise ParseError(line_no, "ctx must be an array of strings")
    return RawTriple(ts, str(obj["source"]), subj, pred, objm,
                     tuple(str(t) for t in ctx))


def iter_raw_triples(lines: Iterable[str]) -> Iterator[tuple[int, RawTriple]]:
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        yield line_no, parse_raw_triple_line(line, line_no)


def load_curated_kb(store: KgStore, path: str,
                    type_predicate: str | None = None) -> tuple[int, int]:
    """Load the curated TSV into the store; returns (loaded, skipped).

    Lines are `subject<TAB>predicate<TAB>object[<TAB>confidence]`; `#`
    starts a comment.  Facts whose predicate matches `type_predicate` also
    record the object label as a type label of the subject entity.
    """
    if not os.path.isfile(path):
        raise FileNotFound(path)
    loaded = 0
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (3, 4) or not all(c.strip() for c in cols[:3]):
                skipped += 1
                continue
            confidence = 1.0
            if len(cols) == 4:
                try:
                    confidence = float(cols[3])
                except ValueError:
                    skipped += 1
                    continue
                if not (0.0 <= confidence <= 1.0):
                    skipped += 1
                    continue
            subj, pred, obj = (c.strip() for c in cols[:3])
            s = store.create_entity(subj, (), Origin.CURATED)
            o = store.create_entity(obj, (), Origin.CURATED)
            pid = store.register_predicate(pred, Namespace.ONTOLOGY)
            store.add_fact(s, pid, o, confidence, 0, CURATED)
            if type_predicate and normalize_label(pred) == normalize_label(type_predicate):
                store.add_type_label(s, store.entity(o).label)
            loaded += 1
    if loaded == 0:
        raise EmptyFile(f"{path}: no valid curated line")
    return loaded, skipped


@dataclass
class PipelineHooks:
    """Collaborators the stream pipeline calls per raw triple.

    map_predicate: phrase -> ontology predicate id, or None when unmapped.
    register_extracted: phrase -> predicate id in the extracted namespace.
    link: (mention, context tokens) -> LinkDecision (may create entities).
    score: (s, p, o) -> confidence for the candidate fact.
    """
    map_predicate: Callable[[str], int | None]
    register_extracted: Callable[[str], int]
    link: Callable[[str, list[str]], LinkDecision]
    score: Callable[[int, int, int], float]


def ingest_stream(lines: Iterable[str], store: KgStore, hooks: PipelineHooks,
                  batch_size: int,
                  on_batch: Callable[[Batch], None] | None = None,
                  extracted_predicate_policy: str = "create",
                  min_accept_confidence: float = 0.0,
                  batch_by: str = "count",
                  bucket_seconds: int = 86400,
                  first_batch_index: int = 0) -> IngestReport:
    """Run the fusion pipeline over a raw-triple stream.

    Per triple: map the predicate, link both mentions (creating extracted
    entities as needed), score confidence, then append with extracted
    provenance.  Every `batch_size` appended facts close a batch handed to
    `on_batch` (with `batch_by="time"`, batches close when the triple's
    time bucket changes instead).  A trailing partial batch is flushed.

    Duplicate facts merge into the existing one (max confidence) and count
    as `merged`, not admitted; batches only ever contain fresh appends.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if extracted_predicate_policy not in ("create", "drop"):
        raise ValueError(f"extracted predicate policy {extracted_predicate_policy!r}")
    if batch_by not in ("count", "time"):
        raise ValueError(f"batch_by {batch_by!r}")

    report = IngestReport()
    batch_index = first_batch_index
    current: list[int] = []
    current_bucket: int | None = None

    def close_batch():
        nonlocal batch_index, current, current_bucket
        if not current:
            return
        batch = Batch(batch_index, current)
        report.batches.append(batch)
        if on_batch is not None:
            on_batch(batch)
        batch_index += 1
        current = []
        current_bucket = None

    for line_no, raw in iter_raw_triples(lines):
        try:
            pid = hooks.map_predicate(raw.predicate_phrase)
            if pid is None:
                report.unmapped_predicates += 1
                if extracted_predicate_policy == "drop":
                    report.rejected += 1
                    continue
                pid = hooks.register_extracted(raw.predicate_phrase)
            ctx = list(raw.context_tokens)
            subj_decision = hooks.link(raw.subject_mention, ctx)
            obj_decision = hooks.link(raw.object_mention, ctx)
            report.new_entities += int(subj_decision.created) + int(obj_decision.created)
            s, o = subj_decision.resolved, obj_decision.resolved
            confidence = hooks.score(s, pid, o)
            if confidence < min_accept_confidence:
                report.rejected += 1
                continue
            before = store.fact_count
            seq = store.add_fact(s, pid, o, confidence, raw.timestamp,
                                 "extracted:" + raw.source_id)
        except NousError as e:
            e.args = (f"line {line_no}: {e}",)
            raise
        if store.fact_count == before:
            report.merged += 1
            continue
        if batch_by == "time":
            bucket = raw.timestamp // bucket_seconds
            if current and bucket != current_bucket:
                close_batch()
            current_bucket = bucket
        report.admitted += 1
        current.append(seq)
        if batch_by == "count" and len(current) == batch_size:
            close_batch()
    close_batch()
    return report


def read_stream_file(path: str) -> list[str]:
    if not os.path.isfile(path):
        raise FileNotFound(path)
    with open(path, encoding="utf-8") as fh:
        return fh.readlines()
