import pytest

from nous.errors import EmptyFile, FileNotFound, ParseError
from nous.ingest import (PipelineHooks, RawTriple, ingest_stream,
                         load_curated_kb, parse_raw_triple_line)
from nous.linker import LinkDecision
from nous.store import KgStore, Namespace, Origin


class TestParseRawTripleLine:
    def test_date_timestamp_and_default_ctx(self):
        line = ('{"ts":"2015-03-02","source":"wsj","subj":"Windermere",'
                '"pred":"is using","obj":"drones"}')
        raw = parse_raw_triple_line(line, 1)
        assert raw.timestamp == 1425254400  # 2015-03-02T00:00:00Z
        assert raw.context_tokens == ()
        assert raw.subject_mention == "Windermere"

    def test_minimal_epoch_form(self):
        raw = parse_raw_triple_line(
            '{"ts":0,"source":"s","subj":"a","pred":"r","obj":"b","ctx":[]}', 1)
        assert raw == RawTriple(0, "s", "a", "r", "b", ())

    def test_missing_ts(self):
        with pytest.raises(ParseError, match="missing ts"):
            parse_raw_triple_line(
                '{"source":"s","subj":"a","pred":"r","obj":"b"}', 3)

    def test_bad_json_carries_line_number(self):
        with pytest.raises(ParseError, match="line 7"):
            parse_raw_triple_line("{nope", 7)

    def test_empty_mention_rejected(self):
        with pytest.raises(ParseError):
            parse_raw_triple_line(
                '{"ts":0,"source":"s","subj":"  ","pred":"r","obj":"b"}', 1)

    def test_unknown_keys_ignored(self):
        raw = parse_raw_triple_line(
            '{"ts":5,"source":"s","subj":"a","pred":"r","obj":"b","extra":1}', 1)
        assert raw.timestamp == 5

    def test_bad_date(self):
        with pytest.raises(ParseError, match="bad date"):
            parse_raw_triple_line(
                '{"ts":"03/02/2015","source":"s","subj":"a","pred":"r","obj":"b"}', 1)


class TestLoadCuratedKb:
    def test_single_line(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("DJI\tmanufactures\tdrone\n", encoding="utf-8")
        store = KgStore()
        loaded, skipped = load_curated_kb(store, str(path))
        assert (loaded, skipped) == (1, 0)
        assert store.entity_count == 2
        snap = store.snapshot()
        assert snap.predicate(0).namespace == Namespace.ONTOLOGY
        assert snap.facts()[0].confidence == 1.0

    def test_blank_file_is_empty(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("\n", encoding="utf-8")
        with pytest.raises(EmptyFile):
            load_curated_kb(KgStore(), str(path))

    def test_malformed_lines_skipped_and_counted(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("a\tr\tb\n"
                        "c\tr\n"  # two columns
                        "d\tr\te\n"
                        "f\tr\tg\n", encoding="utf-8")
        loaded, skipped = load_curated_kb(KgStore(), str(path))
        assert (loaded, skipped) == (3, 1)

    def test_missing_file(self):
        with pytest.raises(FileNotFound):
            load_curated_kb(KgStore(), "/nonexistent/kb.tsv")

    def test_confidence_column(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("a\tr\tb\t0.8\n", encoding="utf-8")
        store = KgStore()
        load_curated_kb(store, str(path))
        assert store.facts_by_seq(0).confidence == 0.8

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("# header\na\tr\tb\n", encoding="utf-8")
        assert load_curated_kb(KgStore(), str(path)) == (1, 0)

    def test_type_predicate_assigns_labels(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("dji\ttype\tcompany\ndji\tmanufactures\tdrone\n",
                        encoding="utf-8")
        store = KgStore()
        load_curated_kb(store, str(path), type_predicate="type")
        ent = store.snapshot().find_entity("dji")
        assert ent.type_labels == ("company",)
        assert store.fact_count == 2  # the type line is still a fact


def simple_hooks(store: KgStore):
    """Pipeline that maps phrase 'r' to an ontology predicate, links by
    exact label (creating on miss), and scores a constant 0.5."""
    rid = store.register_predicate("r", Namespace.ONTOLOGY)

    def map_predicate(phrase):
        return rid if phrase.strip() == "r" else None

    def register_extracted(phrase):
        return store.register_predicate(phrase.strip(), Namespace.EXTRACTED)

    def link(mention, ctx):
        existing = store.find_entity_id(mention)
        if existing is not None:
            return LinkDecision(mention, existing, False, 1.0, 1)
        eid = store.create_entity(mention, (), Origin.EXTRACTED)
        return LinkDecision(mention, eid, True, 0.0, 0)

    def score(s, p, o):
        return 0.5

    return PipelineHooks(map_predicate, register_extracted, link, score)


def lines(n, pred="r", distinct_objects=True):
    return [
        f'{{"ts":{i}, "source":"src-{i}", "subj":"s{i}", "pred":"{pred}", '
        f'"obj":"o{i if distinct_objects else 0}"}}'
        for i in range(n)
    ]


class TestIngestStream:
    def test_ten_lines_two_batches(self):
        store = KgStore()
        batches = []
        report = ingest_stream(lines(10), store, simple_hooks(store), 5,
                               on_batch=batches.append)
        assert report.admitted == 10
        assert len(report.batches) == 2
        assert [b.index for b in batches] == [0, 1]
        assert sum(len(b.seqs) for b in report.batches) == report.admitted

    def test_trailing_partial_batch_flushed(self):
        store = KgStore()
        report = ingest_stream(lines(7), store, simple_hooks(store), 5)
        assert [len(b.seqs) for b in report.batches] == [5, 2]

    def test_timestamps_preserved(self):
        store = KgStore()
        ingest_stream(lines(3), store, simple_hooks(store), 5)
        assert [store.facts_by_seq(i).timestamp for i in range(3)] == [0, 1, 2]

    def test_unmapped_policy_create_vs_drop(self):
        store_create = KgStore()
        report_create = ingest_stream(
            lines(3) + ['{"ts":9,"source":"x","subj":"a","pred":"zz","obj":"b"}'],
            store_create, simple_hooks(store_create), 10,
            extracted_predicate_policy="create")
        store_drop = KgStore()
        report_drop = ingest_stream(
            lines(3) + ['{"ts":9,"source":"x","subj":"a","pred":"zz","obj":"b"}'],
            store_drop, simple_hooks(store_drop), 10,
            extracted_predicate_policy="drop")
        assert report_create.unmapped_predicates == 1
        assert report_drop.unmapped_predicates == 1
        assert report_create.admitted - report_drop.admitted == 1
        assert report_drop.rejected == 1
        ns = {p.namespace for p in store_create.snapshot().predicates()}
        assert Namespace.EXTRACTED in ns

    def test_duplicates_merge_not_admitted(self):
        store = KgStore()
        same = '{"ts":1,"source":"x","subj":"a","pred":"r","obj":"b"}'
        report = ingest_stream([same, same], store, simple_hooks(store), 10)
        assert report.admitted == 1
        assert report.merged == 1
        assert store.fact_count == 1

    def test_min_accept_confidence_rejects(self):
        store = KgStore()
        report = ingest_stream(lines(2), store, simple_hooks(store), 10,
                               min_accept_confidence=0.8)
        assert report.admitted == 0
        assert report.rejected == 2
        assert store.fact_count == 0

    def test_new_entity_count(self):
        store = KgStore()
        report = ingest_stream(lines(2), store, simple_hooks(store), 10)
        assert report.new_entities == 4  # two fresh mentions per line

    def test_time_based_batching(self):
        store = KgStore()
        raw = [
            '{"ts":10,"source":"a","subj":"s1","pred":"r","obj":"o1"}',
            '{"ts":20,"source":"a","subj":"s2","pred":"r","obj":"o2"}',
            '{"ts":120,"source":"a","subj":"s3","pred":"r","obj":"o3"}',
        ]
        report = ingest_stream(raw, store, simple_hooks(store), 999,
                               batch_by="time", bucket_seconds=100)
        assert [len(b.seqs) for b in report.batches] == [2, 1]

    def test_parse_error_propagates_with_line(self):
        store = KgStore()
        with pytest.raises(ParseError, match="line 2"):
            ingest_stream([lines(1)[0], "{broken"], store,
                          simple_hooks(store), 5)

    def test_batch_indices_continue_from_first_index(self):
        store = KgStore()
        report = ingest_stream(lines(6), store, simple_hooks(store), 5,
                               first_batch_index=4)
        assert [b.index for b in report.batches] == [4, 5]
