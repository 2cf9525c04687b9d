import pytest
from hypothesis import given, strategies as st

from nous.errors import ConfidenceOutOfRange, EmptyLabel, UnknownEntity
from nous.store import (CURATED, KgStore, Origin, extracted,
                        normalize_label)


class TestNormalizeLabel:
    def test_collapses_whitespace(self):
        assert normalize_label("  Wall  Street Journal ") == "wall street journal"

    def test_lowercases(self):
        assert normalize_label("DJI") == "dji"

    def test_nfc_composition(self):
        decomposed = "Café"  # e + combining acute
        assert normalize_label(decomposed) == "café"

    @given(st.text(max_size=30))
    def test_idempotent(self, raw):
        once = normalize_label(raw)
        assert normalize_label(once) == once


class TestCreateEntity:
    def test_new_entity(self):
        store = KgStore()
        eid = store.create_entity("DJI", ["company"], Origin.CURATED)
        assert store.entity(eid).label == "dji"
        assert store.entity(eid).type_labels == ("company",)

    def test_idempotent_by_label(self):
        store = KgStore()
        first = store.create_entity("DJI", ["company"], Origin.CURATED)
        second = store.create_entity("DJI", ["company"], Origin.CURATED)
        assert first == second
        assert store.entity_count == 1

    def test_normalization_merges_variants(self):
        store = KgStore()
        first = store.create_entity("DJI", ["company"], Origin.CURATED)
        second = store.create_entity("  dji ", [], Origin.EXTRACTED)
        assert first == second

    def test_empty_label_rejected(self):
        with pytest.raises(EmptyLabel):
            KgStore().create_entity("   ")

    def test_type_labels_deduped(self):
        store = KgStore()
        eid = store.create_entity("x", ["a", "a", "b"])
        assert store.entity(eid).type_labels == ("a", "b")

    @given(st.text(min_size=1, max_size=12),
           st.integers(min_value=0, max_value=3))
    def test_idempotent_under_normalization_equivalence(self, label, pad):
        store = KgStore()
        try:
            first = store.create_entity(label)
        except EmptyLabel:
            return
        noisy = " " * pad + label.upper() + " " * pad
        if normalize_label(noisy) == normalize_label(label):
            assert store.create_entity(noisy) == first


class TestAddFact:
    def test_first_fact_gets_seq_zero(self, drone_store):
        store = KgStore()
        a = store.create_entity("dji")
        b = store.create_entity("drone")
        p = store.register_predicate("manufactures")
        assert store.add_fact(a, p, b, 1.0, 0, CURATED) == 0

    def test_duplicate_keeps_max_confidence(self):
        store = KgStore()
        a = store.create_entity("a")
        b = store.create_entity("b")
        p = store.register_predicate("r")
        store.add_fact(a, p, b, 1.0, 0, CURATED)
        store.add_fact(a, p, b, 0.7, 5, CURATED)
        assert store.fact_count == 1
        assert store.facts_by_seq(0).confidence == 1.0

    def test_duplicate_raises_confidence(self):
        store = KgStore()
        a = store.create_entity("a")
        b = store.create_entity("b")
        p = store.register_predicate("r")
        store.add_fact(a, p, b, 0.4, 0, extracted("wsj"))
        store.add_fact(a, p, b, 0.9, 1, extracted("wsj"))
        assert store.fact_count == 1
        assert store.facts_by_seq(0).confidence == 0.9

    def test_different_provenance_not_deduped(self):
        store = KgStore()
        a = store.create_entity("a")
        b = store.create_entity("b")
        p = store.register_predicate("r")
        store.add_fact(a, p, b, 1.0, 0, CURATED)
        store.add_fact(a, p, b, 0.6, 1, extracted("wsj"))
        assert store.fact_count == 2

    def test_unknown_entity(self):
        store = KgStore()
        a = store.create_entity("a")
        p = store.register_predicate("r")
        with pytest.raises(UnknownEntity):
            store.add_fact(a, p, 99, 1.0, 0, CURATED)

    def test_confidence_out_of_range(self):
        store = KgStore()
        a = store.create_entity("a")
        b = store.create_entity("b")
        p = store.register_predicate("r")
        with pytest.raises(ConfidenceOutOfRange):
            store.add_fact(a, p, b, 1.2, 0, CURATED)

    def test_incoming_adjacency_grows(self):
        store = KgStore()
        dji = store.create_entity("dji")
        drone = store.create_entity("drone")
        windermere = store.create_entity("windermere")
        manufactures = store.register_predicate("manufactures")
        uses = store.register_predicate("uses")
        store.add_fact(dji, manufactures, drone, 1.0, 0, CURATED)
        assert store.add_fact(windermere, uses, drone, 0.62, 1,
                              extracted("wsj")) == 1
        incoming = store.snapshot().incoming(drone)
        assert {f.subject for f in incoming} == {dji, windermere}


class TestSnapshot:
    def test_empty_store(self):
        snap = KgStore().snapshot()
        assert snap.entity_count == 0
        assert snap.fact_count == 0

    def test_counts_after_three_facts(self, drone_store):
        store = KgStore()
        a = store.create_entity("a")
        b = store.create_entity("b")
        p = store.register_predicate("r")
        q = store.register_predicate("s")
        t = store.register_predicate("t")
        store.add_fact(a, p, b, 1.0, 0, CURATED)
        store.add_fact(a, q, b, 1.0, 0, CURATED)
        store.add_fact(a, t, b, 1.0, 0, CURATED)
        assert store.snapshot().fact_count == 3

    def test_isolation_from_later_appends(self):
        store = KgStore()
        a = store.create_entity("a")
        b = store.create_entity("b")
        p = store.register_predicate("r")
        store.add_fact(a, p, b, 1.0, 0, CURATED)
        snap = store.snapshot()
        c = store.create_entity("c")
        store.add_fact(a, p, c, 1.0, 1, CURATED)
        assert snap.fact_count == 1
        assert snap.entity_count == 2
        assert store.snapshot().fact_count == 2

    def test_isolation_from_confidence_merge(self):
        store = KgStore()
        a = store.create_entity("a")
        b = store.create_entity("b")
        p = store.register_predicate("r")
        store.add_fact(a, p, b, 0.4, 0, extracted("x"))
        snap = store.snapshot()
        store.add_fact(a, p, b, 0.9, 1, extracted("x"))
        assert snap.facts()[0].confidence == 0.4

    def test_equal_without_intervening_writes(self):
        store = KgStore()
        a = store.create_entity("a")
        b = store.create_entity("b")
        p = store.register_predicate("r")
        store.add_fact(a, p, b, 1.0, 0, CURATED)
        s1, s2 = store.snapshot(), store.snapshot()
        assert s1.facts() == s2.facts()
        assert s1.entities() == s2.entities()

    def test_no_dangling_endpoints(self, drone_store):
        snap = drone_store.snapshot()
        for fact in snap.facts():
            assert snap.has_entity(fact.subject)
            assert snap.has_entity(fact.object)

    def test_seqs_gap_free(self, drone_store):
        snap = drone_store.snapshot()
        seqs = sorted(f.seq for f in snap.facts())
        assert seqs == list(range(snap.fact_count))

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3),
                              st.booleans()), max_size=24))
    def test_snapshot_prefix_property(self, ops):
        """Each snapshot equals the prefix of appends at its creation."""
        store = KgStore()
        ids = [store.create_entity(f"e{i}") for i in range(4)]
        p = store.register_predicate("r")
        observed = []
        for s, o, snap_after in ops:
            store.add_fact(ids[s], p, ids[o], 1.0, 0, CURATED)
            if snap_after:
                observed.append((store.snapshot(), store.fact_count))
        for snap, count_at_creation in observed:
            assert snap.fact_count == count_at_creation


class TestAliases:
    def test_alias_lookup(self):
        store = KgStore()
        eid = store.create_entity("dji")
        store.add_alias(eid, "Da Jiang Innovations")
        snap = store.snapshot()
        assert snap.find_entity("da jiang innovations").id == eid


class TestPersistence:
    def test_round_trip(self, drone_store, tmp_path):
        path = tmp_path / "facts.tsv"
        drone_store.save(str(path))
        loaded = KgStore.load(str(path))
        original = drone_store.snapshot()
        restored = loaded.snapshot()
        assert restored.fact_count == original.fact_count
        key = lambda snap, f: (snap.entity(f.subject).label,
                               snap.predicate(f.predicate).name,
                               snap.entity(f.object).label,
                               f.confidence, f.timestamp, f.provenance)
        assert {key(restored, f) for f in restored.facts()} \
            == {key(original, f) for f in original.facts()}

    def test_mixed_provenance_round_trip(self, tmp_path):
        store = KgStore()
        a = store.create_entity("a", ["thing"])
        b = store.create_entity("b")
        p = store.register_predicate("r")
        store.add_fact(a, p, b, 0.5, 1425254400, extracted("wsj"))
        path = tmp_path / "facts.tsv"
        store.save(str(path))
        loaded = KgStore.load(str(path))
        fact = loaded.facts_by_seq(0)
        assert fact.confidence == 0.5
        assert fact.timestamp == 1425254400
        assert fact.provenance == "extracted:wsj"
        assert loaded.entity(fact.subject).origin == Origin.EXTRACTED
