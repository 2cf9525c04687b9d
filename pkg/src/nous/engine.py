"""Engine: wires the modules together behind one facade.

Owns the store, the predicate rule models, the confidence models, the topic
model and the miner; drives the ingestion pipeline; persists everything
under the configured data directory so consecutive CLI invocations continue
where the last one stopped.  All query payloads are built here and
serialized through :func:`to_json`, which is what makes the CLI and the
HTTP API produce byte-identical output for the same question.
"""

from __future__ import annotations

import json
import os
import threading

from . import bpr, topics
from .config import EngineConfig
from .errors import FileNotFound, NousError, UnknownEntity
from .ingest import (Batch, IngestReport, PipelineHooks, ingest_stream,
                     iter_raw_triples, load_curated_kb, read_stream_file)
from .linker import LinkerConfig, link_mention, scored_candidates
from .mining import Emission, GraphEdge, WindowMiner
from .pathsearch import find_paths
from .predicates import (RuleModel, Evidence, bootstrap, expand,
                         map_predicate, normalize_phrase, phrase_text)
from .store import (Fact, KgSnapshot, KgStore, Namespace, Origin,
                    normalize_label)


def to_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2)


class Engine:
    STORE_FILE = "store.tsv"
    META_FILE = "meta.json"
    RULES_FILE = "rules.json"
    MODELS_FILE = "models.bpr"
    TOPICS_FILE = "topics.json"
    MINER_FILE = "miner.json"
    EMISSION_FILE = "emission.json"

    def __init__(self, config: EngineConfig):
        self.config = config
        self.store = KgStore()
        self.rule_models: list[RuleModel] = []
        self.bpr_models: dict[int, bpr.BprModel] = {}
        self.topic_model: topics.TopicModel | None = None
        self.miner = WindowMiner(config.miner.window_batches,
                                 config.miner.min_support,
                                 config.miner.max_edges)
        self.trending: list[dict] = []
        self.model_versions = {"bpr": 0, "topics": 0}
        self.write_lock = threading.Lock()

    # ------------------------------------------------------------------
    # pipeline wiring

    def _linker_config(self) -> LinkerConfig:
        lc = self.config.linker
        return LinkerConfig(lc.lambda_str, lc.lambda_ctx, lc.tau_new,
                            lc.max_candidates)

    def _bpr_hyper(self) -> bpr.BprHyper:
        b = self.config.bpr
        return bpr.BprHyper(b.dim, b.learning_rate, b.reg, b.epochs, b.seed,
                            b.negative_space)

    def _pipeline_hooks(self) -> PipelineHooks:
        def map_pred(phrase: str):
            return map_predicate(self.rule_models, phrase)

        def register_extracted(phrase: str) -> int:
            name = phrase_text(normalize_phrase(phrase))
            return self.store.register_predicate(name, Namespace.EXTRACTED)

        def link(mention: str, ctx: list[str]):
            return link_mention(
                self.store.snapshot(), mention, ctx, self._linker_config(),
                allow_create=True,
                create=lambda m: self.store.create_entity(m, (), Origin.EXTRACTED))

        def score(s: int, p: int, o: int) -> float:
            return bpr.score_triple(self.bpr_models, s, p, o,
                                    self.config.bpr.prior).value

        return PipelineHooks(map_pred, register_extracted, link, score)

    def _expand_link(self, snapshot: KgSnapshot):
        """Mention resolver for expansion: never creates, None below threshold."""
        def link(mention: str, ctx: list[str]):
            decision = link_mention(snapshot, mention, ctx,
                                    self._linker_config(), allow_create=False)
            if decision.resolved is None or decision.below_threshold:
                return None
            return decision.resolved
        return link

    def _vertex_label(self, entity_id: int) -> str:
        mode = self.config.miner.label_mode
        ent = self.store.entity(entity_id)
        if mode == "entity":
            return ent.label
        if mode == "type":
            return ent.type_labels[0] if ent.type_labels else "Entity"
        return "Entity"  # predicateOnly

    def _graph_edge(self, fact: Fact) -> GraphEdge:
        return GraphEdge(fact.subject, fact.object,
                         self._vertex_label(fact.subject),
                         self.store.predicate(fact.predicate).name,
                         self._vertex_label(fact.object))

    def _apply_type_fact(self, fact: Fact) -> None:
        tp = self.config.ingest.type_predicate
        if not tp:
            return
        if normalize_label(self.store.predicate(fact.predicate).name) == normalize_label(tp):
            self.store.add_type_label(fact.subject,
                                      self.store.entity(fact.object).label)

    def _on_batch(self, batch: Batch) -> None:
        facts = [self.store.facts_by_seq(seq) for seq in batch.seqs]
        for f in facts:
            self._apply_type_fact(f)
        emission = self.miner.advance([self._graph_edge(f) for f in facts])
        self.trending = emission_payload(emission)

    # ------------------------------------------------------------------
    # operations behind the CLI / API verbs

    def load_kb(self, path: str) -> dict:
        loaded, skipped = load_curated_kb(self.store, path,
                                          self.config.ingest.type_predicate)
        return {"loaded": loaded, "skipped": skipped,
                "entities": self.store.entity_count,
                "predicates": len(self.store.snapshot().predicates())}

    def load_seeds(self, path: str) -> int:
        """Bootstrap rule models from the JSON-lines seed file."""
        if not os.path.isfile(path):
            raise FileNotFound(path)
        models: list[RuleModel] = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                pid = self.store.register_predicate(obj["predicate"],
                                                    Namespace.ONTOLOGY)
                models.append(bootstrap(self.store.predicate(pid), obj["seeds"]))
        self.rule_models = models
        return len(models)

    def ingest_lines(self, lines) -> IngestReport:
        ic = self.config.ingest
        return ingest_stream(
            lines, self.store, self._pipeline_hooks(), ic.batch_size,
            on_batch=self._on_batch,
            extracted_predicate_policy=ic.extracted_predicate_policy,
            min_accept_confidence=ic.min_accept_confidence,
            batch_by=ic.batch_by, bucket_seconds=ic.bucket_seconds,
            first_batch_index=self.miner.next_batch_index)

    def ingest_file(self, path: str) -> IngestReport:
        return self.ingest_lines(read_stream_file(path))

    def expand_rules(self, path: str) -> dict:
        raws = [raw for _, raw in iter_raw_triples(read_stream_file(path))]
        snapshot = self.store.snapshot()
        result = expand(self.rule_models, raws, snapshot,
                        self._expand_link(snapshot))
        return result.report

    def retrain(self) -> dict:
        snapshot = self.store.snapshot()
        models, skipped = bpr.retrain(snapshot, self._bpr_hyper(),
                                      min_confidence=self.config.bpr.train_min_confidence)
        self.bpr_models = models  # atomic swap for readers
        self.model_versions["bpr"] += 1
        return {"trained": len(models),
                "skipped": [snapshot.predicate(pid).name for pid in skipped],
                "version": self.model_versions["bpr"]}

    def train_topics(self, docs_path: str | None = None) -> dict:
        path = docs_path or self.config.docs_file
        if not path or not os.path.isfile(path):
            raise FileNotFound(path or "<docsFile not configured>")
        snapshot = self.store.snapshot()
        docs, skipped = topics.load_entity_docs(path, snapshot)
        qa = self.config.qa
        model = topics.train_lda(docs, qa.topics, qa.effective_alpha, qa.beta,
                                 qa.gibbs_iters, qa.seed)
        self.topic_model = model
        self.model_versions["topics"] += 1
        return {"entities": len(model.theta), "topics": model.k,
                "skippedDocs": skipped, "version": self.model_versions["topics"]}

    def _topic_model_or_uniform(self) -> topics.TopicModel:
        if self.topic_model is not None:
            return self.topic_model
        # no trained model yet: every entity gets the uniform distribution,
        # so ranking falls back to confidence/length tie rules
        import numpy as np
        k = self.config.qa.topics
        return topics.TopicModel(k, (), np.zeros((k, 0)), {}, {})

    def ask(self, from_name: str, to_name: str, rel: str | None = None,
            k: int | None = None, max_hops: int | None = None) -> list[dict]:
        snapshot = self.store.snapshot()
        source = snapshot.find_entity(from_name)
        target = snapshot.find_entity(to_name)
        if source is None:
            raise self._unknown_entity(snapshot, from_name)
        if target is None:
            raise self._unknown_entity(snapshot, to_name)
        rel_id = None
        if rel:
            pred = (snapshot.find_predicate(rel, Namespace.ONTOLOGY)
                    or snapshot.find_predicate(rel))
            if pred is None:
                raise UnknownEntity(f"predicate {rel!r}")
            rel_id = pred.id
        qa = self.config.qa
        paths = find_paths(
            snapshot, self._topic_model_or_uniform(), source.id, target.id,
            rel_constraint=rel_id, k=k or qa.k_paths,
            max_hops=max_hops or qa.max_hops, beam_width=qa.beam_width,
            min_edge_confidence=qa.min_edge_confidence,
            coherence_mode=qa.coherence, constraint_mode=qa.constraint_mode)
        return [self._path_payload(snapshot, p) for p in paths]

    def _unknown_entity(self, snapshot: KgSnapshot, name: str) -> UnknownEntity:
        err = UnknownEntity(f"no entity named {name!r}")
        try:
            ids = [eid for eid, _ in scored_candidates(snapshot, name, 5)]
            err.suggestions = [snapshot.entity(eid).label for eid in ids]
        except NousError:
            err.suggestions = []
        return err

    @staticmethod
    def _path_payload(snapshot: KgSnapshot, path) -> dict:
        edges = []
        for pe in path.edges:
            f = pe.fact
            edges.append({
                "s": snapshot.entity(f.subject).label,
                "p": snapshot.predicate(f.predicate).name,
                "o": snapshot.entity(f.object).label,
                "direction": "forward" if pe.forward else "reverse",
                "confidence": f.confidence,
                "provenance": f.provenance,
            })
        return {"vertices": [snapshot.entity(v).label for v in path.vertices],
                "edges": edges,
                "coherence": path.coherence,
                "meanConfidence": path.mean_confidence}

    def entity_card(self, name: str, limit: int | None = None) -> dict:
        snapshot = self.store.snapshot()
        ent = snapshot.find_entity(name)
        if ent is None:
            raise self._unknown_entity(snapshot, name)
        limit = limit or self.config.service.entity_card_limit
        incident = [(f, "out") for f in snapshot.outgoing(ent.id)]
        incident += [(f, "in") for f in snapshot.incoming(ent.id)
                     if f.subject != f.object]
        incident.sort(key=lambda pair: (-pair[0].confidence, pair[0].seq,
                                        pair[1]))
        groups: dict[str, list[dict]] = {}
        order: list[str] = []
        for fact, direction in incident[:limit]:
            pred = snapshot.predicate(fact.predicate).name
            if pred not in groups:
                groups[pred] = []
                order.append(pred)
            groups[pred].append({
                "subject": snapshot.entity(fact.subject).label,
                "predicate": pred,
                "object": snapshot.entity(fact.object).label,
                "direction": direction,
                "confidence": fact.confidence,
                "provenance": fact.provenance,
                "timestamp": fact.timestamp,
            })
        return {
            "entity": {
                "id": ent.id,
                "label": ent.label,
                "types": list(ent.type_labels),
                "origin": ent.origin.value,
                "aliases": sorted(ent.aliases),
            },
            "factCount": len(incident),
            "groups": [{"predicate": p, "facts": groups[p]} for p in order],
        }

    def stats(self) -> dict:
        snapshot = self.store.snapshot()
        last_batch = (self.miner.batch_nums[-1]
                      if self.miner.batch_nums else None)
        return {"entities": snapshot.entity_count,
                "facts": snapshot.fact_count,
                "patterns": len(self.trending),
                "lastBatch": last_batch,
                "modelVersions": dict(self.model_versions)}

    # ------------------------------------------------------------------
    # persistence

    def _path(self, name: str) -> str:
        return os.path.join(self.config.data_dir, name)

    def save_state(self) -> None:
        os.makedirs(self.config.data_dir, exist_ok=True)
        self.store.save(self._path(self.STORE_FILE))
        meta = {
            "entities": [
                {"id": e.id, "label": e.label, "aliases": sorted(e.aliases),
                 "types": list(e.type_labels), "origin": e.origin.value}
                for e in self.store.snapshot().entities()],
            "predicates": [
                {"id": p.id, "name": p.name, "namespace": p.namespace.value}
                for p in self.store.snapshot().predicates()],
            "modelVersions": dict(self.model_versions),
        }
        with open(self._path(self.META_FILE), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, ensure_ascii=False)
        self._save_rules()
        if self.bpr_models:
            bpr.save_models(self.bpr_models, self._path(self.MODELS_FILE))
        if self.topic_model is not None:
            topics.save_topics(self.topic_model, self._path(self.TOPICS_FILE))
        miner_state = {
            "nextBatchIndex": self.miner.next_batch_index,
            "batches": [
                {"index": idx, "edges": [list(g) for g in batch]}
                for idx, batch in zip(self.miner.batch_nums, self.miner.batches)],
        }
        with open(self._path(self.MINER_FILE), "w", encoding="utf-8") as fh:
            json.dump(miner_state, fh, ensure_ascii=False)
        with open(self._path(self.EMISSION_FILE), "w", encoding="utf-8") as fh:
            json.dump(self.trending, fh, ensure_ascii=False)

    def _save_rules(self) -> None:
        payload = []
        for m in self.rule_models:
            payload.append({
                "predicate": m.predicate_name,
                "predicateId": m.predicate_id,
                "seeds": [list(k) for k in sorted(m.seeds)],
                "learned": [
                    {"phrase": list(k), "support": ev.support,
                     "conflicts": ev.conflicts, "promoted": ev.promoted}
                    for k, ev in sorted(m.learned.items())],
                "pairs": [
                    {"phrase": list(k), "pairs": sorted(v)}
                    for k, v in sorted(m._pairs.items())],
            })
        with open(self._path(self.RULES_FILE), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)

    def load_state(self) -> None:
        """Restore whatever state files exist under the data directory."""
        meta_path = self._path(self.META_FILE)
        store_path = self._path(self.STORE_FILE)
        if os.path.isfile(meta_path):
            with open(meta_path, encoding="utf-8") as fh:
                meta = json.load(fh)
            store = KgStore()
            for e in sorted(meta["entities"], key=lambda x: x["id"]):
                eid = store.create_entity(e["label"], e["types"],
                                          Origin(e["origin"]))
                for alias in e["aliases"]:
                    store.add_alias(eid, alias)
            for p in sorted(meta["predicates"], key=lambda x: x["id"]):
                store.register_predicate(p["name"], Namespace(p["namespace"]))
            if os.path.isfile(store_path):
                self._load_facts(store, store_path)
            self.store = store
            self.model_versions = meta.get("modelVersions", self.model_versions)
        elif os.path.isfile(store_path):
            self.store = KgStore.load(store_path)
        if os.path.isfile(self._path(self.RULES_FILE)):
            self._load_rules()
        if os.path.isfile(self._path(self.MODELS_FILE)):
            self.bpr_models = bpr.load_models(self._path(self.MODELS_FILE))
        if os.path.isfile(self._path(self.TOPICS_FILE)):
            self.topic_model = topics.load_topics(self._path(self.TOPICS_FILE))
        if os.path.isfile(self._path(self.MINER_FILE)):
            with open(self._path(self.MINER_FILE), encoding="utf-8") as fh:
                state = json.load(fh)
            if state["batches"]:
                self.miner.next_batch_index = state["batches"][0]["index"]
            for b in state["batches"]:
                self.miner.advance([GraphEdge(*edge) for edge in b["edges"]])
            self.miner.next_batch_index = state["nextBatchIndex"]
        if os.path.isfile(self._path(self.EMISSION_FILE)):
            with open(self._path(self.EMISSION_FILE), encoding="utf-8") as fh:
                self.trending = json.load(fh)

    def _load_facts(self, store: KgStore, path: str) -> None:
        """Read the fact file against already-restored registries.

        Predicate names are resolved ontology-first; a name living in both
        namespaces resolves to the ontology predicate.
        """
        by_name: dict[str, int] = {}
        for p in store.snapshot().predicates():
            if p.name not in by_name or p.namespace == Namespace.ONTOLOGY:
                if p.name in by_name and p.namespace != Namespace.ONTOLOGY:
                    continue
                by_name[p.name] = p.id
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                subj, pred, obj, conf, ts, prov = line.split("\t")
                s = store.find_entity_id(subj)
                o = store.find_entity_id(obj)
                pid = by_name.get(pred.strip())
                if s is None or o is None or pid is None:
                    raise UnknownEntity(f"fact file references unknown {line!r}")
                store.add_fact(s, pid, o, float(conf), int(ts), prov)

    def _load_rules(self) -> None:
        with open(self._path(self.RULES_FILE), encoding="utf-8") as fh:
            payload = json.load(fh)
        models = []
        for entry in payload:
            model = RuleModel(
                entry["predicateId"], entry["predicate"],
                frozenset(tuple(s) for s in entry["seeds"]))
            for item in entry["learned"]:
                model.learned[tuple(item["phrase"])] = Evidence(
                    item["support"], item["conflicts"], item["promoted"])
            for item in entry["pairs"]:
                model._pairs[tuple(item["phrase"])] = {
                    tuple(p) for p in item["pairs"]}
            models.append(model)
        self.rule_models = models


def emission_payload(emission: Emission) -> list[dict]:
    """Trending-feed JSON: the current closed frequent patterns."""
    out = []
    for p in emission.current:
        out.append({
            "code": p.code,
            "edges": [
                {"srcLabel": e.src_label, "pred": e.pred_label,
                 "dstLabel": e.dst_label, "srcVar": e.src_var,
                 "dstVar": e.dst_var}
                for e in p.edges],
            "support": p.support,
            "closed": p.closed,
            "window": {"firstBatch": emission.first_batch,
                       "lastBatch": emission.last_batch},
        })
    return out
