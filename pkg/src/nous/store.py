"""Dynamic knowledge-graph store.

Single-writer, multi-reader: one ingestion thread mutates the store, any
number of readers work off immutable :class:`KgSnapshot` views.  Records
(entities, facts) are immutable; updates replace the record, so a snapshot
taken earlier keeps the version it saw.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, replace
from enum import Enum

from .errors import ConfidenceOutOfRange, EmptyLabel, UnknownEntity

CURATED = "curated"
_EXTRACTED_PREFIX = "extracted:"


def extracted(source_id: str) -> str:
    """Provenance tag for a fact learned from stream source `source_id`."""
    return _EXTRACTED_PREFIX + source_id


def is_curated(provenance: str) -> bool:
    return provenance == CURATED


class Origin(str, Enum):
    CURATED = "curated"
    EXTRACTED = "extracted"


class Namespace(str, Enum):
    ONTOLOGY = "ontology"
    EXTRACTED = "extracted"


def normalize_label(raw: str) -> str:
    """Canonical form of an entity label: NFC, lowercase, collapsed spaces."""
    return " ".join(unicodedata.normalize("NFC", raw).lower().split())


@dataclass(frozen=True)
class Entity:
    id: int
    label: str  # already normalized
    aliases: frozenset[str]
    type_labels: tuple[str, ...]
    origin: Origin


@dataclass(frozen=True)
class Predicate:
    id: int
    name: str
    namespace: Namespace


@dataclass(frozen=True)
class Fact:
    subject: int
    predicate: int
    object: int
    confidence: float
    timestamp: int
    provenance: str
    seq: int

    def key(self) -> tuple[int, int, int, str]:
        return (self.subject, self.predicate, self.object, self.provenance)


class KgSnapshot:
    """Immutable point-in-time view of the graph.

    Holds its own copies of the record lists: later writes to the store
    (including in-place confidence merges and type-label additions) are
    invisible here.
    """

    def __init__(self, entities: list[Entity], label_index: dict[str, int],
                 predicates: list[Predicate], facts: list[Fact]):
        self._entities = tuple(entities)
        self._label_index = dict(label_index)
        self._predicates = tuple(predicates)
        self._facts = tuple(facts)
        out: dict[int, list[Fact]] = {}
        inc: dict[int, list[Fact]] = {}
        for f in self._facts:
            out.setdefault(f.subject, []).append(f)
            inc.setdefault(f.object, []).append(f)
        self._out = {k: tuple(v) for k, v in out.items()}
        self._in = {k: tuple(v) for k, v in inc.items()}

    @property
    def fact_count(self) -> int:
        return len(self._facts)

    @property
    def max_seq(self) -> int:
        """Largest seq included, -1 when empty."""
        return len(self._facts) - 1

    @property
    def entity_count(self) -> int:
        return len(self._entities)

    def entities(self) -> tuple[Entity, ...]:
        return self._entities

    def facts(self) -> tuple[Fact, ...]:
        return self._facts

    def predicates(self) -> tuple[Predicate, ...]:
        return self._predicates

    def entity(self, entity_id: int) -> Entity:
        if 0 <= entity_id < len(self._entities):
            return self._entities[entity_id]
        raise UnknownEntity(f"entity id {entity_id}")

    def has_entity(self, entity_id: int) -> bool:
        return 0 <= entity_id < len(self._entities)

    def find_entity(self, name: str) -> Entity | None:
        """Lookup by normalized canonical label or registered alias."""
        eid = self._label_index.get(normalize_label(name))
        return self._entities[eid] if eid is not None else None

    def predicate(self, predicate_id: int) -> Predicate:
        return self._predicates[predicate_id]

    def find_predicate(self, name: str,
                       namespace: Namespace | None = None) -> Predicate | None:
        for p in self._predicates:
            if p.name == name and (namespace is None or p.namespace == namespace):
                return p
        return None

    def outgoing(self, entity_id: int) -> tuple[Fact, ...]:
        return self._out.get(entity_id, ())

    def incoming(self, entity_id: int) -> tuple[Fact, ...]:
        return self._in.get(entity_id, ())

    def neighbors(self, entity_id: int) -> list[int]:
        """Distinct adjacent entity ids, ascending."""
        seen = {f.object for f in self.outgoing(entity_id)}
        seen.update(f.subject for f in self.incoming(entity_id))
        seen.discard(entity_id)
        return sorted(seen)


class KgStore:
    """The mutable graph: entity registry plus temporally ordered facts."""

    def __init__(self):
        self._entities: list[Entity] = []
        self._label_index: dict[str, int] = {}
        self._predicates: list[Predicate] = []
        self._pred_index: dict[tuple[Namespace, str], int] = {}
        self._facts: list[Fact] = []
        self._fact_index: dict[tuple[int, int, int, str], int] = {}

    # -- entities ----------------------------------------------------

    def create_entity(self, label: str, type_labels: list[str] | tuple[str, ...] = (),
                      origin: Origin = Origin.CURATED) -> int:
        """Register an entity; idempotent under label normalization."""
        norm = normalize_label(label)
        if not norm:
            raise EmptyLabel(f"label {label!r} normalizes to empty string")
        existing = self._label_index.get(norm)
        if existing is not None:
            return existing
        eid = len(self._entities)
        deduped: list[str] = []
        for t in type_labels:
            if t not in deduped:
                deduped.append(t)
        self._entities.append(Entity(eid, norm, frozenset(), tuple(deduped), origin))
        self._label_index[norm] = eid
        return eid

    def entity(self, entity_id: int) -> Entity:
        if 0 <= entity_id < len(self._entities):
            return self._entities[entity_id]
        raise UnknownEntity(f"entity id {entity_id}")

    def add_alias(self, entity_id: int, alias: str) -> None:
        norm = normalize_label(alias)
        if not norm:
            raise EmptyLabel(f"alias {alias!r} normalizes to empty string")
        ent = self.entity(entity_id)
        if norm in self._label_index:
            return  # already resolves (to this or another entity)
        self._entities[entity_id] = replace(ent, aliases=ent.aliases | {norm})
        self._label_index[norm] = entity_id

    def add_type_label(self, entity_id: int, type_label: str) -> None:
        ent = self.entity(entity_id)
        if type_label in ent.type_labels:
            return
        self._entities[entity_id] = replace(
            ent, type_labels=ent.type_labels + (type_label,))

    # -- predicates --------------------------------------------------

    def register_predicate(self, name: str,
                           namespace: Namespace = Namespace.ONTOLOGY) -> int:
        name = name.strip()
        key = (namespace, name)
        existing = self._pred_index.get(key)
        if existing is not None:
            return existing
        pid = len(self._predicates)
        self._predicates.append(Predicate(pid, name, namespace))
        self._pred_index[key] = pid
        return pid

    def predicate(self, predicate_id: int) -> Predicate:
        return self._predicates[predicate_id]

    def ontology_predicates(self) -> list[Predicate]:
        return [p for p in self._predicates if p.namespace == Namespace.ONTOLOGY]

    # -- facts -------------------------------------------------------

    def add_fact(self, subject: int, predicate: int, object: int,
                 confidence: float, timestamp: int, provenance: str) -> int:
        """Append a fact, or merge a duplicate.

        A repeat of the same (subject, predicate, object, provenance) does
        not append: the stored confidence is raised to the max of old and
        new, and the existing seq is returned.
        """
        if not (0 <= subject < len(self._entities)):
            raise UnknownEntity(f"subject id {subject}")
        if not (0 <= object < len(self._entities)):
            raise UnknownEntity(f"object id {object}")
        if not (0.0 <= confidence <= 1.0):
            raise ConfidenceOutOfRange(f"confidence {confidence}")
        key = (subject, predicate, object, provenance)
        pos = self._fact_index.get(key)
        if pos is not None:
            old = self._facts[pos]
            if confidence > old.confidence:
                self._facts[pos] = replace(old, confidence=confidence)
            return old.seq
        seq = len(self._facts)
        self._facts.append(Fact(subject, predicate, object, confidence,
                                timestamp, provenance, seq))
        self._fact_index[key] = seq
        return seq

    @property
    def fact_count(self) -> int:
        return len(self._facts)

    @property
    def entity_count(self) -> int:
        return len(self._entities)

    def facts_by_seq(self, seq: int) -> Fact:
        return self._facts[seq]

    def find_entity_id(self, name: str) -> int | None:
        return self._label_index.get(normalize_label(name))

    # -- snapshots ---------------------------------------------------

    def snapshot(self) -> KgSnapshot:
        return KgSnapshot(self._entities, self._label_index,
                          self._predicates, self._facts)

    # -- persistence -------------------------------------------------
    #
    # Line format mirrors the curated-KB TSV with two extra columns:
    #   subject <TAB> predicate <TAB> object <TAB> confidence <TAB>
    #   timestamp <TAB> provenance
    # Provenance is "curated" or "extracted:<sourceId>".

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for f in self._facts:
                fh.write("\t".join([
                    self._entities[f.subject].label,
                    self._predicates[f.predicate].name,
                    self._entities[f.object].label,
                    repr(f.confidence),
                    str(f.timestamp),
                    f.provenance,
                ]) + "\n")

    @classmethod
    def load(cls, path: str) -> "KgStore":
        """Rebuild a store from a fact file.

        Entity origin and predicate namespace are inferred from the
        provenance of the first fact that mentions them; the engine keeps
        a sidecar with the authoritative registries when it persists.
        """
        store = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                subj, pred, obj, conf, ts, prov = line.split("\t")
                curated = is_curated(prov)
                origin = Origin.CURATED if curated else Origin.EXTRACTED
                ns = Namespace.ONTOLOGY if curated else Namespace.EXTRACTED
                s = store.create_entity(subj, (), origin)
                o = store.create_entity(obj, (), origin)
                existing = store._pred_index.get((Namespace.ONTOLOGY, pred.strip()))
                pid = existing if existing is not None \
                    else store.register_predicate(pred, ns)
                store.add_fact(s, pid, o, float(conf), int(ts), prov)
        return store
