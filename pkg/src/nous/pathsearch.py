"""Top-K relationship explanations: coherence-ranked paths between entities.

Edges are walked in both directions (the direction is kept on the path).
The beam is over frontier vertices: at each hop the distinct frontier
vertices are ranked by topic divergence to the target, and partial paths
whose vertex misses the best B are dropped.  With B at least the vertex
count nothing is pruned and the search degenerates to exhaustive
enumeration, which is what the oracle tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoPathFound, UnknownEntity
from .store import Fact, KgSnapshot
from .topics import TopicModel, entity_topic, js_divergence

COHERENCE_MODES = ("meanConsecutive", "sumConsecutive", "maxConsecutive")
CONSTRAINT_MODES = ("containsEdge", "lastEdge")


@dataclass(frozen=True)
class PathEdge:
    fact: Fact
    forward: bool  # False when walked object -> subject


@dataclass(frozen=True)
class ScoredPath:
    vertices: tuple[int, ...]
    edges: tuple[PathEdge, ...]
    coherence: float
    mean_confidence: float

    @property
    def hops(self) -> int:
        return len(self.edges)


class _TopicCache:
    def __init__(self, snapshot: KgSnapshot, model: TopicModel):
        self.snapshot = snapshot
        self.model = model
        self._topics: dict[int, np.ndarray] = {}
        self._to_target: dict[int, float] = {}
        self._pairs: dict[tuple[int, int], float] = {}

    def topic(self, v: int) -> np.ndarray:
        t = self._topics.get(v)
        if t is None:
            t = entity_topic(self.model, self.snapshot, v)
            self._topics[v] = t
        return t

    def divergence_to(self, v: int, target: int) -> float:
        d = self._to_target.get(v)
        if d is None:
            d = js_divergence(self.topic(v), self.topic(target))
            self._to_target[v] = d
        return d

    def pair(self, a: int, b: int) -> float:
        key = (a, b) if a <= b else (b, a)
        d = self._pairs.get(key)
        if d is None:
            d = js_divergence(self.topic(key[0]), self.topic(key[1]))
            self._pairs[key] = d
        return d


def _coherence(vertices: tuple[int, ...], cache: _TopicCache, mode: str) -> float:
    divs = [cache.pair(a, b) for a, b in zip(vertices, vertices[1:])]
    if mode == "sumConsecutive":
        return float(sum(divs))
    if mode == "maxConsecutive":
        return float(max(divs))
    return float(sum(divs) / len(divs))


def _sort_key(path: ScoredPath):
    # ascending coherence; ties: higher mean confidence, shorter, vertex
    # sequence, then edge identity to make the order total
    return (path.coherence, -path.mean_confidence, path.hops, path.vertices,
            tuple((e.fact.predicate, not e.forward, e.fact.seq) for e in path.edges))


def _score(vertices: tuple[int, ...], edges: tuple[PathEdge, ...],
           cache: _TopicCache, mode: str) -> ScoredPath:
    mean_conf = sum(e.fact.confidence for e in edges) / len(edges)
    return ScoredPath(vertices, edges, _coherence(vertices, cache, mode), mean_conf)


def _steps(snapshot: KgSnapshot, v: int, min_conf: float) -> list[tuple[int, PathEdge]]:
    """Traversable (neighbor, edge) steps out of v, deterministic order."""
    steps: list[tuple[int, PathEdge]] = []
    for fact in snapshot.outgoing(v):
        if fact.confidence >= min_conf and fact.object != v:
            steps.append((fact.object, PathEdge(fact, True)))
    for fact in snapshot.incoming(v):
        if fact.confidence >= min_conf and fact.subject != v:
            steps.append((fact.subject, PathEdge(fact, False)))
    steps.sort(key=lambda s: (s[0], s[1].fact.seq, not s[1].forward))
    return steps


def _satisfies(edges: tuple[PathEdge, ...], rel: int | None, mode: str) -> bool:
    if rel is None:
        return True
    if mode == "lastEdge":
        return edges[-1].fact.predicate == rel
    return any(e.fact.predicate == rel for e in edges)


def find_paths(snapshot: KgSnapshot, model: TopicModel, source: int, target: int,
               rel_constraint: int | None = None, k: int = 5, max_hops: int = 4,
               beam_width: int = 8, min_edge_confidence: float = 0.0,
               coherence_mode: str = "meanConsecutive",
               constraint_mode: str = "containsEdge") -> list[ScoredPath]:
    """Top-K simple paths from source to target, most coherent first.

    Look-ahead: the beam keeps partial paths whose frontier vertex is among
    the `beam_width` vertices with least topic divergence to the target.
    Path coherence aggregates the divergence between consecutive vertices
    (mean by default).  With a relationship constraint, only paths touching
    that predicate qualify.
    """
    if source == target:
        raise ValueError("source equals target")
    if k < 1 or max_hops < 1 or beam_width < 1:
        raise ValueError("k, max_hops and beam_width must be >= 1")
    if coherence_mode not in COHERENCE_MODES:
        raise ValueError(f"coherence mode {coherence_mode!r}")
    if constraint_mode not in CONSTRAINT_MODES:
        raise ValueError(f"constraint mode {constraint_mode!r}")
    for v in (source, target):
        if not snapshot.has_entity(v):
            raise UnknownEntity(f"entity id {v}")
    if not _steps(snapshot, source, min_edge_confidence) \
            or not _steps(snapshot, target, min_edge_confidence):
        raise NoPathFound(
            "source or target has no usable edge at this confidence threshold")

    cache = _TopicCache(snapshot, model)
    completed: list[ScoredPath] = []
    frontier: list[tuple[tuple[int, ...], tuple[PathEdge, ...]]] = [((source,), ())]

    for hop in range(1, max_hops + 1):
        extensions: list[tuple[tuple[int, ...], tuple[PathEdge, ...]]] = []
        for vertices, edges in frontier:
            for neighbor, step in _steps(snapshot, vertices[-1], min_edge_confidence):
                if neighbor in vertices:
                    continue
                new_vertices = vertices + (neighbor,)
                new_edges = edges + (step,)
                if neighbor == target:
                    if _satisfies(new_edges, rel_constraint, constraint_mode):
                        completed.append(
                            _score(new_vertices, new_edges, cache, coherence_mode))
                elif hop < max_hops:
                    extensions.append((new_vertices, new_edges))
        if not extensions:
            break
        ranked = sorted({vs[-1] for vs, _ in extensions},
                        key=lambda v: (cache.divergence_to(v, target), v))
        kept = set(ranked[:beam_width])
        frontier = [p for p in extensions if p[0][-1] in kept]

    completed.sort(key=_sort_key)
    return completed[:k]
