"""Entity linking: resolve mention strings against the knowledge graph.

Candidates come from string similarity on labels and aliases; disambiguation
adds contextual similarity between the mention's surrounding tokens and the
candidate's graph neighborhood (neighbor labels plus incident predicate
names).  Mentions that no candidate explains well enough become new
extracted entities when the caller allows creation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import sqrt
from typing import Callable

from .errors import EmptyMention
from .store import KgSnapshot, normalize_label


def jaro(a: str, b: str) -> float:
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0
    window = max(la, lb) // 2 - 1
    if window < 0:
        window = 0
    matched_b = [False] * lb
    a_matches = []
    for i, ch in enumerate(a):
        lo, hi = max(0, i - window), min(lb, i + window + 1)
        for j in range(lo, hi):
            if not matched_b[j] and b[j] == ch:
                matched_b[j] = True
                a_matches.append((i, j))
                break
    m = len(a_matches)
    if m == 0:
        return 0.0
    b_order = sorted(j for _, j in a_matches)
    transpositions = sum(1 for (_, j), jj in zip(a_matches, b_order) if j != jj)
    t = transpositions / 2
    return (m / la + m / lb + (m - t) / m) / 3


def jaro_winkler(a: str, b: str, prefix_scale: float = 0.1) -> float:
    base = jaro(a, b)
    prefix = 0
    for x, y in zip(a[:4], b[:4]):
        if x != y:
            break
        prefix += 1
    return base + prefix * prefix_scale * (1 - base)


@dataclass(frozen=True)
class LinkerConfig:
    lambda_str: float = 0.4
    lambda_ctx: float = 0.6
    tau_new: float = 0.25
    max_candidates: int = 16

    def validate(self) -> None:
        if self.lambda_str < 0 or self.lambda_ctx < 0:
            raise ValueError("lambda weights must be >= 0")
        if abs(self.lambda_str + self.lambda_ctx - 1.0) > 1e-9:
            raise ValueError("lambda_str + lambda_ctx must equal 1")
        if not (0.0 <= self.tau_new <= 1.0):
            raise ValueError("tau_new must lie in [0, 1]")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")


@dataclass(frozen=True)
class LinkDecision:
    mention: str
    resolved: int | None
    created: bool
    score: float
    candidate_count: int
    below_threshold: bool = False


def _string_similarity(norm_mention: str, labels) -> float:
    """Max of exact-match indicator and Jaro-Winkler over the labels."""
    best = 0.0
    for label in labels:
        if label == norm_mention:
            return 1.0
        best = max(best, jaro_winkler(norm_mention, label))
    return best


def scored_candidates(snapshot: KgSnapshot, mention: str,
                      max_candidates: int) -> list[tuple[int, float]]:
    """(entity id, string similarity) pairs, best first.

    An entity qualifies when some label or alias equals the normalized
    mention, is Jaro-Winkler >= 0.90 close to it, or has all its tokens
    inside the mention's tokens.
    """
    norm = normalize_label(mention)
    if not norm:
        raise EmptyMention(f"mention {mention!r}")
    mention_tokens = set(norm.split())
    hits: list[tuple[float, int]] = []
    for ent in snapshot.entities():
        labels = (ent.label, *sorted(ent.aliases))
        sim = _string_similarity(norm, labels)
        qualifies = sim == 1.0 or sim >= 0.90
        if not qualifies:
            qualifies = any(set(lb.split()) <= mention_tokens for lb in labels)
        if qualifies:
            hits.append((-sim, ent.id))
    hits.sort()
    return [(eid, -neg) for neg, eid in hits[:max_candidates]]


def candidates(snapshot: KgSnapshot, mention: str,
               max_candidates: int = 16) -> list[int]:
    return [eid for eid, _ in scored_candidates(snapshot, mention, max_candidates)]


def neighborhood_bag(snapshot: KgSnapshot, entity_id: int) -> Counter:
    """Token multiset of neighbor labels and incident predicate names."""
    bag: Counter = Counter()
    for fact in snapshot.outgoing(entity_id):
        bag.update(normalize_label(snapshot.entity(fact.object).label).split())
        bag.update(normalize_label(snapshot.predicate(fact.predicate).name).split())
    for fact in snapshot.incoming(entity_id):
        bag.update(normalize_label(snapshot.entity(fact.subject).label).split())
        bag.update(normalize_label(snapshot.predicate(fact.predicate).name).split())
    return bag


def context_score(snapshot: KgSnapshot, candidate: int,
                  context_tokens: list[str]) -> float:
    """Cosine similarity of context tokens vs the candidate's neighborhood."""
    ctx = Counter(t for t in (normalize_label(tok) for tok in context_tokens) if t)
    bag = neighborhood_bag(snapshot, candidate)
    if not ctx or not bag:
        return 0.0
    dot = sum(count * bag[token] for token, count in ctx.items())
    if dot == 0:
        return 0.0
    norm_ctx = sqrt(sum(c * c for c in ctx.values()))
    norm_bag = sqrt(sum(c * c for c in bag.values()))
    return dot / (norm_ctx * norm_bag)


def link_mention(snapshot: KgSnapshot, mention: str, context_tokens: list[str],
                 config: LinkerConfig, allow_create: bool,
                 create: Callable[[str], int] | None = None) -> LinkDecision:
    """Resolve a mention to an entity, or create one below threshold.

    Candidate score = lambda_str * string similarity + lambda_ctx * context
    similarity; ties go to the lower entity id.  When the best score misses
    tau_new and creation is not allowed, the best candidate is still
    returned, flagged `below_threshold`, so callers like the expansion pass
    can decide for themselves.
    """
    config.validate()
    pairs = scored_candidates(snapshot, mention, config.max_candidates)
    best_id: int | None = None
    best_score = 0.0
    for eid, string_sim in pairs:
        score = (config.lambda_str * string_sim
                 + config.lambda_ctx * context_score(snapshot, eid, context_tokens))
        if best_id is None or score > best_score or (score == best_score and eid < best_id):
            best_id, best_score = eid, score
    if best_id is not None and best_score >= config.tau_new:
        return LinkDecision(mention, best_id, False, best_score, len(pairs))
    if allow_create:
        if create is None:
            raise ValueError("allow_create requires a create callback")
        return LinkDecision(mention, create(mention), True, 0.0, len(pairs))
    return LinkDecision(mention, best_id, False,
                        best_score if best_id is not None else 0.0,
                        len(pairs), below_threshold=True)
