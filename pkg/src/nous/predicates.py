"""Rule models that map free-text predicate phrases onto ontology predicates.

Each target predicate owns a rule model bootstrapped from a handful of seed
phrases; `expand` grows the model by distant supervision: a phrase whose
linked entity pairs are already connected in the curated graph by predicate
p counts as evidence that the phrase expresses p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import EmptyPhrase, UnknownPredicate
from .store import KgSnapshot, Namespace, Predicate

PhraseKey = tuple[str, ...]

# Fixed stopword list: articles, copulas, prepositions.  Part of the
# artifact contract — changing it changes every normalized phrase.
STOPWORDS = frozenset("""
a an the
am is are was were be been being
of to in on at by for with from as into onto upon over under about above
below across after against along among around before behind beneath beside
between beyond during inside near outside through toward towards within
without up down off out
""".split())

_TOKEN_SPLIT = re.compile(r"\W+", re.UNICODE)

# Tried in order; a trailing "es" falls under the "s" rule, which keeps the
# stem-final "e" ("manufactures" -> "manufacture").
_SUFFIXES = ("ing", "ed", "s")
_MIN_STEM_LEN = 5


def _stem(token: str) -> str:
    if len(token) >= _MIN_STEM_LEN:
        for suffix in _SUFFIXES:
            if token.endswith(suffix):
                return token[: -len(suffix)]
    return token


def normalize_phrase(raw: str) -> PhraseKey:
    """Normalize a predicate phrase to its rule-matching token tuple.

    Lowercase, split on non-word characters, drop stopwords (unless every
    token is one), strip light suffixes from tokens of length >= 5.
    """
    tokens = [t for t in _TOKEN_SPLIT.split(raw.lower()) if t]
    if not tokens:
        raise EmptyPhrase(f"phrase {raw!r} has no tokens")
    content = [t for t in tokens if t not in STOPWORDS]
    if not content:
        content = tokens  # all-stopword fallback keeps the phrase usable
    return tuple(_stem(t) for t in content)


def phrase_text(key: PhraseKey) -> str:
    return " ".join(key)


@dataclass
class Evidence:
    support: int = 0
    conflicts: int = 0
    promoted: bool = False


@dataclass
class RuleModel:
    """Seed and learned phrases for one ontology predicate."""

    predicate_id: int
    predicate_name: str
    seeds: frozenset[PhraseKey]
    learned: dict[PhraseKey, Evidence] = field(default_factory=dict)
    # distinct (s, o) pairs seen per phrase, kept so repeated expand calls
    # never double-count a pair
    _pairs: dict[PhraseKey, set[tuple[int, int]]] = field(default_factory=dict)

    def promoted_phrases(self) -> set[PhraseKey]:
        return {k for k, ev in self.learned.items() if ev.promoted}

    def rule_phrases(self) -> set[PhraseKey]:
        return set(self.seeds) | self.promoted_phrases()


def bootstrap(predicate: Predicate, seed_phrases: list[str]) -> RuleModel:
    """Build a rule model from seed phrases (5-10 recommended)."""
    if predicate.namespace != Namespace.ONTOLOGY:
        raise UnknownPredicate(
            f"predicate {predicate.name!r} is not in the ontology namespace")
    if not seed_phrases:
        raise EmptyPhrase("at least one seed phrase required")
    seeds = frozenset(normalize_phrase(p) for p in seed_phrases)
    return RuleModel(predicate.id, predicate.name, seeds)


def map_predicate(models: Iterable[RuleModel], phrase: str) -> int | None:
    """Resolve a phrase to an ontology predicate id, or None when unmapped.

    Exact token-sequence matches beat token-subset matches; remaining ties
    go to the rule with more tokens, then the lexicographically smallest
    predicate name.
    """
    norm = normalize_phrase(phrase)
    norm_set = set(norm)
    best: tuple[int, int, str, int] | None = None
    for model in models:
        for rule in model.rule_phrases():
            if rule == norm:
                exact = 1
            elif set(rule) <= norm_set:
                exact = 0
            else:
                continue
            cand = (exact, len(rule), model.predicate_name, model.predicate_id)
            if best is None or _beats(cand, best):
                best = cand
    return best[3] if best else None


def _beats(a: tuple[int, int, str, int], b: tuple[int, int, str, int]) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    if a[1] != b[1]:
        return a[1] > b[1]
    return a[2] < b[2]


@dataclass
class ExpansionResult:
    report: dict  # {predicate: [{phrase, support, conflicts, promoted}]}
    skipped_mentions: int


def expand(models: list[RuleModel], raw_triples: Iterable,
           curated: KgSnapshot,
           link: Callable[[str, list[str]], int | None],
           min_evidence: int = 3, min_precision: float = 0.6) -> ExpansionResult:
    """Distant-supervision expansion pass over raw triples.

    `link` resolves a mention against the curated snapshot without creating
    entities, returning None when no candidate clears the link threshold.
    A phrase earns one support pair for predicate p per distinct linked
    (s, o) pair connected by p; its support for any other predicate counts
    as conflict.  Phrases meeting both thresholds are promoted, except that
    a phrase promoted to two predicates at once is kept by neither.
    """
    by_pred = {m.predicate_id: m for m in models}
    skipped = 0
    for raw in raw_triples:
        s = link(raw.subject_mention, raw.context_tokens)
        o = link(raw.object_mention, raw.context_tokens)
        if s is None or o is None:
            skipped += 1
            continue
        phrase = normalize_phrase(raw.predicate_phrase)
        for fact in curated.outgoing(s):
            if fact.object != o:
                continue
            pred = curated.predicate(fact.predicate)
            if pred.namespace != Namespace.ONTOLOGY:
                continue
            model = by_pred.get(pred.id)
            if model is None:
                continue
            model._pairs.setdefault(phrase, set()).add((s, o))

    # Support per (phrase, predicate) from the accumulated distinct pairs,
    # conflict = that phrase's support everywhere else.
    support: dict[PhraseKey, dict[int, int]] = {}
    for model in models:
        for phrase, pairs in model._pairs.items():
            support.setdefault(phrase, {})[model.predicate_id] = len(pairs)

    promotions: dict[PhraseKey, list[int]] = {}
    for model in models:
        for phrase, pairs in model._pairs.items():
            sup = len(pairs)
            conflicts = sum(n for pid, n in support[phrase].items()
                            if pid != model.predicate_id)
            if phrase in model.seeds:
                continue  # seed-matching phrases never enter learned
            promoted = (sup >= min_evidence
                        and sup / (sup + conflicts) >= min_precision)
            model.learned[phrase] = Evidence(sup, conflicts, promoted)
            if promoted:
                promotions.setdefault(phrase, []).append(model.predicate_id)

    for phrase, pids in promotions.items():
        if len(pids) > 1:  # residual tie: neither keeps it
            for pid in pids:
                by_pred[pid].learned[phrase].promoted = False

    report = {}
    for model in models:
        report[model.predicate_name] = [
            {"phrase": phrase_text(k), "support": ev.support,
             "conflicts": ev.conflicts, "promoted": ev.promoted}
            for k, ev in sorted(model.learned.items())
        ]
    return ExpansionResult(report, skipped)
