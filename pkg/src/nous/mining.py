"""Closed frequent subgraph patterns over a sliding window of fact batches.

Two routes compute the same answer: `mine_window` re-mines the live window
from scratch (the reference used by tests), while `WindowMiner.advance`
maintains pattern embeddings incrementally, extending them when edges
arrive and invalidating them when a batch falls out of the window.  After
every advance the incremental closed-frequent set must equal the
from-scratch result exactly.

Support is MNI (minimum node image): for a pattern, the minimum over its
variables of how many distinct graph vertices that variable maps to across
all embeddings.  MNI is anti-monotone, which the demotion logic relies on.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterable, NamedTuple

from .errors import Disconnected, TooLarge


class GraphEdge(NamedTuple):
    src: int
    dst: int
    src_label: str
    pred: str
    dst_label: str


class PatternEdge(NamedTuple):
    # field order matches the serialization order of the canonical code
    src_var: int
    src_label: str
    pred_label: str
    dst_label: str
    dst_var: int


@dataclass(frozen=True)
class Pattern:
    code: str
    edges: tuple[PatternEdge, ...]
    support: int
    closed: bool = True


@dataclass
class Emission:
    added: list[Pattern]
    removed: list[Pattern]
    current: list[Pattern]
    first_batch: int
    last_batch: int


# -- canonical codes -------------------------------------------------------

def _pattern_vars(edges: Iterable[PatternEdge]) -> set[int]:
    out: set[int] = set()
    for pe in edges:
        out.add(pe.src_var)
        out.add(pe.dst_var)
    return out


def _vars_connected(edges: tuple[PatternEdge, ...]) -> bool:
    vars_ = _pattern_vars(edges)
    if not vars_:
        return False
    seen = {next(iter(vars_))}
    frontier = [next(iter(seen))]
    while frontier:
        v = frontier.pop()
        for pe in edges:
            for a, b in ((pe.src_var, pe.dst_var), (pe.dst_var, pe.src_var)):
                if a == v and b not in seen:
                    seen.add(b)
                    frontier.append(b)
    return seen == vars_


@lru_cache(maxsize=1 << 16)
def _canonical(edges: tuple[PatternEdge, ...]) -> tuple[str, tuple[PatternEdge, ...]]:
    vars_ = _pattern_vars(edges)
    n = len(vars_)
    if vars_ != set(range(n)):
        raise ValueError("pattern variables must be contiguous from 0")
    if not _vars_connected(edges):
        raise Disconnected("pattern edge list is not connected")
    best: tuple[PatternEdge, ...] | None = None
    for perm in permutations(range(n)):
        mapped = tuple(sorted(
            PatternEdge(perm[pe.src_var], pe.src_label, pe.pred_label,
                        pe.dst_label, perm[pe.dst_var])
            for pe in edges))
        if best is None or mapped < best:
            best = mapped
    code = ";".join(f"{pe.src_var}|{pe.src_label}|{pe.pred_label}|"
                    f"{pe.dst_label}|{pe.dst_var}" for pe in best)
    return code, best


def canonical_form(edges: Iterable[PatternEdge]) -> tuple[str, tuple[PatternEdge, ...]]:
    """(code, canonical edge tuple); invariant under variable relabeling."""
    return _canonical(tuple(sorted(set(edges))))


def canonical_code(edges: Iterable[PatternEdge], max_edges: int | None = None) -> str:
    edges = tuple(sorted(set(edges)))
    if max_edges is not None and len(edges) > max_edges:
        raise TooLarge(f"{len(edges)} edges exceeds limit {max_edges}")
    return canonical_form(edges)[0]


def _renumber(edges: Iterable[PatternEdge]) -> tuple[PatternEdge, ...]:
    """Remap variables to a contiguous 0..n-1 range, order-preserving."""
    mapping: dict[int, int] = {}
    for v in sorted(_pattern_vars(edges)):
        mapping[v] = len(mapping)
    return tuple(PatternEdge(mapping[pe.src_var], pe.src_label, pe.pred_label,
                             pe.dst_label, mapping[pe.dst_var]) for pe in edges)


def _abstract(edge_subset: Iterable[GraphEdge]) -> tuple[PatternEdge, ...]:
    """Turn concrete edges into a pattern, one variable per distinct vertex."""
    var_of: dict[int, int] = {}

    def var(v: int) -> int:
        if v not in var_of:
            var_of[v] = len(var_of)
        return var_of[v]

    return tuple(PatternEdge(var(g.src), g.src_label, g.pred, g.dst_label, var(g.dst))
                 for g in sorted(edge_subset))


# -- embedding enumeration (reference path) --------------------------------

def _edge_order(edges: tuple[PatternEdge, ...],
                bound: set[int]) -> list[PatternEdge]:
    """Order edges so each one touches a variable bound before it."""
    remaining = list(edges)
    ordered: list[PatternEdge] = []
    bound = set(bound)
    if not bound and remaining:
        first = remaining.pop(0)
        ordered.append(first)
        bound.update((first.src_var, first.dst_var))
    while remaining:
        for i, pe in enumerate(remaining):
            if pe.src_var in bound or pe.dst_var in bound:
                ordered.append(remaining.pop(i))
                bound.update((pe.src_var, pe.dst_var))
                break
        else:
            raise Disconnected("pattern edge list is not connected")
    return ordered


def mni_support(pattern_edges: Iterable[PatternEdge],
                window_edges: Iterable[GraphEdge]) -> int:
    """MNI support of a pattern, by exhaustive embedding enumeration.

    Embeddings respect edge direction and all labels, and map distinct
    variables to distinct vertices.
    """
    edges = tuple(sorted(set(pattern_edges)))
    if not edges:
        return 0
    live = set(window_edges)
    adj: dict[int, list[GraphEdge]] = {}
    for g in live:
        adj.setdefault(g.src, []).append(g)
        adj.setdefault(g.dst, []).append(g)
    nvars = len(_pattern_vars(edges))
    ordered = _edge_order(edges, set())
    images: list[set[int]] = [set() for _ in range(nvars)]
    found = [False]

    def backtrack(i: int, binding: dict[int, int], used: set[int]) -> None:
        if i == len(ordered):
            found[0] = True
            for var, vertex in binding.items():
                images[var].add(vertex)
            return
        pe = ordered[i]
        sv, dv = binding.get(pe.src_var), binding.get(pe.dst_var)
        if sv is not None and dv is not None:
            if GraphEdge(sv, dv, pe.src_label, pe.pred_label, pe.dst_label) in live:
                backtrack(i + 1, binding, used)
            return
        if i == 0:
            candidates = live
        else:
            anchor = sv if sv is not None else dv
            candidates = adj.get(anchor, ())
        for g in candidates:
            if (g.src_label, g.pred, g.dst_label) != (pe.src_label, pe.pred_label,
                                                      pe.dst_label):
                continue
            new: dict[int, int] = {}
            ok = True
            for var, vertex in ((pe.src_var, g.src), (pe.dst_var, g.dst)):
                have = binding.get(var, new.get(var))
                if have is not None:
                    if have != vertex:
                        ok = False
                        break
                elif vertex in used or vertex in new.values():
                    ok = False
                    break
                else:
                    new[var] = vertex
            if not ok:
                continue
            binding.update(new)
            backtrack(i + 1, binding, used | set(new.values()))
            for var in new:
                del binding[var]

    backtrack(0, {}, set())
    if not found[0]:
        return 0
    return min(len(s) for s in images)


# -- from-scratch mining (the reference) ------------------------------------

def _connected_subsets(live: set[GraphEdge], max_edges: int,
                       seeds: Iterable[GraphEdge] | None = None) -> set[frozenset[GraphEdge]]:
    """All connected edge subsets of size <= max_edges.

    With `seeds` given, only subsets containing at least one seed edge are
    produced (grown outward from the seeds).
    """
    adj: dict[int, set[GraphEdge]] = {}
    for g in live:
        adj.setdefault(g.src, set()).add(g)
        adj.setdefault(g.dst, set()).add(g)
    start = live if seeds is None else [g for g in seeds if g in live]
    level = {frozenset((g,)) for g in start}
    out = set(level)
    for _ in range(max_edges - 1):
        nxt: set[frozenset[GraphEdge]] = set()
        for subset in level:
            for g in subset:
                for neighbor in adj[g.src] | adj[g.dst]:
                    if neighbor not in subset:
                        grown = subset | {neighbor}
                        if grown not in out:
                            nxt.add(grown)
        out |= nxt
        level = nxt
    return out


def _closed_codes(frequent: dict[str, tuple[tuple[PatternEdge, ...], int]]) -> set[str]:
    """Codes of patterns with no equal-support one-edge extension.

    Extensions beyond the mined edge budget are out of the universe, so a
    maximum-size frequent pattern is closed by definition.
    """
    not_closed: set[str] = set()
    for edges, sup in frequent.values():
        if len(edges) < 2:
            continue
        for i in range(len(edges)):
            rest = edges[:i] + edges[i + 1:]
            sub = _renumber(rest)
            if not _vars_connected(sub):
                continue
            sub_code, _ = canonical_form(sub)
            entry = frequent.get(sub_code)
            if entry is not None and entry[1] == sup:
                not_closed.add(sub_code)
    return set(frequent) - not_closed


def mine_window(window_edges: Iterable[GraphEdge], min_sup: int,
                max_edges: int) -> dict[str, Pattern]:
    """Mine the window from scratch: closed patterns with MNI >= min_sup."""
    live = set(window_edges)
    if not live:
        return {}
    patterns: dict[str, tuple[PatternEdge, ...]] = {}
    for subset in _connected_subsets(live, max_edges):
        code, cedges = canonical_form(_abstract(subset))
        patterns.setdefault(code, cedges)
    frequent: dict[str, tuple[tuple[PatternEdge, ...], int]] = {}
    for code, cedges in patterns.items():
        sup = mni_support(cedges, live)
        if sup >= min_sup:
            frequent[code] = (cedges, sup)
    closed = _closed_codes(frequent)
    return {code: Pattern(code, frequent[code][0], frequent[code][1])
            for code in closed}


# -- incremental miner -------------------------------------------------------

class _PatternState:
    __slots__ = ("edges", "embeddings")

    def __init__(self, edges: tuple[PatternEdge, ...],
                 embeddings: set[tuple[int, ...]]):
        self.edges = edges
        self.embeddings = embeddings

    def support(self) -> int:
        if not self.embeddings:
            return 0
        nvars = len(_pattern_vars(self.edges))
        return min(len({emb[i] for emb in self.embeddings}) for i in range(nvars))


class WindowMiner:
    """Sliding window of batches with incrementally maintained patterns.

    The pattern index holds every frequent pattern (closed or not) together
    with its full embedding list.  Arriving edges extend embeddings; evicted
    edges invalidate the embeddings that used them.  When a pattern drops
    below the support threshold its frequent sub-patterns are already in
    the index (anti-monotonicity), so nothing needs re-deriving beyond the
    emission-time closed filter.
    """

    def __init__(self, window_batches: int = 10, min_support: int = 3,
                 max_edges: int = 3):
        if window_batches < 1 or min_support < 1 or max_edges < 1:
            raise ValueError("window_batches, min_support, max_edges must be >= 1")
        self.window_batches = window_batches
        self.min_support = min_support
        self.max_edges = max_edges
        self.batches: deque[list[GraphEdge]] = deque()
        self.batch_nums: deque[int] = deque()
        self.next_batch_index = 0
        self.live: dict[GraphEdge, int] = {}
        self.adj: dict[int, set[GraphEdge]] = {}
        self.index: dict[str, _PatternState] = {}
        self.prev_emission: dict[str, Pattern] = {}

    # -- public API ---------------------------------------------------

    def current_patterns(self) -> list[Pattern]:
        return self._closed_current()

    def advance(self, batch_edges: Iterable[GraphEdge]) -> Emission:
        batch_idx = self.next_batch_index
        self.next_batch_index += 1
        batch = sorted(set(batch_edges))
        old_live = set(self.live)

        self.batches.append(batch)
        self.batch_nums.append(batch_idx)
        for g in batch:
            self.live[g] = self.live.get(g, 0) + 1
        if len(self.batches) > self.window_batches:
            evicted = self.batches.popleft()
            self.batch_nums.popleft()
            for g in evicted:
                self.live[g] -= 1
                if self.live[g] == 0:
                    del self.live[g]

        new_live = set(self.live)
        added = new_live - old_live
        removed = old_live - new_live
        if added or removed:
            self._apply_delta(added, removed)

        current = self._closed_current()
        cur_map = {p.code: p for p in current}
        added_patterns = [p for p in current if p.code not in self.prev_emission]
        removed_patterns = [p for code, p in sorted(self.prev_emission.items())
                            if code not in cur_map]
        self.prev_emission = cur_map
        first = self.batch_nums[0] if self.batch_nums else batch_idx
        return Emission(added_patterns, removed_patterns, current, first, batch_idx)

    # -- delta maintenance --------------------------------------------

    def _apply_delta(self, added: set[GraphEdge], removed: set[GraphEdge]) -> None:
        for g in removed:
            self.adj[g.src].discard(g)
            self.adj[g.dst].discard(g)
        for g in added:
            self.adj.setdefault(g.src, set()).add(g)
            self.adj.setdefault(g.dst, set()).add(g)

        for state in self.index.values():
            if removed:
                state.embeddings = {
                    emb for emb in state.embeddings
                    if not self._embedding_uses(state.edges, emb, removed)}
            if added:
                for g in added:
                    for i in range(len(state.edges)):
                        self._anchored_search(state, i, g)

        if added:
            for subset in _connected_subsets(set(self.live), self.max_edges,
                                             seeds=added):
                code, cedges = canonical_form(_abstract(subset))
                if code in self.index:
                    continue
                state = _PatternState(cedges, set())
                self._full_search(state)
                if state.support() >= self.min_support:
                    self.index[code] = state

        for code in [c for c, st in self.index.items()
                     if st.support() < self.min_support]:
            del self.index[code]

    @staticmethod
    def _embedding_uses(edges: tuple[PatternEdge, ...], emb: tuple[int, ...],
                        removed: set[GraphEdge]) -> bool:
        for pe in edges:
            g = GraphEdge(emb[pe.src_var], emb[pe.dst_var], pe.src_label,
                          pe.pred_label, pe.dst_label)
            if g in removed:
                return True
        return False

    def _anchored_search(self, state: _PatternState, anchor_index: int,
                         g: GraphEdge) -> None:
        """Record every embedding that maps pattern edge `anchor_index` to `g`."""
        pe = state.edges[anchor_index]
        if (pe.src_label, pe.pred_label, pe.dst_label) != (g.src_label, g.pred,
                                                           g.dst_label):
            return
        if (pe.src_var == pe.dst_var) != (g.src == g.dst):
            return
        binding = {pe.src_var: g.src, pe.dst_var: g.dst}
        rest = state.edges[:anchor_index] + state.edges[anchor_index + 1:]
        self._complete(state, rest, binding)

    def _full_search(self, state: _PatternState) -> None:
        first = state.edges[0]
        for g in list(self.live):
            self._anchored_search_first(state, first, g)

    def _anchored_search_first(self, state: _PatternState, pe: PatternEdge,
                               g: GraphEdge) -> None:
        if (pe.src_label, pe.pred_label, pe.dst_label) != (g.src_label, g.pred,
                                                           g.dst_label):
            return
        if (pe.src_var == pe.dst_var) != (g.src == g.dst):
            return
        binding = {pe.src_var: g.src, pe.dst_var: g.dst}
        self._complete(state, state.edges[1:], binding)

    def _complete(self, state: _PatternState, rest: tuple[PatternEdge, ...],
                  binding: dict[int, int]) -> None:
        nvars = len(_pattern_vars(state.edges))
        if len(set(binding.values())) != len(binding):
            return
        ordered = _edge_order(rest, set(binding)) if rest else []

        def backtrack(i: int, bind: dict[int, int], used: set[int]) -> None:
            if i == len(ordered):
                state.embeddings.add(tuple(bind[v] for v in range(nvars)))
                return
            pe = ordered[i]
            sv, dv = bind.get(pe.src_var), bind.get(pe.dst_var)
            if sv is not None and dv is not None:
                if GraphEdge(sv, dv, pe.src_label, pe.pred_label,
                             pe.dst_label) in self.live:
                    backtrack(i + 1, bind, used)
                return
            anchor = sv if sv is not None else dv
            for g in self.adj.get(anchor, ()):
                if (g.src_label, g.pred, g.dst_label) != (pe.src_label,
                                                          pe.pred_label,
                                                          pe.dst_label):
                    continue
                if sv is not None:
                    if g.src != sv:
                        continue
                    other_var, other_vertex = pe.dst_var, g.dst
                else:
                    if g.dst != dv:
                        continue
                    other_var, other_vertex = pe.src_var, g.src
                if other_var in bind:
                    if bind[other_var] != other_vertex:
                        continue
                    backtrack(i + 1, bind, used)
                else:
                    if other_vertex in used:
                        continue
                    bind[other_var] = other_vertex
                    backtrack(i + 1, bind, used | {other_vertex})
                    del bind[other_var]

        backtrack(0, dict(binding), set(binding.values()))

    # -- emission -------------------------------------------------------

    def _closed_current(self) -> list[Pattern]:
        frequent = {code: (st.edges, st.support())
                    for code, st in self.index.items()}
        closed = _closed_codes(frequent)
        out = [Pattern(code, frequent[code][0], frequent[code][1])
               for code in closed]
        out.sort(key=lambda p: (-p.support, p.code))
        return out
