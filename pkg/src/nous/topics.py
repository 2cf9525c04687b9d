"""Entity topic distributions via LDA, plus the divergence used by path QA.

Training is collapsed Gibbs sampling with a seeded generator, so a given
(corpus, hyperparameters, seed) always produces bit-identical topic state.
Entities without a document inherit the mean of their graph neighbors'
distributions, falling back to uniform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyVocabulary, TooFewDocs
from .store import KgSnapshot


@dataclass
class TopicModel:
    k: int
    vocab: tuple[str, ...]
    phi: np.ndarray              # k x |vocab|, rows sum to 1
    theta: dict[int, np.ndarray]  # entity id -> length-k distribution
    hyper: dict

    def uniform(self) -> np.ndarray:
        return np.full(self.k, 1.0 / self.k)


def train_lda(docs: dict[int, list[str]], k: int, alpha: float, beta: float,
              gibbs_iters: int, seed: int) -> TopicModel:
    """Collapsed Gibbs LDA over per-entity documents.

    Update: P(z_i = k | rest) ~ (n_dk + alpha) * (n_kw + beta) / (n_k +
    |V| beta); theta and phi are read off the final counts.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    items = [(eid, tokens) for eid, tokens in sorted(docs.items()) if tokens]
    if len(items) < 2:
        raise TooFewDocs(f"{len(items)} non-empty documents, need at least 2")
    vocab = tuple(sorted({t for _, tokens in items for t in tokens}))
    if not vocab:
        raise EmptyVocabulary("no tokens in any document")
    word_id = {w: i for i, w in enumerate(vocab)}
    v = len(vocab)

    docs_w = [[word_id[t] for t in tokens] for _, tokens in items]
    n_dk = [[0] * k for _ in docs_w]
    n_kw = [[0] * v for _ in range(k)]
    n_k = [0] * k
    rng = np.random.default_rng(seed)

    assignments: list[list[int]] = []
    for d, words in enumerate(docs_w):
        zs = []
        for w in words:
            z = int(rng.integers(k))
            zs.append(z)
            n_dk[d][z] += 1
            n_kw[z][w] += 1
            n_k[z] += 1
        assignments.append(zs)

    vbeta = v * beta
    for _ in range(gibbs_iters):
        for d, words in enumerate(docs_w):
            row = n_dk[d]
            zs = assignments[d]
            for i, w in enumerate(words):
                z = zs[i]
                row[z] -= 1
                n_kw[z][w] -= 1
                n_k[z] -= 1
                total = 0.0
                weights = []
                for t in range(k):
                    p = (row[t] + alpha) * (n_kw[t][w] + beta) / (n_k[t] + vbeta)
                    total += p
                    weights.append(total)
                r = rng.random() * total
                z = 0
                while weights[z] < r:
                    z += 1
                zs[i] = z
                row[z] += 1
                n_kw[z][w] += 1
                n_k[z] += 1

    theta: dict[int, np.ndarray] = {}
    for d, (eid, _) in enumerate(items):
        n_d = len(docs_w[d])
        theta[eid] = (np.array(n_dk[d], dtype=np.float64) + alpha) / (n_d + k * alpha)
    phi = np.empty((k, v))
    for t in range(k):
        phi[t] = (np.array(n_kw[t], dtype=np.float64) + beta) / (n_k[t] + vbeta)
    return TopicModel(k, vocab, phi, theta,
                      {"alpha": alpha, "beta": beta,
                       "gibbsIters": gibbs_iters, "seed": seed})


def entity_topic(model: TopicModel, snapshot: KgSnapshot, entity_id: int) -> np.ndarray:
    """The entity's own theta, else the mean over documented neighbors,
    else uniform."""
    own = model.theta.get(entity_id)
    if own is not None:
        return own
    rows = [model.theta[n] for n in snapshot.neighbors(entity_id)
            if n in model.theta]
    if rows:
        mean = np.mean(rows, axis=0)
        return mean / mean.sum()
    return model.uniform()


def js_divergence(p, q) -> float:
    """Jensen-Shannon divergence, natural log, range [0, ln 2]."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionMismatch(f"{p.shape} vs {q.shape}")
    m = (p + q) / 2.0

    def kl(a: np.ndarray) -> float:
        mask = a > 0
        return float(np.sum(a[mask] * np.log(a[mask] / m[mask])))

    return 0.5 * kl(p) + 0.5 * kl(q)


# -- entity documents -------------------------------------------------------

def load_entity_docs(path: str, snapshot: KgSnapshot) -> tuple[dict[int, list[str]], int]:
    """Read a JSON-lines entity-document file.

    Each line is {"entity": <name>, "tokens": [...]}; names resolve through
    the snapshot's normalized label index.  Returns (docs, skipped) where
    skipped counts lines whose entity is unknown.
    """
    docs: dict[int, list[str]] = {}
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            ent = snapshot.find_entity(obj["entity"])
            if ent is None:
                skipped += 1
                continue
            docs.setdefault(ent.id, []).extend(str(t) for t in obj["tokens"])
    return docs, skipped


# -- persistence -------------------------------------------------------------

FORMAT_TAG = "nous-topics-v1"


def save_topics(model: TopicModel, path: str) -> None:
    payload = {
        "format": FORMAT_TAG,
        "k": model.k,
        "vocab": list(model.vocab),
        "phi": model.phi.tolist(),
        "theta": {str(eid): model.theta[eid].tolist()
                  for eid in sorted(model.theta)},
        "hyper": model.hyper,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_topics(path: str) -> TopicModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_TAG:
        raise ValueError(f"unsupported topic file format: {payload.get('format')!r}")
    return TopicModel(
        payload["k"], tuple(payload["vocab"]),
        np.array(payload["phi"], dtype=np.float64),
        {int(k): np.array(v, dtype=np.float64)
         for k, v in payload["theta"].items()},
        payload["hyper"])
