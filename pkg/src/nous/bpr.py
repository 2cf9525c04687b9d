"""Per-predicate latent-feature models scoring triple plausibility.

One small matrix-factorization model per predicate, trained on observed
(subject, object) pairs with the pairwise ranking criterion: an observed
pair should outscore the same subject with a corrupted object.  Scores pass
through a sigmoid, so any candidate triple gets a confidence in (0, 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NoPositives
from .store import KgSnapshot

Pair = tuple[int, int]


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@dataclass(frozen=True)
class BprHyper:
    dim: int = 16
    learning_rate: float = 0.05
    reg: float = 0.01
    epochs: int = 30
    seed: int = 0
    negative_space: str = "predicateObjects"  # or "allEntities"


@dataclass
class BprModel:
    predicate_id: int
    dim: int
    hyper: BprHyper
    subject_vecs: dict[int, np.ndarray] = field(default_factory=dict)
    object_vecs: dict[int, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class TripleScore:
    value: float
    trained: bool


def _init_vectors(seed: int, predicate_id: int, entity_id: int,
                  dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (subject, object) init vectors for one entity.

    Components are uniform in [-0.5/dim, +0.5/dim]; the generator is keyed
    by (seed, predicate, entity), so initialization never depends on the
    order entities are encountered in.
    """
    rng = np.random.default_rng([seed, predicate_id, entity_id])
    vals = rng.uniform(-0.5 / dim, 0.5 / dim, size=2 * dim)
    return vals[:dim].copy(), vals[dim:].copy()


def init_model(predicate_id: int, positives: list[Pair], dim: int,
               hyper: BprHyper) -> BprModel:
    if not positives:
        raise NoPositives(f"predicate id {predicate_id}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    model = BprModel(predicate_id, dim, hyper)
    for s, o in positives:
        if s not in model.subject_vecs:
            model.subject_vecs[s] = _init_vectors(hyper.seed, predicate_id, s, dim)[0]
        if o not in model.object_vecs:
            model.object_vecs[o] = _init_vectors(hyper.seed, predicate_id, o, dim)[1]
    return model


def raw_score(model: BprModel, s: int, o: int) -> float | None:
    """Dot product of the endpoint embeddings; None when untrained."""
    u = model.subject_vecs.get(s)
    v = model.object_vecs.get(o)
    if u is None or v is None:
        return None
    return float(np.dot(u, v))


def train_epoch(model: BprModel, positives: list[Pair], epoch: int,
                negative_sampler=None) -> float:
    """One SGD pass in a seeded shuffle order; returns mean pre-update loss.

    Per sample: L = -ln sigma(x(s,o) - x(s,o')) + reg * (|u_s|^2 + |v_o|^2
    + |v_o'|^2), with the negative o' drawn uniformly from the predicate's
    object set minus o (sample skipped when that set is empty).  Gradients
    are evaluated at the pre-update parameters.
    """
    hp = model.hyper
    shuffle_rng = np.random.default_rng([hp.seed, model.predicate_id, epoch, 1])
    order = shuffle_rng.permutation(len(positives))
    if negative_sampler is None:
        negative_sampler = _uniform_sampler(model, positives, epoch)

    eta, reg = hp.learning_rate, hp.reg
    total = 0.0
    n = 0
    for idx in order:
        s, o = positives[idx]
        neg = negative_sampler(s, o)
        if neg is None:
            continue
        u_s = model.subject_vecs[s]
        v_o = model.object_vecs[o]
        v_n = model.object_vecs.get(neg)
        if v_n is None:
            # negatives outside the observed object set (allEntities mode)
            v_n = _init_vectors(hp.seed, model.predicate_id, neg, model.dim)[1]
            model.object_vecs[neg] = v_n
        delta = float(np.dot(u_s, v_o) - np.dot(u_s, v_n))
        loss = -math.log(sigmoid(delta)) + reg * (
            float(np.dot(u_s, u_s)) + float(np.dot(v_o, v_o)) + float(np.dot(v_n, v_n)))
        total += loss
        n += 1
        g = sigmoid(-delta)
        grad_u = -g * (v_o - v_n) + 2 * reg * u_s
        grad_vo = -g * u_s + 2 * reg * v_o
        grad_vn = g * u_s + 2 * reg * v_n
        model.subject_vecs[s] = u_s - eta * grad_u
        model.object_vecs[o] = v_o - eta * grad_vo
        model.object_vecs[neg] = v_n - eta * grad_vn
    return total / n if n else 0.0


def _uniform_sampler(model: BprModel, positives: list[Pair], epoch: int):
    hp = model.hyper
    rng = np.random.default_rng([hp.seed, model.predicate_id, epoch, 2])
    if hp.negative_space == "allEntities":
        space = sorted({s for s, _ in positives} | {o for _, o in positives})
    else:
        space = sorted({o for _, o in positives})

    def sample(s: int, o: int) -> int | None:
        if o in space and len(space) == 1:
            return None
        k = len(space) - 1 if o in space else len(space)
        if k <= 0:
            return None
        j = int(rng.integers(k))
        if o in space:
            pos = space.index(o)
            if j >= pos:
                j += 1
        return space[j]

    return sample


def score_triple(models: dict[int, BprModel], s: int, p: int, o: int,
                 prior: float = 0.5) -> TripleScore:
    """Sigmoid of the raw score, or the prior when untrained."""
    if not (0.0 < prior < 1.0):
        raise ValueError("prior must lie strictly in (0, 1)")
    model = models.get(p)
    if model is None:
        return TripleScore(prior, False)
    raw = raw_score(model, s, o)
    if raw is None:
        return TripleScore(prior, False)
    return TripleScore(sigmoid(raw), True)


def training_pairs(snapshot: KgSnapshot, predicate_id: int,
                   min_confidence: float = 1.0) -> list[Pair]:
    """Distinct high-confidence (subject, object) pairs for one predicate."""
    pairs = {(f.subject, f.object) for f in snapshot.facts()
             if f.predicate == predicate_id and f.confidence >= min_confidence}
    return sorted(pairs)


def retrain(snapshot: KgSnapshot, hyper: BprHyper,
            predicate_ids=None, min_confidence: float = 1.0,
            ) -> tuple[dict[int, BprModel], list[int]]:
    """Fit fresh models for the given predicates (all when None).

    Returns (models, skipped) where skipped lists predicates with no
    qualifying training pairs.  Callers publish the returned dict
    atomically; readers keep scoring against the previous one meanwhile.
    """
    if snapshot.fact_count == 0:
        raise NoPositives("snapshot holds no facts")
    if predicate_ids is None:
        predicate_ids = [p.id for p in snapshot.predicates()]
    models: dict[int, BprModel] = {}
    skipped: list[int] = []
    for pid in sorted(predicate_ids):
        positives = training_pairs(snapshot, pid, min_confidence)
        if not positives:
            skipped.append(pid)
            continue
        model = init_model(pid, positives, hyper.dim, hyper)
        for epoch in range(hyper.epochs):
            train_epoch(model, positives, epoch)
        models[pid] = model
    return models, skipped


# -- persistence -----------------------------------------------------------
#
# models.bpr is JSON: {"format": "nous-bpr-v1", "models": [{"predicate",
# "dim", "hyper", "subjects": {id: [floats]}, "objects": {...}}]}.  Floats
# are serialized with full repr precision, so reloaded scores are bit-exact.

FORMAT_TAG = "nous-bpr-v1"


def save_models(models: dict[int, BprModel], path: str) -> None:
    payload = {"format": FORMAT_TAG, "models": []}
    for pid in sorted(models):
        m = models[pid]
        payload["models"].append({
            "predicate": pid,
            "dim": m.dim,
            "hyper": asdict(m.hyper),
            "subjects": {str(k): m.subject_vecs[k].tolist()
                         for k in sorted(m.subject_vecs)},
            "objects": {str(k): m.object_vecs[k].tolist()
                        for k in sorted(m.object_vecs)},
        })
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_models(path: str) -> dict[int, BprModel]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_TAG:
        raise ValueError(f"unsupported model file format: {payload.get('format')!r}")
    models: dict[int, BprModel] = {}
    for entry in payload["models"]:
        hyper = BprHyper(**entry["hyper"])
        model = BprModel(entry["predicate"], entry["dim"], hyper)
        model.subject_vecs = {int(k): np.array(v, dtype=np.float64)
                              for k, v in entry["subjects"].items()}
        model.object_vecs = {int(k): np.array(v, dtype=np.float64)
                             for k, v in entry["objects"].items()}
        models[entry["predicate"]] = model
    return models
