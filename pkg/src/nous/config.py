"""Engine configuration: one JSON file, every knob validated at load.

Default path is ./nous.json.  Keys are camelCase; unknown keys are
rejected so typos surface at startup instead of silently using defaults.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import ConfigError

DEFAULT_CONFIG_PATH = "nous.json"


@dataclass
class LinkerConfigBlock:
    lambda_str: float = 0.4
    lambda_ctx: float = 0.6
    tau_new: float = 0.25
    max_candidates: int = 16


@dataclass
class BprConfigBlock:
    dim: int = 16
    learning_rate: float = 0.05
    reg: float = 0.01
    epochs: int = 30
    seed: int = 0
    prior: float = 0.5
    train_min_confidence: float = 1.0
    negative_space: str = "predicateObjects"


@dataclass
class MinerConfigBlock:
    window_batches: int = 10
    min_support: int = 3
    max_edges: int = 3
    label_mode: str = "type"


@dataclass
class QaConfigBlock:
    topics: int = 20
    alpha: float | None = None  # None -> 50 / topics
    beta: float = 0.01
    gibbs_iters: int = 500
    seed: int = 0
    beam_width: int = 8
    max_hops: int = 4
    k_paths: int = 5
    min_edge_confidence: float = 0.0
    coherence: str = "meanConsecutive"
    constraint_mode: str = "containsEdge"

    @property
    def effective_alpha(self) -> float:
        return 50.0 / self.topics if self.alpha is None else self.alpha


@dataclass
class IngestConfigBlock:
    batch_size: int = 5
    extracted_predicate_policy: str = "create"
    min_accept_confidence: float = 0.0
    batch_by: str = "count"
    bucket_seconds: int = 86400
    type_predicate: str = "type"


@dataclass
class ServiceConfigBlock:
    port: int = 8650
    ui_dir: str = "frontend"
    entity_card_limit: int = 25


@dataclass
class EngineConfig:
    data_dir: str = "nous-data"
    seeds_file: str = ""
    docs_file: str = ""
    linker: LinkerConfigBlock = field(default_factory=LinkerConfigBlock)
    bpr: BprConfigBlock = field(default_factory=BprConfigBlock)
    miner: MinerConfigBlock = field(default_factory=MinerConfigBlock)
    qa: QaConfigBlock = field(default_factory=QaConfigBlock)
    ingest: IngestConfigBlock = field(default_factory=IngestConfigBlock)
    service: ServiceConfigBlock = field(default_factory=ServiceConfigBlock)


# (config key, attribute, type) per block; type "number" accepts int or float
_SCHEMA = {
    "linker": [("lambdaStr", "lambda_str", "number"),
               ("lambdaCtx", "lambda_ctx", "number"),
               ("tauNew", "tau_new", "number"),
               ("maxCandidates", "max_candidates", "int")],
    "bpr": [("dim", "dim", "int"),
            ("learningRate", "learning_rate", "number"),
            ("regularization", "reg", "number"),
            ("epochs", "epochs", "int"),
            ("seed", "seed", "int"),
            ("prior", "prior", "number"),
            ("trainMinConfidence", "train_min_confidence", "number"),
            ("negativeSpace", "negative_space", "str")],
    "miner": [("windowBatches", "window_batches", "int"),
              ("minSupport", "min_support", "int"),
              ("maxEdges", "max_edges", "int"),
              ("labelMode", "label_mode", "str")],
    "qa": [("topics", "topics", "int"),
           ("alpha", "alpha", "number"),
           ("beta", "beta", "number"),
           ("gibbsIters", "gibbs_iters", "int"),
           ("seed", "seed", "int"),
           ("beamWidth", "beam_width", "int"),
           ("maxHops", "max_hops", "int"),
           ("kPaths", "k_paths", "int"),
           ("minEdgeConfidence", "min_edge_confidence", "number"),
           ("coherence", "coherence", "str"),
           ("constraintMode", "constraint_mode", "str")],
    "ingest": [("batchSize", "batch_size", "int"),
               ("extractedPredicatePolicy", "extracted_predicate_policy", "str"),
               ("minAcceptConfidence", "min_accept_confidence", "number"),
               ("batchBy", "batch_by", "str"),
               ("bucketSeconds", "bucket_seconds", "int"),
               ("typePredicate", "type_predicate", "str")],
    "service": [("port", "port", "int"),
                ("uiDir", "ui_dir", "str"),
                ("entityCardLimit", "entity_card_limit", "int")],
}

_TOP_LEVEL = {"dataDir": "data_dir", "seedsFile": "seeds_file",
              "docsFile": "docs_file"}


def _coerce(dotted: str, value, kind: str):
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{dotted}: expected an integer, got {value!r}")
        return value
    if kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{dotted}: expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{dotted}: expected a string, got {value!r}")
    return value


def _check(cond: bool, key: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{key}: {message}")


def _validate(cfg: EngineConfig) -> None:
    _check(cfg.linker.lambda_str >= 0 and cfg.linker.lambda_ctx >= 0,
           "linker.lambdaStr", "weights must be >= 0")
    _check(abs(cfg.linker.lambda_str + cfg.linker.lambda_ctx - 1.0) <= 1e-9,
           "linker.lambdaCtx", "lambdaStr + lambdaCtx must equal 1")
    _check(0.0 <= cfg.linker.tau_new <= 1.0, "linker.tauNew", "must lie in [0, 1]")
    _check(cfg.linker.max_candidates >= 1, "linker.maxCandidates", "must be >= 1")

    _check(cfg.bpr.dim >= 1, "bpr.dim", "must be >= 1")
    _check(cfg.bpr.learning_rate > 0, "bpr.learningRate", "must be > 0")
    _check(cfg.bpr.reg >= 0, "bpr.regularization", "must be >= 0")
    _check(cfg.bpr.epochs >= 0, "bpr.epochs", "must be >= 0")
    _check(0.0 < cfg.bpr.prior < 1.0, "bpr.prior", "must lie strictly in (0, 1)")
    _check(cfg.bpr.negative_space in ("predicateObjects", "allEntities"),
           "bpr.negativeSpace", "must be predicateObjects or allEntities")

    _check(cfg.miner.window_batches >= 1, "miner.windowBatches", "must be >= 1")
    _check(cfg.miner.min_support >= 1, "miner.minSupport", "must be >= 1")
    _check(cfg.miner.max_edges >= 1, "miner.maxEdges", "must be >= 1")
    _check(cfg.miner.label_mode in ("type", "entity", "predicateOnly"),
           "miner.labelMode", "must be type, entity or predicateOnly")

    _check(cfg.qa.topics >= 2, "qa.topics", "must be >= 2")
    _check(cfg.qa.alpha is None or cfg.qa.alpha > 0, "qa.alpha", "must be > 0")
    _check(cfg.qa.beta > 0, "qa.beta", "must be > 0")
    _check(cfg.qa.gibbs_iters >= 1, "qa.gibbsIters", "must be >= 1")
    _check(cfg.qa.beam_width >= 1, "qa.beamWidth", "must be >= 1")
    _check(cfg.qa.max_hops >= 1, "qa.maxHops", "must be >= 1")
    _check(cfg.qa.k_paths >= 1, "qa.kPaths", "must be >= 1")
    _check(0.0 <= cfg.qa.min_edge_confidence <= 1.0,
           "qa.minEdgeConfidence", "must lie in [0, 1]")
    _check(cfg.qa.coherence in ("meanConsecutive", "sumConsecutive",
                                "maxConsecutive"),
           "qa.coherence", "must be meanConsecutive, sumConsecutive or maxConsecutive")
    _check(cfg.qa.constraint_mode in ("containsEdge", "lastEdge"),
           "qa.constraintMode", "must be containsEdge or lastEdge")

    _check(cfg.ingest.batch_size >= 1, "ingest.batchSize", "must be >= 1")
    _check(cfg.ingest.extracted_predicate_policy in ("create", "drop"),
           "ingest.extractedPredicatePolicy", "must be create or drop")
    _check(0.0 <= cfg.ingest.min_accept_confidence <= 1.0,
           "ingest.minAcceptConfidence", "must lie in [0, 1]")
    _check(cfg.ingest.batch_by in ("count", "time"),
           "ingest.batchBy", "must be count or time")
    _check(cfg.ingest.bucket_seconds >= 1, "ingest.bucketSeconds", "must be >= 1")

    _check(1 <= cfg.service.port <= 65535, "service.port", "must be a port number")
    _check(cfg.service.entity_card_limit >= 1,
           "service.entityCardLimit", "must be >= 1")


def config_from_dict(data: dict) -> EngineConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    cfg = EngineConfig()
    for key, value in data.items():
        if key in _TOP_LEVEL:
            setattr(cfg, _TOP_LEVEL[key],
                    _coerce(key, value, "str"))
            continue
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"{key}: expected an object")
        block = getattr(cfg, key)
        known = {entry[0]: entry for entry in _SCHEMA[key]}
        for sub, sub_value in value.items():
            if sub not in known:
                raise ConfigError(f"unknown config key '{key}.{sub}'")
            cfg_key, attr, kind = known[sub]
            setattr(block, attr, _coerce(f"{key}.{cfg_key}", sub_value, kind))
    _validate(cfg)
    return cfg


def load_config(path: str | None = None) -> EngineConfig:
    path = path or DEFAULT_CONFIG_PATH
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e.msg})") from None
    return config_from_dict(data)
