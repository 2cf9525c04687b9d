"""Quality report: figures plus TSV summaries rendered to a directory.

Gives the analyst a quick read on the graph after an ingestion session:
how confident the extracted facts are versus the curated backbone, which
predicates dominate, and what the miner currently considers trending.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .engine import Engine  # noqa: E402
from .store import is_curated  # noqa: E402


def _confidence_figure(snapshot, path: str) -> None:
    curated = [f.confidence for f in snapshot.facts() if is_curated(f.provenance)]
    extracted = [f.confidence for f in snapshot.facts()
                 if not is_curated(f.provenance)]
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = [i / 20 for i in range(21)]
    ax.hist([curated, extracted], bins=bins, stacked=False,
            label=["curated", "extracted"], color=["#c0392b", "#2980b9"])
    ax.set_xlabel("confidence")
    ax.set_ylabel("facts")
    ax.set_title("Fact confidence by provenance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _pattern_figure(trending: list[dict], path: str, top: int = 12) -> None:
    ranked = sorted(trending, key=lambda p: (-p["support"], p["code"]))[:top]
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.45 * len(ranked) + 1)))
    if ranked:
        labels = [_pattern_label(p) for p in ranked]
        supports = [p["support"] for p in ranked]
        ax.barh(range(len(ranked)), supports, color="#27ae60")
        ax.set_yticks(range(len(ranked)))
        ax.set_yticklabels(labels, fontsize=7)
        ax.invert_yaxis()
        ax.set_xlabel("MNI support")
    else:
        ax.text(0.5, 0.5, "no patterns in window", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title("Trending closed patterns")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _pattern_label(p: dict) -> str:
    parts = [f"({e['srcLabel']})-[{e['pred']}]->({e['dstLabel']})"
             for e in p["edges"]]
    return " ".join(parts)


def _predicate_figure(rows: list[tuple[str, str, int, float]], path: str,
                      top: int = 15) -> None:
    ranked = sorted(rows, key=lambda r: (-r[2], r[0]))[:top]
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.4 * len(ranked) + 1)))
    if ranked:
        ax.barh(range(len(ranked)), [r[2] for r in ranked], color="#8e44ad")
        ax.set_yticks(range(len(ranked)))
        ax.set_yticklabels([r[0] for r in ranked], fontsize=8)
        ax.invert_yaxis()
        ax.set_xlabel("facts")
    else:
        ax.text(0.5, 0.5, "empty store", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title("Facts per predicate")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(engine: Engine, out_dir: str) -> dict:
    """Render the figures and TSV files; returns the file manifest."""
    os.makedirs(out_dir, exist_ok=True)
    snapshot = engine.store.snapshot()

    pred_rows: list[tuple[str, str, int, float]] = []
    for pred in snapshot.predicates():
        facts = [f for f in snapshot.facts() if f.predicate == pred.id]
        if not facts:
            continue
        mean_conf = sum(f.confidence for f in facts) / len(facts)
        pred_rows.append((pred.name, pred.namespace.value, len(facts), mean_conf))
    pred_rows.sort(key=lambda r: (-r[2], r[0]))

    curated_n = sum(1 for f in snapshot.facts() if is_curated(f.provenance))
    stats = engine.stats()
    summary = [
        ("entities", snapshot.entity_count),
        ("facts", snapshot.fact_count),
        ("curatedFacts", curated_n),
        ("extractedFacts", snapshot.fact_count - curated_n),
        ("predicates", len(snapshot.predicates())),
        ("patterns", stats["patterns"]),
        ("lastBatch", stats["lastBatch"] if stats["lastBatch"] is not None else ""),
    ]

    files = {}

    def out(name: str) -> str:
        files[name] = os.path.join(out_dir, name)
        return files[name]

    with open(out("summary.tsv"), "w", encoding="utf-8") as fh:
        fh.write("metric\tvalue\n")
        for key, value in summary:
            fh.write(f"{key}\t{value}\n")

    with open(out("predicates.tsv"), "w", encoding="utf-8") as fh:
        fh.write("predicate\tnamespace\tfacts\tmeanConfidence\n")
        for name, ns, count, mean_conf in pred_rows:
            fh.write(f"{name}\t{ns}\t{count}\t{mean_conf:.6f}\n")

    with open(out("patterns.tsv"), "w", encoding="utf-8") as fh:
        fh.write("code\tsupport\tedges\n")
        for p in sorted(engine.trending, key=lambda x: (-x["support"], x["code"])):
            fh.write(f"{p['code']}\t{p['support']}\t{len(p['edges'])}\n")

    _confidence_figure(snapshot, out("confidence_histogram.png"))
    _pattern_figure(engine.trending, out("pattern_supports.png"))
    _predicate_figure(pred_rows, out("predicate_counts.png"))

    return {"outDir": out_dir, "files": sorted(files)}
