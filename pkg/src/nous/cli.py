"""Command line interface.

Every subcommand loads the engine state from the configured data directory,
runs one operation, persists the state back, and prints a JSON payload to
stdout.  Exit codes: 0 success, 1 usage error, 2 data error (the error name
is printed verbatim in the JSON body).
"""

from __future__ import annotations

import sys

import click

from .config import DEFAULT_CONFIG_PATH, load_config
from .engine import Engine, to_json
from .errors import NousError


@click.group()
@click.option("--config", "config_path", default=DEFAULT_CONFIG_PATH,
              show_default=True, help="Path to the engine config file.")
@click.pass_context
def cli(ctx, config_path):
    """nous: dynamic knowledge-graph engine."""
    ctx.obj = {"config_path": config_path}


def _engine(ctx) -> Engine:
    engine = Engine(load_config(ctx.obj["config_path"]))
    engine.load_state()
    return engine


def _emit(payload) -> None:
    click.echo(to_json(payload))


@cli.command("load-kb")
@click.argument("tsv", type=str)
@click.pass_context
def load_kb(ctx, tsv):
    """Load the curated KB TSV (a mandatory first step)."""
    engine = _engine(ctx)
    payload = engine.load_kb(tsv)
    if engine.config.seeds_file:
        payload["ruleModels"] = engine.load_seeds(engine.config.seeds_file)
        payload["predicates"] = len(engine.store.snapshot().predicates())
    engine.save_state()
    _emit(payload)


@cli.command("ingest")
@click.argument("jsonl", type=str)
@click.pass_context
def ingest(ctx, jsonl):
    """Stream raw triples through the fusion pipeline."""
    engine = _engine(ctx)
    report = engine.ingest_file(jsonl)
    engine.save_state()
    _emit(report.to_payload())


@cli.command("expand")
@click.argument("jsonl", type=str)
@click.pass_context
def expand(ctx, jsonl):
    """Expand predicate rule models by distant supervision."""
    engine = _engine(ctx)
    report = engine.expand_rules(jsonl)
    engine.save_state()
    _emit(report)


@cli.command("retrain")
@click.pass_context
def retrain(ctx):
    """Refit the per-predicate confidence models from the current graph."""
    engine = _engine(ctx)
    payload = engine.retrain()
    engine.save_state()
    _emit(payload)


@cli.command("train-topics")
@click.option("--docs", "docs_path", default=None,
              help="Entity-document JSONL (defaults to docsFile in config).")
@click.pass_context
def train_topics(ctx, docs_path):
    """Fit the entity topic model used by path ranking."""
    engine = _engine(ctx)
    payload = engine.train_topics(docs_path)
    engine.save_state()
    _emit(payload)


@cli.command("ask")
@click.argument("source")
@click.argument("target")
@click.option("--rel", default=None, help="Relationship constraint (predicate name).")
@click.option("--k", default=None, type=int, help="Number of paths to return.")
@click.option("--max-hops", default=None, type=int, help="Hop limit.")
@click.pass_context
def ask(ctx, source, target, rel, k, max_hops):
    """Explain how SOURCE relates to TARGET with top-K coherent paths."""
    if source.strip() and target.strip() \
            and source.strip().lower() == target.strip().lower():
        raise click.UsageError("source and target must differ")
    engine = _engine(ctx)
    _emit(engine.ask(source, target, rel=rel, k=k, max_hops=max_hops))


@cli.command("trending")
@click.pass_context
def trending(ctx):
    """Print the latest closed frequent pattern emission."""
    engine = _engine(ctx)
    _emit(engine.trending)


@cli.command("stats")
@click.pass_context
def stats(ctx):
    """Counts, last batch index and model versions."""
    engine = _engine(ctx)
    _emit(engine.stats())


@cli.command("report")
@click.option("--out", "out_dir", default="nous-report",
              show_default=True, help="Directory for figures and TSV files.")
@click.pass_context
def report(ctx, out_dir):
    """Render quality figures and TSV summaries for the current graph."""
    from .report import write_report
    engine = _engine(ctx)
    _emit(write_report(engine, out_dir))


@cli.command("serve")
@click.option("--port", default=None, type=int, help="Override the config port.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_context
def serve(ctx, port, host):
    """Serve the HTTP API (and the web UI when built)."""
    import uvicorn

    from .server import create_app
    engine = _engine(ctx)
    app = create_app(engine)
    uvicorn.run(app, host=host, port=port or engine.config.service.port,
                log_level="warning")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        click.echo(f"usage error: {e.format_message()}", err=True)
        return 1
    except NousError as e:
        click.echo(to_json({"error": e.name, "detail": e.detail}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
