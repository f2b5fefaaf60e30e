"""Pipeline driver: synthesize, ingest, train, evaluate, fit topics, serve,
and one-shot analysis. Artifacts land under --output-dir with fixed names
(store.json, model.bin, topics.json, eval.json) so the commands compose.

Every command accepts --config pointing at a JSON file whose keys mirror the
option names (optionally nested under the command name); explicit flags win
over config values, config values win over built-in defaults.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import classifier, service, synthetic, topics as topics_mod
from .corpus import load_corpus, load_ffr_series, save_corpus, save_ffr_series, tokenize_document
from .errors import FedNlpError
from .sentiment import default_financial_lexicon, default_generic_lexicon, load_lexicon

MASK64 = 0xFFFFFFFFFFFFFFFF


def _apply_config(ctx: click.Context, config_path: str | None) -> None:
    """Fill parameters the user did not pass explicitly from the config file."""
    if config_path is None:
        return
    with open(config_path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise click.ClickException(f"{config_path}: config must be a JSON object")
    section = cfg.get(ctx.command.name, {})
    for name in ctx.params:
        if name == "config":
            continue
        source = ctx.get_parameter_source(name)
        if source is not None and source.name == "COMMANDLINE":
            continue
        if isinstance(section, dict) and name in section:
            ctx.params[name] = section[name]
        elif name in cfg and not isinstance(cfg[name], dict):
            ctx.params[name] = cfg[name]


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


def _split_docs(docs, policy: str, test_fraction: float, seed: int):
    if not 0 < test_fraction <= 0.5:
        raise click.ClickException(
            f"test-fraction must be in (0, 0.5], got {test_fraction}"
        )
    ordered = sorted(docs, key=lambda d: (d.date, d.id))
    n_test = max(1, round(len(ordered) * test_fraction))
    if policy == "chronological":
        return ordered[:-n_test], ordered[-n_test:]
    if policy == "random":
        import numpy as np

        rng = np.random.default_rng(seed & MASK64)
        perm = rng.permutation(len(ordered))
        test_idx = set(int(i) for i in perm[:n_test])
        train = [d for i, d in enumerate(ordered) if i not in test_idx]
        test = [d for i, d in enumerate(ordered) if i in test_idx]
        return train, test
    raise click.ClickException(f"unknown split policy {policy!r}")


config_option = click.option(
    "--config", type=click.Path(exists=True, dir_okay=False), default=None,
    help="JSON file with default option values.",
)


@click.group(name="fednlp")
def cli():
    """Interpretable NLP pipeline for central-bank communications."""


@cli.command("make-synthetic")
@config_option
@click.option("--output-dir", type=click.Path(file_okay=False), required=True)
@click.option("--n-docs", type=int, default=600, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--noise", type=float, default=0.2, show_default=True)
@click.pass_context
def make_synthetic_cmd(ctx, config, output_dir, n_docs, seed, noise):
    """Generate the planted-token corpus and its rate series."""
    _apply_config(ctx, config)
    p = ctx.params
    out = Path(p["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        docs, ffr = synthetic.make_synthetic(
            n_docs=p["n_docs"], seed=p["seed"], noise=p["noise"]
        )
        save_corpus(docs, out / "corpus.json")
        save_ffr_series(ffr, out / "ffr.json")
    except (FedNlpError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(f"wrote {out / 'corpus.json'} ({len(docs)} documents) and {out / 'ffr.json'}")


@cli.command("train")
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), required=True)
@click.option("--output-dir", type=click.Path(file_okay=False), required=True)
@click.option("--n-rounds", type=int, default=100, show_default=True)
@click.option("--learning-rate", type=float, default=0.1, show_default=True)
@click.option("--max-depth", type=int, default=4, show_default=True)
@click.option("--min-leaf-samples", type=int, default=5, show_default=True)
@click.option("--l2-leaf-reg", type=float, default=1.0, show_default=True)
@click.option("--feature-subsample", type=float, default=0.8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--min-df", type=int, default=2, show_default=True)
@click.option("--max-features", type=int, default=20000, show_default=True)
@click.option("--split", type=click.Choice(["chronological", "random"]),
              default="chronological", show_default=True)
@click.option("--test-fraction", type=float, default=0.2, show_default=True)
@click.option("--split-seed", type=int, default=0, show_default=True)
@click.pass_context
def train_cmd(ctx, config, **_):
    """Train the rate-decision model on the non-holdout split."""
    _apply_config(ctx, config)
    p = ctx.params
    out = Path(p["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        docs = load_corpus(p["corpus_path"])
        train_docs, test_docs = _split_docs(
            docs, p["split"], p["test_fraction"], p["split_seed"]
        )
        cfg = classifier.GbdtConfig(
            n_rounds=p["n_rounds"],
            learning_rate=p["learning_rate"],
            max_depth=p["max_depth"],
            min_leaf_samples=p["min_leaf_samples"],
            l2_leaf_reg=p["l2_leaf_reg"],
            feature_subsample=p["feature_subsample"],
            seed=p["seed"],
        )
        model = classifier.train(
            train_docs,
            cfg,
            tfidf_params={"min_df": p["min_df"], "max_features": p["max_features"]},
        )
        classifier.save(model, out / "model.bin")
    except (FedNlpError, OSError, ValueError) as exc:
        _fail(exc)
    report = {
        "n_train": len(train_docs),
        "n_holdout": len(test_docs),
        "vocabulary_size": model.tfidf.dim,
        "rounds": model.config.n_rounds,
        "initial_log_loss": model.train_loss[0],
        "final_log_loss": model.train_loss[-1],
        "model_path": str(out / "model.bin"),
    }
    click.echo(json.dumps(report, indent=1))


@cli.command("evaluate")
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), required=True)
@click.option("--model", "model_path", type=click.Path(), required=True)
@click.option("--output-dir", type=click.Path(file_okay=False), required=True)
@click.option("--split", type=click.Choice(["chronological", "random"]),
              default="chronological", show_default=True)
@click.option("--test-fraction", type=float, default=0.2, show_default=True)
@click.option("--split-seed", type=int, default=0, show_default=True)
@click.pass_context
def evaluate_cmd(ctx, config, **_):
    """Evaluate a trained model on the holdout split."""
    _apply_config(ctx, config)
    p = ctx.params
    out = Path(p["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        docs = load_corpus(p["corpus_path"])
        model = classifier.load(p["model_path"])
        _, test_docs = _split_docs(docs, p["split"], p["test_fraction"], p["split_seed"])
        report = classifier.evaluate(model, test_docs)
    except (FedNlpError, OSError, ValueError) as exc:
        _fail(exc)

    payload = {
        "accuracy": report.accuracy,
        "weighted_f1": report.weighted_f1,
        "per_class": {
            name: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for name, m in report.per_class.items()
        },
        "confusion": [list(row) for row in report.confusion],
        "n_eval": len(test_docs),
    }
    with open(out / "eval.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)

    # The table prints the same repr the JSON carries: one source of truth.
    rows = [["class", "precision", "recall", "f1", "support"]]
    for name, m in report.per_class.items():
        rows.append([name, repr(m.precision), repr(m.recall), repr(m.f1), str(m.support)])
    rows.append([])
    rows.append(["accuracy", repr(report.accuracy)])
    rows.append(["weighted_f1", repr(report.weighted_f1)])
    widths = [
        max(len(r[i]) for r in rows if len(r) > i)
        for i in range(max(len(r) for r in rows))
    ]
    for r in rows:
        click.echo("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(r)).rstrip())
    click.echo(f"eval report written to {out / 'eval.json'}")


@cli.command("topics")
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), required=True)
@click.option("--output-dir", type=click.Path(file_okay=False), required=True)
@click.option("--k", type=int, default=8, show_default=True)
@click.option("--alpha", type=float, default=None, help="Defaults to 50/k.")
@click.option("--beta", type=float, default=0.01, show_default=True)
@click.option("--n-iterations", type=int, default=1000, show_default=True)
@click.option("--burn-in", type=int, default=200, show_default=True)
@click.option("--min-count", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def topics_cmd(ctx, config, **_):
    """Fit the topic model over the corpus."""
    _apply_config(ctx, config)
    p = ctx.params
    out = Path(p["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        docs = load_corpus(p["corpus_path"])
        cfg = topics_mod.LdaConfig(
            k=p["k"],
            alpha=p["alpha"],
            beta=p["beta"],
            n_iterations=p["n_iterations"],
            burn_in=p["burn_in"],
            seed=p["seed"],
        )
        tokenized = [tokenize_document(d) for d in docs]
        model = topics_mod.fit_lda(tokenized, cfg, min_count=p["min_count"])
        service.save_topics(model, out / "topics.json")
    except (FedNlpError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(f"wrote {out / 'topics.json'} (k={model.k}, vocabulary={len(model.vocabulary)})")


@cli.command("ingest")
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), required=True)
@click.option("--output-dir", type=click.Path(file_okay=False), required=True)
@click.option("--ffr", "ffr_path", type=click.Path(), default=None)
@click.option("--model", "model_path", type=click.Path(), default=None)
@click.option("--lexicon-generic", type=click.Path(), default=None)
@click.option("--lexicon-financial", type=click.Path(), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def ingest_cmd(ctx, config, **_):
    """Build the document store with precomputed per-document analytics."""
    _apply_config(ctx, config)
    p = ctx.params
    out = Path(p["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        docs = load_corpus(p["corpus_path"])
        ffr = None if p["ffr_path"] is None else load_ffr_series(p["ffr_path"])
        model = None if p["model_path"] is None else classifier.load(p["model_path"])
        generic = (
            default_generic_lexicon()
            if p["lexicon_generic"] is None
            else load_lexicon(p["lexicon_generic"], "generic")
        )
        financial = (
            default_financial_lexicon()
            if p["lexicon_financial"] is None
            else load_lexicon(p["lexicon_financial"], "financial")
        )
        precomputed = {
            d.id: service.precompute_document(d, generic, financial, model, p["seed"])
            for d in docs
        }
        service.save_store(docs, precomputed, ffr, out / "store.json")
    except (FedNlpError, OSError, ValueError) as exc:
        _fail(exc)
    if p["model_path"] is None:
        click.echo("note: no --model given; predictions and explanations omitted", err=True)
    click.echo(f"wrote {out / 'store.json'} ({len(docs)} documents)")


@cli.command("serve")
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), required=True,
              help="Ingested store.json (or a raw corpus array).")
@click.option("--model", "model_path", type=click.Path(), default=None)
@click.option("--topics", "topics_path", type=click.Path(), default=None)
@click.option("--ffr", "ffr_path", type=click.Path(), default=None)
@click.option("--lexicon-generic", type=click.Path(), default=None)
@click.option("--lexicon-financial", type=click.Path(), default=None)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--static", "static_dir", type=click.Path(file_okay=False), default=None,
              help="Directory of built web assets to serve at /.")
@click.pass_context
def serve_cmd(ctx, config, **_):
    """Run the HTTP service."""
    _apply_config(ctx, config)
    p = ctx.params
    try:
        service.serve(
            p["corpus_path"],
            model_path=p["model_path"],
            topics_path=p["topics_path"],
            lexicon_generic=p["lexicon_generic"],
            lexicon_financial=p["lexicon_financial"],
            ffr_path=p["ffr_path"],
            seed=p["seed"],
            port=p["port"],
            static_dir=p["static_dir"],
        )
    except (FedNlpError, OSError, ValueError) as exc:
        _fail(exc)


@cli.command("analyze")
@config_option
@click.option("--text", default=None, help="Text to analyze (or use --file).")
@click.option("--file", "file_path", type=click.Path(), default=None)
@click.option("--tasks", default="stats,sentiment,summary", show_default=True,
              help="Comma-separated subset of: " + ",".join(service.TASKS))
@click.option("--model", "model_path", type=click.Path(), default=None)
@click.option("--topics", "topics_path", type=click.Path(), default=None)
@click.option("--lexicon-generic", type=click.Path(), default=None)
@click.option("--lexicon-financial", type=click.Path(), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def analyze_cmd(ctx, config, **_):
    """Run analysis tasks on one text and print the JSON response."""
    _apply_config(ctx, config)
    p = ctx.params
    if (p["text"] is None) == (p["file_path"] is None):
        raise click.ClickException("pass exactly one of --text or --file")
    try:
        text = (
            p["text"]
            if p["text"] is not None
            else Path(p["file_path"]).read_text(encoding="utf-8")
        )
        model = None if p["model_path"] is None else classifier.load(p["model_path"])
        topic_model = (
            None if p["topics_path"] is None else service.load_topics(p["topics_path"])
        )
        generic = (
            default_generic_lexicon()
            if p["lexicon_generic"] is None
            else load_lexicon(p["lexicon_generic"], "generic")
        )
        financial = (
            default_financial_lexicon()
            if p["lexicon_financial"] is None
            else load_lexicon(p["lexicon_financial"], "financial")
        )
    except (FedNlpError, OSError, ValueError) as exc:
        _fail(exc)
    engine = service.Engine(
        documents=(),
        by_id={},
        tokenized={},
        generic_lexicon=generic,
        financial_lexicon=financial,
        model=model,
        topic_model=topic_model,
        ffr=None,
        precomputed={},
        seed=p["seed"],
    )
    tasks = [t.strip() for t in p["tasks"].split(",") if t.strip()]
    status, payload = service.handle_analyze(engine, {"text": text, "tasks": tasks})
    if status != 200:
        raise click.ClickException(payload.get("error", f"analyze failed ({status})"))
    click.echo(json.dumps(payload, indent=1))


def main():
    try:
        cli(prog_name="fednlp")
    except FedNlpError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
