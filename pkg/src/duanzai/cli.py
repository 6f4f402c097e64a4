"""Command-line entry points for corpus generation, training, tagging,
retrieval, evaluation and the chat service."""

from __future__ import annotations

import json
import sys

import click

from .corpus import generate_synthetic, load_pairs, load_templates, parse_instances, serialize_instances
from .crf import TrainConfig, featurize, load_model, predict_spans, save_model, train, viterbi_decode
from .fuzzy import FuzzyCostTable
from .metrics import aggregate_scores, load_score_records, render_full_report, render_report, run_per_benchmark
from .pinyin import default_inventory, default_lexicon, load_lexicon
from .retrieval import RetrievalConfig, load_lm, retrieve_original, save_lm, train_bigram_lm
from .service import serve as run_service


def _lexicon(path: str | None):
    if path is None:
        return default_lexicon()
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh, default_inventory())


@click.group()
def main():
    """Chinese homophonic-pun analysis toolkit."""


@main.command("gen-corpus")
@click.option("--templates", "templates_path", required=True, type=click.Path(exists=True))
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def gen_corpus(templates_path, pairs_path, seed, out_path):
    """Generate a synthetic annotated corpus (templates x pun pairs)."""
    with open(templates_path, encoding="utf-8") as fh:
        templates = load_templates(fh)
    with open(pairs_path, encoding="utf-8") as fh:
        pairs = load_pairs(fh)
    corpus = generate_synthetic(templates, pairs, seed)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instances(corpus))
    click.echo(f"wrote {len(corpus)} instances to {out_path}")


@main.command("train")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--l2", "l2_lambda", default=0.1, show_default=True, type=float)
@click.option("--iters", default=100, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True))
def train_cmd(corpus_path, out_path, l2_lambda, iters, seed, lexicon_path):
    """Train the punchline tagger on a JSONL corpus."""
    lexicon = _lexicon(lexicon_path)
    with open(corpus_path, encoding="utf-8") as fh:
        corpus = parse_instances(fh)
    config = TrainConfig(l2_lambda=l2_lambda, max_iterations=iters, seed=seed)
    model = train(corpus, lexicon, config)
    with open(out_path, "w", encoding="utf-8") as fh:
        save_model(model, fh)
    click.echo(f"trained on {len(corpus)} instances "
               f"({model.trained_on['iterations']} iterations), "
               f"model written to {out_path}")


@main.command("tag")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--text", required=True)
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True))
def tag(model_path, text, lexicon_path):
    """Tag one sentence; prints the label sequence and extracted spans."""
    lexicon = _lexicon(lexicon_path)
    with open(model_path, encoding="utf-8") as fh:
        model = load_model(fh)
    labels = viterbi_decode(model, featurize(text, lexicon))
    spans = predict_spans(model, text, lexicon)
    click.echo(json.dumps({
        "text": text,
        "tags": labels,
        "spans": [{"start": s, "end": e, "surface": text[s:e]} for s, e in spans],
    }, ensure_ascii=False))


@main.command("train-lm")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True),
              help="Text file, one sentence per line; non-hanzi characters are dropped.")
@click.option("--k", "smoothing_k", default=0.1, show_default=True, type=float)
@click.option("--out", "out_path", required=True, type=click.Path())
def train_lm_cmd(corpus_path, smoothing_k, out_path):
    """Train the character bigram language model."""
    from .pinyin import is_hanzi
    texts = []
    with open(corpus_path, encoding="utf-8") as fh:
        for line in fh:
            text = "".join(c for c in line if is_hanzi(c))
            if text:
                texts.append(text)
    lm = train_bigram_lm(texts, smoothing_k)
    with open(out_path, "w", encoding="utf-8") as fh:
        save_lm(lm, fh)
    click.echo(f"trained bigram LM on {len(texts)} sentences "
               f"({len(lm.vocab)} hanzi), written to {out_path}")


@main.command("analyze")
@click.option("--lm", "lm_path", required=True, type=click.Path(exists=True))
@click.option("--text", required=True, help="Punchline surface (all hanzi).")
@click.option("--tau", default=1.3, show_default=True, type=float)
@click.option("--beta", default=2.0, show_default=True, type=float)
@click.option("--k", default=5, show_default=True, type=int)
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True))
def analyze_cmd(lm_path, text, tau, beta, k, lexicon_path):
    """Recover original-phrase candidates for a punchline, as JSON."""
    lexicon = _lexicon(lexicon_path)
    with open(lm_path, encoding="utf-8") as fh:
        lm = load_lm(fh)
    candidates = retrieve_original(
        text, lexicon, lm, FuzzyCostTable(),
        RetrievalConfig(tau=tau, beta=beta, k=k))
    click.echo(json.dumps([
        {"hanzi": c.hanzi, "total_score": c.total_score,
         "lm_logprob": c.lm_logprob, "phonetic_distance": c.phonetic_distance}
        for c in candidates
    ], ensure_ascii=False, indent=2))


@main.command("eval")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--trace", "trace_path", default=None, type=click.Path())
@click.option("--report-dir", default=None, type=click.Path(),
              help="Also write report.tsv/report.md/report.png here.")
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True))
def eval_cmd(model_path, corpus_path, trace_path, report_dir, lexicon_path):
    """Evaluate a tagger on an annotated corpus; prints the metric table."""
    lexicon = _lexicon(lexicon_path)
    with open(model_path, encoding="utf-8") as fh:
        model = load_model(fh)
    with open(corpus_path, encoding="utf-8") as fh:
        corpus = parse_instances(fh)
    trace = open(trace_path, "w", encoding="utf-8") if trace_path else None
    try:
        report = run_per_benchmark(model, corpus, lexicon, trace)
    finally:
        if trace:
            trace.close()
    click.echo(render_full_report(report, label=corpus.name), nl=False)
    if report_dir:
        from .reporting import write_metrics_report
        paths = write_metrics_report([(corpus.name, report)], report_dir)
        click.echo(f"report files: {', '.join(str(p) for p in paths.values())}")


@main.command("scores")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True),
              help="CSV: rater_id,instance_id,approach,score")
@click.option("--report-dir", default=None, type=click.Path())
def scores_cmd(records_path, report_dir):
    """Aggregate human evaluation scores per prompting approach."""
    with open(records_path, encoding="utf-8") as fh:
        records = load_score_records(fh)
    summary = aggregate_scores(records)
    rows = [(approach, mean) for approach, (mean, _n) in summary.items()]
    click.echo(render_report(rows), nl=False)
    if report_dir:
        from .reporting import write_scores_report
        paths = write_scores_report(summary, report_dir)
        click.echo(f"report files: {', '.join(str(p) for p in paths.values())}")


@main.command("serve")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve_cmd(config_path, port, host):
    """Run the chat service (HTTP JSON API)."""
    run_service(config_path, port=port, host=host)


if __name__ == "__main__":
    sys.exit(main())
