"""Span-detection metrics (exact match, similar match, entity P/R/F1) and
human-score aggregation, with plain-text report rendering."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import IO

from .corpus import Corpus
from .crf.model import CrfModel, predict_spans
from .pinyin import PinyinLexicon

Span = tuple[int, int]

APPROACHES = ("zero_shot", "clue_provided", "five_shot")

SIMILAR_JACCARD = 0.5


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsReport:
    ema: float
    sma: float
    precision: float
    recall: float
    f1: float
    true_positives: int
    predicted: int
    gold: int
    n_instances: int


def _jaccard(a: Span, b: Span) -> float:
    inter = max(0, min(a[1], b[1]) - max(a[0], b[0]))
    union = (a[1] - a[0]) + (b[1] - b[0]) - inter
    return inter / union if union else 0.0


def span_metrics(predictions: dict[str, list[Span]],
                 golds: dict[str, Span]) -> MetricsReport:
    """Exact match scores the FIRST predicted span; similar match scores the
    best-overlap span (character Jaccard >= 0.5); P/R/F1 are entity-level
    with exact boundaries over all predicted spans."""
    if set(predictions) != set(golds):
        raise MetricsError(
            f"prediction/gold id mismatch: {sorted(set(predictions) ^ set(golds))}")
    n = len(golds)
    exact = similar = tp = n_pred = 0
    for iid, gold in golds.items():
        spans = [tuple(s) for s in predictions[iid]]
        n_pred += len(spans)
        # the single gold span matches at most one prediction; duplicate
        # exact predictions are false positives, keeping recall <= 1
        tp += 1 if tuple(gold) in spans else 0
        if spans and spans[0] == tuple(gold):
            exact += 1
        if spans and max(_jaccard(s, tuple(gold)) for s in spans) >= SIMILAR_JACCARD:
            similar += 1
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n if n else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(
        ema=exact / n if n else 0.0,
        sma=similar / n if n else 0.0,
        precision=precision, recall=recall, f1=f1,
        true_positives=tp, predicted=n_pred, gold=n, n_instances=n,
    )


def run_per_benchmark(model: CrfModel, dataset: Corpus, lexicon: PinyinLexicon,
                      trace: IO[str] | None = None) -> MetricsReport:
    """Predict every instance, score, optionally write a JSONL audit trace."""
    predictions: dict[str, list[Span]] = {}
    golds: dict[str, Span] = {}
    for inst in dataset:
        spans = predict_spans(model, inst.text, lexicon)
        predictions[inst.id] = spans
        golds[inst.id] = inst.span
        if trace is not None:
            trace.write(json.dumps({
                "id": inst.id,
                "text": inst.text,
                "gold": list(inst.span),
                "predicted": [list(s) for s in spans],
            }, ensure_ascii=False) + "\n")
    return span_metrics(predictions, golds)


@dataclass(frozen=True)
class ScoreRecord:
    rater_id: str
    instance_id: str
    approach: str
    score: float

    def __post_init__(self):
        if self.approach not in APPROACHES:
            raise MetricsError(
                f"record ({self.rater_id}, {self.instance_id}): unknown "
                f"approach {self.approach!r}")
        if not 0 <= self.score <= 100:
            raise MetricsError(
                f"record ({self.rater_id}, {self.instance_id}): score "
                f"{self.score} outside [0, 100]")


def load_score_records(stream: IO[str]) -> list[ScoreRecord]:
    """CSV columns: rater_id,instance_id,approach,score (header optional)."""
    records = []
    for row in csv.reader(stream):
        if not row or row[0].strip() == "rater_id":
            continue
        if len(row) != 4:
            raise MetricsError(f"bad score row: {row}")
        records.append(ScoreRecord(row[0].strip(), row[1].strip(),
                                   row[2].strip(), float(row[3])))
    return records


def aggregate_scores(records: list[ScoreRecord]) -> dict[str, tuple[float, int]]:
    """Arithmetic mean and count per approach, in fixed approach order."""
    sums: dict[str, list[float]] = {}
    for rec in records:
        sums.setdefault(rec.approach, []).append(rec.score)
    return {
        approach: (sum(vals) / len(vals), len(vals))
        for approach, vals in sorted(
            sums.items(), key=lambda kv: APPROACHES.index(kv[0]))
    }


def render_report(rows: list[tuple[str, MetricsReport | float]]) -> str:
    """Markdown-style table; metric rows show EMA/SMA to 2 decimals,
    plain score rows to 1 decimal."""
    any_metrics = any(isinstance(v, MetricsReport) for _, v in rows)
    any_scores = any(not isinstance(v, MetricsReport) for _, v in rows)
    if any_scores and not any_metrics:
        lines = ["Approach | Score (100)", "--- | ---"]
    else:
        lines = ["Model | EMA | SMA", "--- | --- | ---"]
    for label, value in rows:
        if isinstance(value, MetricsReport):
            lines.append(f"{label} | {value.ema:.2f} | {value.sma:.2f}")
        else:
            lines.append(f"{label} | {value:.1f}")
    return "\n".join(lines) + "\n"


def render_full_report(report: MetricsReport, label: str = "model") -> str:
    """One-row detail table with all five metrics and the raw counts."""
    lines = [
        "Model | EMA | SMA | P | R | F1",
        "--- | --- | --- | --- | --- | ---",
        (f"{label} | {report.ema:.2f} | {report.sma:.2f} | "
         f"{report.precision:.3f} | {report.recall:.3f} | {report.f1:.3f}"),
        "",
        (f"counts: tp={report.true_positives} predicted={report.predicted} "
         f"gold={report.gold} instances={report.n_instances}"),
    ]
    return "\n".join(lines) + "\n"
