import io
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from duanzai.crf.model import CrfModel
from duanzai.metrics import (
    MetricsError,
    MetricsReport,
    ScoreRecord,
    aggregate_scores,
    load_score_records,
    render_full_report,
    render_report,
    run_per_benchmark,
    span_metrics,
)


class TestSpanMetrics:
    def test_perfect_predictions(self):
        golds = {f"i{k}": (1, 3) for k in range(4)}
        preds = {k: [v] for k, v in golds.items()}
        rep = span_metrics(preds, golds)
        assert (rep.ema, rep.sma, rep.precision, rep.recall, rep.f1) == (
            1.0, 1.0, 1.0, 1.0, 1.0)

    def test_partial_overlap_counts_sma_not_ema(self):
        # gold (2,6), pred (3,6): intersection 3, union 4, Jaccard 0.75
        rep = span_metrics({"a": [(3, 6)]}, {"a": (2, 6)})
        assert rep.ema == 0.0
        assert rep.sma == 1.0

    def test_low_overlap_counts_neither(self):
        # gold (0,4), pred (3,4): Jaccard 0.25 < 0.5
        rep = span_metrics({"a": [(3, 4)]}, {"a": (0, 4)})
        assert rep.sma == 0.0

    def test_one_exact_one_missing(self):
        rep = span_metrics({"a": [(1, 3)], "b": []},
                           {"a": (1, 3), "b": (0, 2)})
        assert rep.ema == 0.5
        assert rep.sma == 0.5
        assert rep.precision == 1.0
        assert rep.recall == 0.5
        assert rep.f1 == pytest.approx(2 / 3)

    def test_hand_fixture_exact_partial_missing(self):
        """Three instances: exact, overlapping (J>=0.5), no prediction."""
        preds = {"x": [(0, 2)], "y": [(1, 4)], "z": []}
        golds = {"x": (0, 2), "y": (0, 4), "z": (2, 5)}
        rep = span_metrics(preds, golds)
        assert rep.ema == pytest.approx(1 / 3)
        assert rep.sma == pytest.approx(2 / 3)

    def test_ema_uses_first_span_only(self):
        rep = span_metrics({"a": [(0, 1), (1, 3)]}, {"a": (1, 3)})
        assert rep.ema == 0.0  # first span is not the gold one
        assert rep.sma == 1.0
        assert rep.true_positives == 1

    def test_duplicate_exact_predictions_are_false_positives(self):
        rep = span_metrics({"a": [(1, 3), (1, 3)]}, {"a": (1, 3)})
        assert rep.true_positives == 1
        assert rep.predicted == 2
        assert rep.recall == 1.0
        assert rep.precision == 0.5

    def test_id_mismatch(self):
        with pytest.raises(MetricsError, match="mismatch"):
            span_metrics({"a": []}, {"b": (0, 1)})

    def test_empty_inputs(self):
        rep = span_metrics({}, {})
        assert rep.ema == rep.sma == rep.f1 == 0.0


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_fuzzed_metric_identities(data):
    n = data.draw(st.integers(min_value=1, max_value=8))
    golds = {}
    preds = {}
    for i in range(n):
        length = data.draw(st.integers(min_value=1, max_value=12))
        s = data.draw(st.integers(min_value=0, max_value=length - 1))
        e = data.draw(st.integers(min_value=s + 1, max_value=length))
        golds[f"i{i}"] = (s, e)
        spans = []
        for _ in range(data.draw(st.integers(min_value=0, max_value=3))):
            ps = data.draw(st.integers(min_value=0, max_value=length - 1))
            pe = data.draw(st.integers(min_value=ps + 1, max_value=length))
            spans.append((ps, pe))
        preds[f"i{i}"] = spans
    rep = span_metrics(preds, golds)
    assert rep.sma >= rep.ema
    assert 0.0 <= rep.precision <= 1.0
    assert 0.0 <= rep.recall <= 1.0
    assert rep.precision * rep.predicted == pytest.approx(rep.true_positives)
    assert rep.recall * rep.gold == pytest.approx(rep.true_positives)
    if rep.precision + rep.recall:
        assert rep.f1 == pytest.approx(
            2 * rep.precision * rep.recall / (rep.precision + rep.recall))
    else:
        assert rep.f1 == 0.0


def test_permutation_invariance():
    rng = random.Random(3)
    ids = [f"i{k}" for k in range(12)]
    golds = {i: (0, 2) for i in ids}
    preds = {i: ([(0, 2)] if rng.random() < 0.5 else [(1, 2)]) for i in ids}
    rep1 = span_metrics(preds, golds)
    shuffled = list(ids)
    rng.shuffle(shuffled)
    rep2 = span_metrics({i: preds[i] for i in shuffled},
                        {i: golds[i] for i in shuffled})
    assert rep1 == rep2


class TestBenchmark:
    def test_trained_model_on_train_split(self, trained_model, train_corpus, lexicon):
        trace = io.StringIO()
        rep = run_per_benchmark(trained_model, train_corpus, lexicon, trace)
        assert rep.ema == 1.0
        assert rep.sma == 1.0
        lines = [json.loads(l) for l in trace.getvalue().splitlines()]
        assert len(lines) == len(train_corpus)
        assert all({"id", "gold", "predicted"} <= set(l) for l in lines)

    def test_zero_weight_model_degenerates_gracefully(self, train_corpus, lexicon):
        model = CrfModel.zeros(["BIAS"])
        rep = run_per_benchmark(model, train_corpus, lexicon)
        # all-B tagging: one full-sentence span per instance
        assert rep.predicted == len(train_corpus)
        assert rep.ema == 0.0
        assert 0.0 <= rep.sma <= 1.0


class TestScores:
    def test_mean_of_two(self):
        records = [ScoreRecord("r1", "i1", "zero_shot", 30),
                   ScoreRecord("r2", "i1", "zero_shot", 50)]
        assert aggregate_scores(records) == {"zero_shot": (40.0, 2)}

    def test_empty(self):
        assert aggregate_scores([]) == {}

    def test_out_of_range_rejected(self):
        with pytest.raises(MetricsError, match="score"):
            ScoreRecord("r", "i", "zero_shot", 101)

    def test_unknown_approach_rejected(self):
        with pytest.raises(MetricsError, match="approach"):
            ScoreRecord("r", "i", "ten_shot", 10)

    def test_csv_loading(self):
        csv_text = ("rater_id,instance_id,approach,score\n"
                    "r1,i1,zero_shot,39.3\n"
                    "r1,i1,clue_provided,53.1\n"
                    "r1,i1,five_shot,51.0\n")
        records = load_score_records(io.StringIO(csv_text))
        assert len(records) == 3
        summary = aggregate_scores(records)
        assert list(summary) == ["zero_shot", "clue_provided", "five_shot"]
        assert summary["clue_provided"] == (53.1, 1)

    def test_bad_row_rejected(self):
        with pytest.raises(MetricsError):
            load_score_records(io.StringIO("a,b,c\n"))


class TestRenderReport:
    def test_metrics_row_two_decimals(self):
        rep = MetricsReport(ema=0.97, sma=0.98, precision=1, recall=1, f1=1,
                            true_positives=1, predicted=1, gold=1, n_instances=1)
        out = render_report([("Ours", rep)])
        assert "Ours | 0.97 | 0.98" in out
        assert out.splitlines()[0] == "Model | EMA | SMA"

    def test_score_row_one_decimal(self):
        out = render_report([("GPT3.5(0-Shot)", 39.3)])
        assert "GPT3.5(0-Shot) | 39.3" in out
        assert out.splitlines()[0] == "Approach | Score (100)"

    def test_empty_rows_header_only(self):
        out = render_report([])
        assert out.splitlines() == ["Model | EMA | SMA", "--- | --- | ---"]

    def test_full_report_includes_counts(self):
        rep = MetricsReport(ema=1, sma=1, precision=1, recall=1, f1=1,
                            true_positives=7, predicted=7, gold=7, n_instances=7)
        out = render_full_report(rep, "fixture")
        assert "tp=7" in out
        assert "fixture | 1.00 | 1.00" in out
