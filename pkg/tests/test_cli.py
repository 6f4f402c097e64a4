import json

import pytest
from click.testing import CliRunner

from duanzai.cli import main

TEMPLATES = "今天{PUN}了\n我真是{PUN}啊\n这也太{PUN}了吧\n"
PAIRS = "蓝瘦香菇\t难受想哭\n鸭梨\t压力\n杯具\t悲剧\n水饺\t睡觉\n"
LM_CORPUS = "难受想哭\n压力\n悲剧\n睡觉\n今天好累\n"
SCORES = ("rater_id,instance_id,approach,score\n"
          "r1,i1,zero_shot,39.3\nr1,i1,clue_provided,53.1\nr1,i1,five_shot,51.0\n")


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """gen-corpus -> train -> train-lm artifacts shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    (root / "templates.txt").write_text(TEMPLATES, encoding="utf-8")
    (root / "pairs.tsv").write_text(PAIRS, encoding="utf-8")
    (root / "lm_corpus.txt").write_text(LM_CORPUS, encoding="utf-8")
    (root / "scores.csv").write_text(SCORES, encoding="utf-8")
    runner = CliRunner()

    result = runner.invoke(main, [
        "gen-corpus", "--templates", str(root / "templates.txt"),
        "--pairs", str(root / "pairs.tsv"), "--seed", "3",
        "--out", str(root / "corpus.jsonl")])
    assert result.exit_code == 0, result.output

    result = runner.invoke(main, [
        "train", "--corpus", str(root / "corpus.jsonl"),
        "--out", str(root / "model.json"), "--iters", "60"])
    assert result.exit_code == 0, result.output

    result = runner.invoke(main, [
        "train-lm", "--corpus", str(root / "lm_corpus.txt"),
        "--k", "0.1", "--out", str(root / "lm.json")])
    assert result.exit_code == 0, result.output
    return root


def test_gen_corpus_contents(workspace):
    lines = (workspace / "corpus.jsonl").read_text().splitlines()
    assert len(lines) == 12
    first = json.loads(lines[0])
    assert {"id", "text", "punchline", "original"} <= set(first)


def test_tag_finds_fixture_span(workspace):
    runner = CliRunner()
    result = runner.invoke(main, [
        "tag", "--model", str(workspace / "model.json"),
        "--text", "今天蓝瘦香菇了"])
    assert result.exit_code == 0, result.output
    body = json.loads(result.output)
    assert body["spans"] == [{"start": 2, "end": 6, "surface": "蓝瘦香菇"}]
    assert body["tags"] == ["O", "O", "B", "I", "I", "I", "O"]


def test_eval_with_report_dir(workspace, tmp_path):
    runner = CliRunner()
    report_dir = tmp_path / "report"
    result = runner.invoke(main, [
        "eval", "--model", str(workspace / "model.json"),
        "--corpus", str(workspace / "corpus.jsonl"),
        "--trace", str(tmp_path / "trace.jsonl"),
        "--report-dir", str(report_dir)])
    assert result.exit_code == 0, result.output
    assert "1.00" in result.output
    assert (report_dir / "report.tsv").exists()
    assert (report_dir / "report.png").exists()
    trace_lines = (tmp_path / "trace.jsonl").read_text().splitlines()
    assert len(trace_lines) == 12


def test_analyze_prints_candidates(workspace):
    runner = CliRunner()
    result = runner.invoke(main, [
        "analyze", "--lm", str(workspace / "lm.json"), "--text", "水饺"])
    assert result.exit_code == 0, result.output
    candidates = json.loads(result.output)
    assert candidates[0]["hanzi"] == "睡觉"
    assert {"total_score", "lm_logprob", "phonetic_distance"} <= set(candidates[0])


def test_scores_report(workspace, tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, [
        "scores", "--records", str(workspace / "scores.csv"),
        "--report-dir", str(tmp_path / "sc")])
    assert result.exit_code == 0, result.output
    assert "clue_provided | 53.1" in result.output
    assert (tmp_path / "sc" / "scores.png").exists()


def test_train_is_deterministic_on_disk(workspace, tmp_path):
    runner = CliRunner()
    out = tmp_path / "model2.json"
    result = runner.invoke(main, [
        "train", "--corpus", str(workspace / "corpus.jsonl"),
        "--out", str(out), "--iters", "60"])
    assert result.exit_code == 0, result.output
    assert out.read_bytes() == (workspace / "model.json").read_bytes()


def test_serve_requires_valid_config(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, ["serve", "--config", str(tmp_path / "nope.json")])
    assert result.exit_code != 0
