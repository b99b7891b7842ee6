import json

import pytest
from click.testing import CliRunner

from repairbench.cli import main

from .conftest import FIXTURES

CORPUS = str(FIXTURES / "corpus")
PROVIDERS = str(FIXTURES / "providers.json")


@pytest.fixture
def cli():
    return CliRunner()


def test_ingest_stats(cli):
    result = cli.invoke(main, ["ingest", "--corpus", CORPUS])
    assert result.exit_code == 0
    stats = json.loads(result.output)
    assert stats["problems"] == 3
    assert stats["submissions"] == 6


def test_ingest_writes_bundle(cli, tmp_path):
    out = tmp_path / "corpus.json"
    result = cli.invoke(main, ["ingest", "--corpus", CORPUS, "--out", str(out)])
    assert result.exit_code == 0
    assert out.exists()
    # a bundle is accepted anywhere a corpus directory is
    result = cli.invoke(main, ["ingest", "--corpus", str(out)])
    assert result.exit_code == 0


def test_validate_corpus(cli):
    result = cli.invoke(main, ["validate-corpus", "--corpus", CORPUS])
    assert result.exit_code == 0
    assert "all ground truths pass" in result.output


def test_judge_run(cli, tmp_path, corpus):
    good = tmp_path / "good.cpp"
    good.write_text(corpus.submission("s1").corrected_code)
    result = cli.invoke(main, ["judge-run", "pair-sums", str(good), "--corpus", CORPUS])
    assert result.exit_code == 0
    assert "PASSED" in result.output

    bad = tmp_path / "bad.cpp"
    bad.write_text(corpus.submission("s1").incorrect_code)
    result = cli.invoke(main, ["judge-run", "pair-sums", str(bad), "--corpus", CORPUS])
    assert result.exit_code == 1
    assert "FAILED" in result.output


def test_repair_transcript(cli):
    result = cli.invoke(main, [
        "repair", "s1", "--corpus", CORPUS, "--strategy", "cref",
        "--provider", "replay:minibench", "--provider-config", PROVIDERS,
    ])
    assert result.exit_code == 0
    assert "success=True" in result.output
    assert "--- stage 1" in result.output and "--- stage 2" in result.output


def test_eval_and_report_and_tokens(cli, tmp_path):
    results = str(tmp_path / "results")
    args = [
        "eval", "--corpus", CORPUS, "--strategies", "baseline,cref",
        "--provider", "replay:minibench", "--provider-config", PROVIDERS,
        "--k", "2", "--run-id", "cli-run", "--results", results, "--tiers", "1",
    ]
    result = cli.invoke(main, args)
    assert result.exit_code == 0
    assert "| Model | Strategy | TOP-2 | AVG-2 | RPSR |" in result.output
    run_dir = tmp_path / "results" / "cli-run"
    assert (run_dir / "report.md").exists()
    assert (run_dir / "report.csv").exists()
    assert (run_dir / "report.json").exists()

    result = cli.invoke(main, ["report", "cli-run", "--results", results,
                               "--corpus", CORPUS, "--format", "csv"])
    assert result.exit_code == 0
    assert result.output.startswith("Model,Strategy,TOP-2")

    result = cli.invoke(main, ["tokens", "cli-run", "--results", results])
    assert result.exit_code == 0
    assert "mean_prompt_tokens" in result.output


def test_eval_no_resume_refuses_existing(cli, tmp_path):
    results = str(tmp_path / "results")
    args = [
        "eval", "--corpus", CORPUS, "--strategies", "baseline",
        "--provider", "replay:minibench", "--provider-config", PROVIDERS,
        "--k", "1", "--run-id", "again", "--results", results, "--tiers", "1",
    ]
    assert cli.invoke(main, args).exit_code == 0
    result = cli.invoke(main, args + ["--no-resume"])
    assert result.exit_code != 0
    assert "already exists" in result.output


def test_eval_interrupted_exits_2(cli, tmp_path):
    # an unknown provider id surfaces as a partial-run exit (code 2)
    result = cli.invoke(main, [
        "eval", "--corpus", CORPUS, "--strategies", "baseline",
        "--provider", "replay:nope", "--provider-config", PROVIDERS,
        "--k", "1", "--run-id", "broken", "--results", str(tmp_path / "r"),
    ])
    assert result.exit_code == 2
    assert "resume" in result.output


def test_report_missing_run_errors(cli, tmp_path):
    result = cli.invoke(main, ["report", "ghost", "--results", str(tmp_path),
                               "--corpus", CORPUS])
    assert result.exit_code == 1
    assert "no attempts" in result.output
