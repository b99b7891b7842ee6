"""Command-line entry point.

Exit codes: 0 success, 2 partial results (resumable), 1 hard error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from .harness import ExperimentPlan, ResultsStore, render_report, run_plan, token_summary
from .llm import ProviderRegistry, SamplingParams
from .sandbox import Sandbox
from .strategies import StrategyRunner, parse_strategy


def _load_corpus(corpus_dir: str):
    path = Path(corpus_dir)
    if path.is_file():
        return corpus_mod.load_bundle(path)
    return corpus_mod.ingest(path)


def _load_registry(provider_config: str | None) -> ProviderRegistry:
    if provider_config is None:
        return ProviderRegistry()
    config_path = Path(provider_config)
    return ProviderRegistry.from_config(
        json.loads(config_path.read_text()), base_dir=config_path.parent
    )


@click.group()
def main():
    """Conversational program-repair benchmark harness."""


@main.command("ingest")
@click.option("--corpus", "corpus_dir", required=True, help="corpus directory")
@click.option("--out", "out_path", default=None, help="write a corpus.json bundle here")
def ingest_cmd(corpus_dir, out_path):
    corpus = _load_corpus(corpus_dir)
    stats = corpus.stats()
    click.echo(json.dumps(stats, indent=2))
    if out_path:
        corpus_mod.export_bundle(corpus, out_path)
        click.echo(f"bundle written to {out_path}")


@main.command("validate-corpus")
@click.option("--corpus", "corpus_dir", required=True)
def validate_cmd(corpus_dir):
    corpus = _load_corpus(corpus_dir)
    report = corpus_mod.validate_corpus(corpus, Sandbox())
    if report.ok:
        click.echo("all ground truths pass")
    else:
        for sid, detail in report.failures:
            click.echo(f"FLAGGED {sid}: {detail}")
        sys.exit(1)


@main.command("judge-run")
@click.argument("problem_id")
@click.argument("source", type=click.Path(exists=True))
@click.option("--corpus", "corpus_dir", required=True)
def judge_run_cmd(problem_id, source, corpus_dir):
    """Ad-hoc sandbox run of SOURCE against PROBLEM_ID's tests."""
    corpus = _load_corpus(corpus_dir)
    problem = corpus.problem(problem_id)
    report = Sandbox().run_all(Path(source).read_text(), problem)
    for entry in report.per_test:
        click.echo(
            f"test {entry.test_index}: {entry.verdict.name} "
            f"({entry.wall_time_ms} ms, {entry.peak_memory_kb} KB)"
        )
    click.echo("PASSED" if report.passed_all else f"FAILED on {report.failing_cases}")
    sys.exit(0 if report.passed_all else 1)


@main.command("repair")
@click.argument("submission_id")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--strategy", default="cref", help="baseline | tsf | multiregen | cref | t&s ...")
@click.option("--provider", required=True)
@click.option("--provider-config", default=None)
@click.option("--trial", default=1, type=int)
def repair_cmd(submission_id, corpus_dir, strategy, provider, provider_config, trial):
    """Run one submission through one strategy and print the transcript."""
    corpus = _load_corpus(corpus_dir)
    registry = _load_registry(provider_config)
    runner = StrategyRunner(corpus, Sandbox(), registry)
    attempt = runner.run_attempt(
        corpus.submission(submission_id), parse_strategy(strategy), provider,
        SamplingParams(), trial,
    )
    for stage in attempt.stages:
        click.echo(f"--- stage {stage.stage_index} (session {stage.session_id}) ---")
        for entry in stage.prompt_entries:
            click.echo(f"[user]\n{entry}")
        click.echo(f"[assistant]\n{stage.response}")
        if stage.run_report is not None:
            click.echo(f"[verdicts] failing: {stage.run_report.failing_cases}")
        click.echo(f"[passed] {stage.passed}")
    click.echo(f"success={attempt.success} succeeded_stage={attempt.succeeded_stage}")
    sys.exit(0 if attempt.success else 1)


@main.command("eval")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--strategies", default="baseline,cref", help="comma-separated strategy names")
@click.option("--provider", "providers", multiple=True, required=True)
@click.option("--provider-config", default=None)
@click.option("--k", default=5, type=int)
@click.option("--jobs", default=1, type=int)
@click.option("--run-id", required=True)
@click.option("--results", "results_dir", default="results")
@click.option("--resume/--no-resume", default=True)
@click.option("--tiers", default=None, help="comma-separated tier numbers")
def eval_cmd(corpus_dir, strategies, providers, provider_config, k, jobs, run_id,
             results_dir, resume, tiers):
    """Run a full experiment plan (resumable)."""
    corpus = _load_corpus(corpus_dir)
    registry = _load_registry(provider_config)
    store = ResultsStore(results_dir)
    if not resume and store.run_dir(run_id).exists():
        raise click.ClickException(f"run {run_id} already exists (use --resume)")
    plan = ExperimentPlan(
        run_id=run_id,
        strategies=[parse_strategy(s) for s in strategies.split(",")],
        providers=list(providers),
        k=k,
        parallelism=jobs,
        tiers=[int(t) for t in tiers.split(",")] if tiers else None,
    )
    try:
        report = run_plan(plan, corpus, Sandbox(), registry, store)
    except Exception as e:
        click.echo(f"run interrupted: {e}", err=True)
        click.echo("partial results preserved; rerun with --resume", err=True)
        sys.exit(2)
    text = render_report(report, "markdown")
    (store.run_dir(run_id) / "report.md").write_text(text)
    (store.run_dir(run_id) / "report.csv").write_text(render_report(report, "csv"))
    (store.run_dir(run_id) / "report.json").write_text(render_report(report, "json"))
    click.echo(text)


@main.command("report")
@click.argument("run_id")
@click.option("--results", "results_dir", default="results")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--format", "fmt", default="markdown", type=click.Choice(["csv", "markdown", "json"]))
def report_cmd(run_id, results_dir, corpus_dir, fmt):
    from .metrics import aggregate

    corpus = _load_corpus(corpus_dir)
    store = ResultsStore(results_dir)
    attempts = store.load_attempts(run_id)
    if not attempts:
        raise click.ClickException("no attempts")
    k = store.load_manifest(run_id)["k"]
    click.echo(render_report(aggregate(attempts, corpus, k), fmt))


@main.command("tokens")
@click.argument("run_id")
@click.option("--results", "results_dir", default="results")
def tokens_cmd(run_id, results_dir):
    click.echo(json.dumps(token_summary(ResultsStore(results_dir), run_id), indent=2))


@main.command("serve")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--provider", required=True)
@click.option("--provider-config", default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--static", "static_dir", default=None, help="frontend asset directory")
@click.option("--store", "store_dir", default="results/console")
def serve_cmd(corpus_dir, provider, provider_config, host, port, static_dir, store_dir):
    """Start the tutor console API (and optionally serve the UI)."""
    import uvicorn

    from .console import SessionHub, create_app

    hub = SessionHub(
        _load_corpus(corpus_dir), Sandbox(), _load_registry(provider_config),
        provider, store_dir=store_dir,
    )
    uvicorn.run(create_app(hub, static_dir=static_dir), host=host, port=port)


if __name__ == "__main__":
    main()
