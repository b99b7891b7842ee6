import json

import pytest

from repairbench.harness import (
    ExperimentPlan,
    ResultsStore,
    render_report,
    run_plan,
    token_summary,
)
from repairbench.llm import SamplingParams
from repairbench.metrics import MetricsReport
from repairbench.strategies import parse_strategy

PROVIDER = "replay:minibench"


def _plan(run_id, strategies=("cref",), k=2, **over):
    return ExperimentPlan(
        run_id=run_id,
        strategies=[parse_strategy(s) for s in strategies],
        providers=[PROVIDER],
        k=k,
        **over,
    )


def test_plan_round_trip():
    plan = _plan("r1", strategies=("baseline", "tsf"), k=3, tiers=[1, 5])
    again = ExperimentPlan.from_dict(json.loads(json.dumps(plan.to_dict())))
    assert again.to_dict() == plan.to_dict()
    assert [s.label for s in again.strategies] == ["baseline", "augmented[T&S&F]"]


def test_plan_validation():
    with pytest.raises(ValueError):
        _plan("r", k=0)
    with pytest.raises(ValueError):
        _plan("r", parallelism=0)


def test_store_layout(tmp_path):
    store = ResultsStore(tmp_path)
    path = store.attempt_path("run", PROVIDER, "s1", "cref", 3)
    assert path == tmp_path / "run" / PROVIDER / "s1" / "cref" / "3.json"


def test_run_plan_and_resume(tmp_path, corpus, sandbox, registry):
    store = ResultsStore(tmp_path)
    plan = _plan("resume-run", k=2, tiers=[1])
    report = run_plan(plan, corpus, sandbox, registry, store)
    [group] = report.groups
    files = sorted(p for p in store.run_dir("resume-run").rglob("*.json"))
    # 2 submissions x 1 strategy x 2 trials + manifest
    assert len(files) == 5
    stamps = {p: p.stat().st_mtime_ns for p in files if p.name != "manifest.json"}

    # a second run must be a no-op on attempt files (resume, not re-run)
    report2 = run_plan(plan, corpus, sandbox, registry, store)
    for p, stamp in stamps.items():
        assert p.stat().st_mtime_ns == stamp
    assert render_report(report2) == render_report(report)


def test_run_plan_partial_resume_completes_grid(tmp_path, corpus, sandbox, registry):
    store = ResultsStore(tmp_path)
    plan = _plan("partial-run", k=2, tiers=[1])
    run_plan(plan, corpus, sandbox, registry, store)
    # delete one attempt; resume must regenerate exactly that file
    victim = store.attempt_path("partial-run", PROVIDER, "s1", "cref", 2)
    original = victim.read_text()
    victim.unlink()
    run_plan(plan, corpus, sandbox, registry, store)
    assert victim.exists()
    regenerated = json.loads(victim.read_text())
    assert regenerated["submission_id"] == "s1"
    assert regenerated["trial_index"] == 2
    # replay makes the attempt content-identical apart from wall-clock fields
    old = json.loads(original)
    for doc in (old, regenerated):
        doc.pop("wall_time_ms", None)
        for stage in doc["stages"]:
            stage.pop("session_id", None)
            for test in (stage.get("run_report") or {}).get("per_test", []):
                test.pop("wall_time_ms", None)
                test.pop("peak_memory_kb", None)
    assert regenerated == old


def test_run_plan_parallel_matches_serial(tmp_path, corpus, sandbox, registry):
    serial = ResultsStore(tmp_path / "serial")
    parallel = ResultsStore(tmp_path / "parallel")
    plan_s = _plan("par-run", k=2, tiers=[1])
    plan_p = _plan("par-run", k=2, tiers=[1], parallelism=4)
    rep_s = run_plan(plan_s, corpus, sandbox, registry, serial)
    rep_p = run_plan(plan_p, corpus, sandbox, registry, parallel)
    assert render_report(rep_s) == render_report(rep_p)


def test_manifest_checksum(tmp_path, corpus, sandbox, registry):
    store = ResultsStore(tmp_path)
    plan = _plan("m-run", k=1, tiers=[1])
    run_plan(plan, corpus, sandbox, registry, store)
    manifest = store.load_manifest("m-run")
    assert manifest["run_id"] == "m-run"
    assert len(manifest["plan_checksum"]) == 64


def test_render_report_formats(tmp_path, corpus, sandbox, registry):
    store = ResultsStore(tmp_path)
    plan = _plan("fmt-run", strategies=("baseline", "cref"), k=1, tiers=[1])
    report = run_plan(plan, corpus, sandbox, registry, store)

    md = render_report(report, "markdown")
    assert md.splitlines()[0] == "| Model | Strategy | TOP-1 | AVG-1 | RPSR |"
    assert "| T1 |" in md
    assert "/" in md  # baseline has no successes -> RPSR placeholder

    csv_text = render_report(report, "csv")
    assert csv_text.splitlines()[0] == "Model,Strategy,TOP-1,AVG-1,RPSR"

    doc = json.loads(render_report(report, "json"))
    assert doc["k"] == 1
    assert {g["strategy"] for g in doc["groups"]} == {"baseline", "cref"}

    with pytest.raises(ValueError):
        render_report(report, "pdf")


def test_render_report_deterministic(tmp_path, corpus, sandbox, registry):
    store = ResultsStore(tmp_path)
    plan = _plan("det-run", k=1, tiers=[1])
    report = run_plan(plan, corpus, sandbox, registry, store)
    assert render_report(report) == render_report(report)


def test_render_report_empty_raises():
    with pytest.raises(ValueError, match="no attempts"):
        render_report(MetricsReport(k=5))


def test_token_summary(tmp_path, corpus, sandbox, registry):
    store = ResultsStore(tmp_path)
    plan = _plan("tok-run", strategies=("tsf",), k=1, tiers=[1])
    run_plan(plan, corpus, sandbox, registry, store)
    summary = token_summary(store, "tok-run")
    stats = summary["augmented[T&S&F]"]
    assert stats["attempts"] == 2
    assert stats["mean_prompt_tokens"] > 0
    assert set(stats["mean_entry_tokens"]) == {"T", "S", "F"}
    with pytest.raises(ValueError):
        token_summary(store, "no-such-run")
