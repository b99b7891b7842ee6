"""Experiment planner/runner: crosses corpus x strategies x providers x k
trials, persists one JSON per attempt, resumes, and emits report tables.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import metrics as metrics_mod
from .llm import SamplingParams
from .metrics import MetricsReport, aggregate
from .strategies import StrategyKind, StrategyRunner, parse_strategy

__all__ = ["ExperimentPlan", "ResultsStore", "run_plan", "render_report", "token_summary"]


@dataclass
class ExperimentPlan:
    run_id: str
    strategies: list[StrategyKind]
    providers: list[str]
    k: int = 5
    params: SamplingParams = field(default_factory=SamplingParams)
    parallelism: int = 1
    seed: int = 0
    tiers: list[int] | None = None
    problem_ids: list[str] | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "strategies": [s.label for s in self.strategies],
            "providers": self.providers,
            "k": self.k,
            "params": {
                "temperature": self.params.temperature,
                "top_p": self.params.top_p,
                "max_tokens": self.params.max_tokens,
            },
            "parallelism": self.parallelism,
            "seed": self.seed,
            "tiers": self.tiers,
            "problem_ids": self.problem_ids,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentPlan":
        return cls(
            run_id=doc["run_id"],
            strategies=[parse_strategy(s) for s in doc["strategies"]],
            providers=list(doc["providers"]),
            k=doc.get("k", 5),
            params=SamplingParams(**doc.get("params", {})),
            parallelism=doc.get("parallelism", 1),
            seed=doc.get("seed", 0),
            tiers=doc.get("tiers"),
            problem_ids=doc.get("problem_ids"),
        )


class ResultsStore:
    """Append-only per-attempt JSON files plus a manifest.

    Layout: <root>/<run_id>/<provider>/<submission>/<strategy>/<trial>.json
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def run_dir(self, run_id: str) -> Path:
        return self.root / run_id

    def attempt_path(self, run_id: str, provider: str, submission: str, strategy: str, trial: int) -> Path:
        return self.run_dir(run_id) / provider / submission / strategy / f"{trial}.json"

    def has_attempt(self, run_id: str, provider: str, submission: str, strategy: str, trial: int) -> bool:
        return self.attempt_path(run_id, provider, submission, strategy, trial).exists()

    def write_attempt(self, run_id: str, attempt) -> None:
        path = self.attempt_path(
            run_id, attempt.provider_id, attempt.submission_id, attempt.strategy, attempt.trial_index
        )
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(attempt.to_dict(), indent=2, sort_keys=True))

    def write_manifest(self, plan: ExperimentPlan) -> None:
        doc = plan.to_dict()
        doc["plan_checksum"] = hashlib.sha256(
            json.dumps(plan.to_dict(), sort_keys=True).encode()
        ).hexdigest()
        path = self.run_dir(plan.run_id) / "manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True))

    def load_manifest(self, run_id: str) -> dict:
        return json.loads((self.run_dir(run_id) / "manifest.json").read_text())

    def load_attempts(self, run_id: str) -> list[dict]:
        docs = []
        for path in sorted(self.run_dir(run_id).rglob("*.json")):
            if path.name == "manifest.json" or path.parent == self.run_dir(run_id):
                continue
            docs.append(json.loads(path.read_text()))
        docs.sort(key=lambda d: (d["provider_id"], d["strategy"], d["submission_id"], d["trial_index"]))
        return docs


def run_plan(
    plan: ExperimentPlan,
    corpus,
    sandbox,
    registry,
    store: ResultsStore,
    excluded_ground_truths: set[str] = frozenset(),
) -> MetricsReport:
    """Execute (or resume) every cell of the plan, then aggregate.

    Completed cells are detected by their attempt files and never re-run, so
    a killed run resumes without re-spending provider tokens.
    """
    from .corpus import filter_corpus

    if plan.tiers or plan.problem_ids:
        corpus = filter_corpus(
            corpus,
            tiers=set(plan.tiers) if plan.tiers else None,
            problem_ids=set(plan.problem_ids) if plan.problem_ids else None,
        )
    store.write_manifest(plan)
    runner = StrategyRunner(corpus, sandbox, registry)

    cells = [
        (provider, submission, strategy, trial)
        for provider in plan.providers
        for submission in corpus.submissions
        for strategy in plan.strategies
        for trial in range(1, plan.k + 1)
    ]
    pending = [
        cell
        for cell in cells
        if not store.has_attempt(plan.run_id, cell[0], cell[1].id, cell[2].label, cell[3])
    ]

    def run_cell(cell):
        provider, submission, strategy, trial = cell
        attempt = runner.run_attempt(submission, strategy, provider, plan.params, trial)
        store.write_attempt(plan.run_id, attempt)

    if plan.parallelism == 1:
        for cell in pending:
            run_cell(cell)
    else:
        with ThreadPoolExecutor(max_workers=plan.parallelism) as pool:
            list(pool.map(run_cell, pending))

    attempts = store.load_attempts(plan.run_id)
    return aggregate(attempts, corpus, plan.k, excluded_ground_truths)


def _fmt_pct(value) -> str:
    return f"{float(value) * 100:.1f}%"


def render_report(report: MetricsReport, fmt: str = "markdown") -> str:
    """Deterministic report text: summary table plus per-tier AVG table."""
    if not report.groups:
        raise ValueError("no attempts")
    k = report.k
    rows = [
        (g.provider_id, g.strategy, _fmt_pct(g.top), _fmt_pct(g.avg), g.rpsr_text())
        for g in report.groups
    ]
    tiers = sorted({t for g in report.groups for t in g.per_tier_avg})
    if fmt == "json":
        return json.dumps(
            {
                "k": k,
                "groups": [
                    {
                        "model": g.provider_id,
                        "strategy": g.strategy,
                        f"top_{k}": float(g.top),
                        f"avg_{k}": float(g.avg),
                        "rpsr": g.mean_rpsr,
                        "per_tier_avg": {f"T{t}": float(v) for t, v in g.per_tier_avg.items()},
                    }
                    for g in report.groups
                ],
            },
            indent=2,
            sort_keys=True,
        )
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["Model", "Strategy", f"TOP-{k}", f"AVG-{k}", "RPSR"])
        writer.writerows(rows)
        writer.writerow([])
        writer.writerow(["Model", "Strategy", *[f"T{t}" for t in tiers]])
        for g in report.groups:
            writer.writerow(
                [g.provider_id, g.strategy]
                + [
                    _fmt_pct(g.per_tier_avg[t]) if t in g.per_tier_avg else metrics_mod.NO_VALUE
                    for t in tiers
                ]
            )
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            f"| Model | Strategy | TOP-{k} | AVG-{k} | RPSR |",
            "| --- | --- | --- | --- | --- |",
        ]
        lines += [f"| {' | '.join(row)} |" for row in rows]
        lines += [
            "",
            f"| Model | Strategy | {' | '.join(f'T{t}' for t in tiers)} |",
            "| --- | --- |" + " --- |" * len(tiers),
        ]
        for g in report.groups:
            cells = [
                _fmt_pct(g.per_tier_avg[t]) if t in g.per_tier_avg else metrics_mod.NO_VALUE
                for t in tiers
            ]
            lines.append(f"| {g.provider_id} | {g.strategy} | {' | '.join(cells)} |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def token_summary(store: ResultsStore, run_id: str) -> dict:
    """Mean prompt/completion tokens per strategy, plus per info-entry kind."""
    attempts = store.load_attempts(run_id)
    if not attempts:
        raise ValueError("no attempts")
    by_strategy: dict[str, list[dict]] = {}
    for attempt in attempts:
        by_strategy.setdefault(attempt["strategy"], []).append(attempt)
    summary = {}
    for strategy, group in sorted(by_strategy.items()):
        entry_kinds: dict[str, list[int]] = {}
        for attempt in group:
            for kind, count in attempt.get("entry_token_counts", {}).items():
                entry_kinds.setdefault(kind, []).append(count)
        summary[strategy] = {
            "attempts": len(group),
            "mean_prompt_tokens": sum(a["prompt_tokens"] for a in group) / len(group),
            "mean_completion_tokens": sum(a["completion_tokens"] for a in group) / len(group),
            "mean_entry_tokens": {
                kind: sum(v) / len(v) for kind, v in sorted(entry_kinds.items())
            },
        }
    return summary
