"""The four repair procedures: Baseline, Augmented(info), MultiRegenerate,
and the single-session conversational repair (Cref).

Every procedure produces one AttemptRecord per trial. A stage passes only if
code was extracted, compiled, and passed every test (the sandbox is the
validation gate); attempts exit early at the first passing stage.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from . import prompting
from .llm import ContextLengthError, ProviderError, ProviderRegistry, SamplingParams
from .prompting import (
    FAILING_TESTS,
    SOLUTION_DESCRIPTION,
    TASK_SENTENCE,
    TUTOR_GUIDANCE,
    InfoSet,
)

__all__ = [
    "StrategyKind",
    "StageRecord",
    "AttemptRecord",
    "StrategyRunner",
    "STRATEGY_NAMES",
    "parse_strategy",
]

@dataclass(frozen=True)
class StrategyKind:
    name: str  # baseline | augmented | multiregen | cref
    info: InfoSet | None = None

    def __post_init__(self):
        if self.name == "augmented" and not self.info:
            raise ValueError("augmented strategy needs a non-empty info set")

    @property
    def label(self) -> str:
        if self.name == "augmented":
            return f"augmented[{self.info.label()}]"
        return self.name


STRATEGY_NAMES = ("baseline", "augmented", "multiregen", "cref")


def parse_strategy(text: str) -> StrategyKind:
    """CLI shorthand: baseline | tsf | t | s&f | multiregen | cref ..."""
    text = text.strip().lower()
    if text in ("baseline", "multiregen", "cref"):
        return StrategyKind(text)
    if text.startswith("augmented[") and text.endswith("]"):
        return StrategyKind("augmented", InfoSet.parse(text[10:-1]))
    # bare info-set shorthand such as "tsf" or "t&s"
    letters = [c for c in text.upper() if c in "TSF"]
    if letters and all(c in "TSF&," for c in text.upper()):
        return StrategyKind("augmented", InfoSet(letters))
    raise ValueError(f"unknown strategy {text!r}")


@dataclass
class StageRecord:
    stage_index: int
    session_id: str
    prompt_entries: list[str]
    response: str
    extracted_code: str | None
    run_report: object | None  # sandbox.RunReport
    passed: bool
    error: str | None = None

    def to_dict(self) -> dict:
        run = None
        if self.run_report is not None:
            run = {
                "passed_all": self.run_report.passed_all,
                "per_test": [
                    {
                        "test_index": t.test_index,
                        "verdict": t.verdict.name,
                        "wall_time_ms": t.wall_time_ms,
                        "peak_memory_kb": t.peak_memory_kb,
                    }
                    for t in self.run_report.per_test
                ],
                "failing_cases": self.run_report.failing_cases,
            }
        return {
            "stage_index": self.stage_index,
            "session_id": self.session_id,
            "prompt_entries": self.prompt_entries,
            "response": self.response,
            "extracted_code": self.extracted_code,
            "run_report": run,
            "passed": self.passed,
            "error": self.error,
        }


@dataclass
class AttemptRecord:
    submission_id: str
    strategy: str  # StrategyKind.label
    provider_id: str
    trial_index: int
    stages: list[StageRecord] = field(default_factory=list)
    succeeded_stage: int | None = None
    prompt_tokens: int = 0
    completion_tokens: int = 0
    wall_time_ms: int = 0
    entry_token_counts: dict = field(default_factory=dict)  # info kind -> tokens

    @property
    def success(self) -> bool:
        return self.succeeded_stage is not None

    @property
    def winning_code(self) -> str | None:
        if self.succeeded_stage is None:
            return None
        return self.stages[self.succeeded_stage - 1].extracted_code

    def to_dict(self) -> dict:
        return {
            "submission_id": self.submission_id,
            "strategy": self.strategy,
            "provider_id": self.provider_id,
            "trial_index": self.trial_index,
            "stages": [s.to_dict() for s in self.stages],
            "succeeded_stage": self.succeeded_stage,
            "success": self.success,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "wall_time_ms": self.wall_time_ms,
            "entry_token_counts": self.entry_token_counts,
        }


class StrategyRunner:
    """Binds a corpus, a sandbox and a provider registry; runs attempts."""

    def __init__(self, corpus, sandbox, registry: ProviderRegistry, stage_listener=None):
        self.corpus = corpus
        self.sandbox = sandbox
        self.registry = registry
        # stage_listener(kind, stage_index, payload) observes stage progress
        # (used by the live console); failures in it must not break a run.
        self.stage_listener = stage_listener
        # deterministic programs: identical (problem, code) pairs get one
        # sandbox run per runner, not one per trial
        self._run_cache: dict[tuple[str, str], object] = {}
        self._cache_lock = threading.Lock()

    def _emit(self, kind: str, stage_index: int, payload: dict) -> None:
        if self.stage_listener is not None:
            try:
                self.stage_listener(kind, stage_index, payload)
            except Exception:
                pass

    # -- shared plumbing ---------------------------------------------------

    def _run_cached(self, code: str, problem):
        key = (problem.id, code)
        with self._cache_lock:
            cached = self._run_cache.get(key)
        if cached is None:
            cached = self.sandbox.run_all(code, problem)
            with self._cache_lock:
                self._run_cache[key] = cached
        return cached

    def _failing_cases(self, code: str, problem) -> list:
        failing = set(self._run_cached(code, problem).failing_cases)
        return [t for t in problem.test_cases if t.index in failing]

    def _validate(self, code: str | None, problem):
        if code is None:
            return None, False
        report = self._run_cached(code, problem)
        return report, report.passed_all

    def _finish(self, attempt: AttemptRecord, started: float) -> AttemptRecord:
        attempt.wall_time_ms = int((time.monotonic() - started) * 1000)
        return attempt

    def _fixture_key(self, submission_id: str, strategy_label: str, trial: int) -> str:
        return f"{submission_id}/{strategy_label}/{trial}"

    def _count_entry_tokens(self, attempt: AttemptRecord, kind: str, text: str) -> None:
        from .llm import estimate_tokens

        attempt.entry_token_counts[kind] = attempt.entry_token_counts.get(kind, 0) + estimate_tokens(text)

    def _single_session_stage(
        self,
        attempt: AttemptRecord,
        session,
        entries: list[str],
        problem,
        stage_index: int,
    ) -> StageRecord:
        """Send bundle entries on one session; only the final entry elicits
        the repair, intermediate entries just gather acknowledgements."""
        self._emit("StageStarted", stage_index, {})
        response = ""
        error = None
        try:
            for entry in entries[:-1]:
                self.registry.send(session, entry)
            response = self.registry.send(session, entries[-1])
        except ContextLengthError as e:
            error = f"context_length: {e}"
        except ProviderError as e:
            error = f"provider: {e}"
        if error is not None:
            stage = StageRecord(stage_index, session.id, entries, response, None, None, False, error)
            self._emit("StageValidated", stage_index, {"passed": False, "error": error})
        else:
            code = prompting.extract_code(response)
            if code is None:
                self._emit("ExtractionFailed", stage_index, {})
            run, passed = self._validate(code, problem)
            stage = StageRecord(stage_index, session.id, entries, response, code, run, passed)
            self._emit(
                "StageValidated",
                stage_index,
                {
                    "passed": passed,
                    "failing_cases": run.failing_cases if run is not None else None,
                },
            )
        attempt.stages.append(stage)
        attempt.prompt_tokens = max(attempt.prompt_tokens, session.total_prompt_tokens)
        attempt.completion_tokens = max(attempt.completion_tokens, session.total_completion_tokens)
        if stage.passed:
            attempt.succeeded_stage = stage_index
        return stage

    # -- strategies --------------------------------------------------------

    def run_baseline(self, submission, provider_id: str, params: SamplingParams, trial: int = 1) -> AttemptRecord:
        started = time.monotonic()
        problem = self.corpus.problem(submission.problem_id)
        strategy = StrategyKind("baseline")
        attempt = AttemptRecord(submission.id, strategy.label, provider_id, trial)
        session = self.registry.open_session(
            provider_id, params, fixture_key=self._fixture_key(submission.id, strategy.label, trial)
        )
        prompt = prompting.render_baseline(problem, submission.incorrect_code)
        self._single_session_stage(attempt, session, [prompt], problem, stage_index=1)
        return self._finish(attempt, started)

    def run_augmented(
        self, submission, info: InfoSet, provider_id: str, params: SamplingParams, trial: int = 1
    ) -> AttemptRecord:
        started = time.monotonic()
        problem = self.corpus.problem(submission.problem_id)
        strategy = StrategyKind("augmented", info)
        attempt = AttemptRecord(submission.id, strategy.label, provider_id, trial)
        payloads = self._payloads(submission, problem, info, attempt)
        bundle = prompting.build_bundle(problem, submission.incorrect_code, info, payloads)
        session = self.registry.open_session(
            provider_id, params, fixture_key=self._fixture_key(submission.id, strategy.label, trial)
        )
        self._single_session_stage(attempt, session, list(bundle.entries), problem, stage_index=1)
        return self._finish(attempt, started)

    def _payloads(self, submission, problem, info: InfoSet, attempt: AttemptRecord) -> dict:
        payloads = {}
        if TUTOR_GUIDANCE in info:
            payloads[TUTOR_GUIDANCE] = submission.tutor_guidance
            self._count_entry_tokens(attempt, TUTOR_GUIDANCE, submission.tutor_guidance)
        if SOLUTION_DESCRIPTION in info:
            payloads[SOLUTION_DESCRIPTION] = problem.solution_description
            self._count_entry_tokens(attempt, SOLUTION_DESCRIPTION, problem.solution_description)
        if FAILING_TESTS in info:
            failing = self._failing_cases(submission.incorrect_code, problem)
            payloads[FAILING_TESTS] = failing
            self._count_entry_tokens(
                attempt, FAILING_TESTS, prompting.render_info_entry(FAILING_TESTS, failing) if failing else ""
            )
        return payloads

    def run_multiregenerate(
        self, submission, provider_id: str, params: SamplingParams, trial: int = 1
    ) -> AttemptRecord:
        """Up to three phases, each a fresh session repairing the ORIGINAL
        incorrect code, with cumulative info: T, then T+S, then T+S+F."""
        started = time.monotonic()
        problem = self.corpus.problem(submission.problem_id)
        strategy = StrategyKind("multiregen")
        attempt = AttemptRecord(submission.id, strategy.label, provider_id, trial)
        phases = [
            InfoSet({TUTOR_GUIDANCE}),
            InfoSet({TUTOR_GUIDANCE, SOLUTION_DESCRIPTION}),
            InfoSet({TUTOR_GUIDANCE, SOLUTION_DESCRIPTION, FAILING_TESTS}),
        ]
        prompt_total = completion_total = 0
        for stage_index, info in enumerate(phases, start=1):
            payloads = self._payloads(submission, problem, info, attempt)
            if FAILING_TESTS in info and not payloads[FAILING_TESTS]:
                info = InfoSet(info - {FAILING_TESTS})
                payloads.pop(FAILING_TESTS)
            bundle = prompting.build_bundle(problem, submission.incorrect_code, info, payloads)
            session = self.registry.open_session(
                provider_id,
                params,
                fixture_key=self._fixture_key(submission.id, strategy.label, trial) + f"#{stage_index}",
            )
            stage = self._single_session_stage(
                attempt, session, list(bundle.entries), problem, stage_index
            )
            prompt_total += session.total_prompt_tokens
            completion_total += session.total_completion_tokens
            if stage.passed:
                break
        attempt.prompt_tokens = prompt_total
        attempt.completion_tokens = completion_total
        return self._finish(attempt, started)

    def run_cref(self, submission, provider_id: str, params: SamplingParams, trial: int = 1) -> AttemptRecord:
        """Single-session three-stage conversational repair.

        Stage 1: context + tutor guidance. Stage 2: solution description on
        retained history. Stage 3: failing cases of the LAST repaired code
        (falling back to the original incorrect code when no code was ever
        extracted), still on retained history.
        """
        started = time.monotonic()
        problem = self.corpus.problem(submission.problem_id)
        strategy = StrategyKind("cref")
        attempt = AttemptRecord(submission.id, strategy.label, provider_id, trial)
        session = self.registry.open_session(
            provider_id, params, fixture_key=self._fixture_key(submission.id, strategy.label, trial)
        )

        # stage 1: combined context + guidance + task, as one entry
        self._count_entry_tokens(attempt, TUTOR_GUIDANCE, submission.tutor_guidance)
        bundle = prompting.build_bundle(
            problem,
            submission.incorrect_code,
            InfoSet({TUTOR_GUIDANCE}),
            {TUTOR_GUIDANCE: submission.tutor_guidance},
        )
        stage = self._single_session_stage(attempt, session, list(bundle.entries), problem, 1)
        if stage.passed:
            return self._finish(attempt, started)

        # stage 2: solution description, history retained
        self._count_entry_tokens(attempt, SOLUTION_DESCRIPTION, problem.solution_description)
        entry = (
            prompting.render_info_entry(SOLUTION_DESCRIPTION, problem.solution_description)
            + "\n"
            + TASK_SENTENCE
        )
        stage = self._single_session_stage(attempt, session, [entry], problem, 2)
        if stage.passed:
            return self._finish(attempt, started)

        # stage 3: failing cases of the last repaired code, history retained
        last_code = submission.incorrect_code
        for prior in attempt.stages:
            if prior.extracted_code is not None:
                last_code = prior.extracted_code
        failing = self._failing_cases(last_code, problem)
        if not failing:
            failing = self._failing_cases(submission.incorrect_code, problem)
        self._count_entry_tokens(
            attempt,
            FAILING_TESTS,
            prompting.render_info_entry(FAILING_TESTS, failing) if failing else "",
        )
        entry = (
            prompting.render_info_entry(FAILING_TESTS, failing) + "\n" + TASK_SENTENCE
        )
        self._single_session_stage(attempt, session, [entry], problem, 3)
        return self._finish(attempt, started)

    # -- entry points ------------------------------------------------------

    def run_attempt(
        self, submission, strategy: StrategyKind, provider_id: str, params: SamplingParams, trial: int = 1
    ) -> AttemptRecord:
        if strategy.name == "baseline":
            return self.run_baseline(submission, provider_id, params, trial)
        if strategy.name == "augmented":
            return self.run_augmented(submission, strategy.info, provider_id, params, trial)
        if strategy.name == "multiregen":
            return self.run_multiregenerate(submission, provider_id, params, trial)
        if strategy.name == "cref":
            return self.run_cref(submission, provider_id, params, trial)
        raise ValueError(f"unknown strategy {strategy.name!r}")

    def run_trials(
        self, submission, strategy: StrategyKind, provider_id: str, params: SamplingParams, k: int = 5
    ) -> list[AttemptRecord]:
        if k < 1:
            raise ValueError("k must be >= 1")
        return [
            self.run_attempt(submission, strategy, provider_id, params, trial)
            for trial in range(1, k + 1)
        ]
