"""Benchmark corpus: problems, test cases and student submissions.

On-disk layout (one directory per problem):

    <problem_id>/
        manifest.json        title, tier, category, limits, file names
        statement.md
        solution.md
        tests/<NN>.in + <NN>.out
        submissions/<sub_id>/
            code.cpp         the incorrect code
            guidance.md      tutor guidance
            corrected.cpp    ground-truth fix

A single `corpus.json` bundle can be exported/re-ingested losslessly.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field, asdict
from pathlib import Path

__all__ = [
    "Problem",
    "TestCase",
    "Submission",
    "Corpus",
    "CorpusError",
    "ValidationReport",
    "normalize_for_dedup",
    "ingest",
    "load_bundle",
    "export_bundle",
    "validate_corpus",
    "filter_corpus",
]

MIN_TIER = 1
MAX_TIER = 12

_WS = re.compile(r"\s+")


class CorpusError(Exception):
    """Raised on malformed corpus input; message carries file context."""


@dataclass(frozen=True)
class TestCase:
    index: int
    input_text: str
    expected_output_text: str


@dataclass(frozen=True)
class Problem:
    id: str
    title: str
    statement: str
    input_format: str
    output_format: str
    time_limit_ms: int
    memory_limit_kb: int
    tier: int
    category: str
    solution_description: str
    test_cases: tuple[TestCase, ...]

    def __post_init__(self):
        if not MIN_TIER <= self.tier <= MAX_TIER:
            raise CorpusError(f"problem {self.id}: tier out of range (got {self.tier})")
        if self.time_limit_ms <= 0 or self.memory_limit_kb <= 0:
            raise CorpusError(f"problem {self.id}: limits must be positive")
        if not self.test_cases:
            raise CorpusError(f"problem {self.id}: no test cases")
        indices = [t.index for t in self.test_cases]
        if indices != list(range(1, len(indices) + 1)):
            raise CorpusError(
                f"problem {self.id}: test indices not contiguous from 1: {indices}"
            )


@dataclass(frozen=True)
class Submission:
    id: str
    problem_id: str
    student_id: str
    incorrect_code: str
    tutor_guidance: str
    corrected_code: str

    def __post_init__(self):
        if not self.tutor_guidance.strip():
            raise CorpusError(f"submission {self.id}: tutor guidance is empty")


def normalize_for_dedup(code: str) -> str:
    """Strip every whitespace character; dedup compares the results byte-wise."""
    return _WS.sub("", code)


@dataclass(frozen=True)
class Corpus:
    problems: tuple[Problem, ...]
    submissions: tuple[Submission, ...]

    def problem(self, problem_id: str) -> Problem:
        for p in self.problems:
            if p.id == problem_id:
                return p
        raise KeyError(problem_id)

    def submission(self, submission_id: str) -> Submission:
        for s in self.submissions:
            if s.id == submission_id:
                return s
        raise KeyError(submission_id)

    def submissions_for(self, problem_id: str) -> list[Submission]:
        return [s for s in self.submissions if s.problem_id == problem_id]

    def stats(self) -> dict:
        """Corpus-wide report statistics (mean tests per problem, mean guidance words)."""
        n_tests = [len(p.test_cases) for p in self.problems]
        n_words = [len(s.tutor_guidance.split()) for s in self.submissions]
        return {
            "problems": len(self.problems),
            "submissions": len(self.submissions),
            "mean_test_cases": sum(n_tests) / len(n_tests) if n_tests else 0.0,
            "mean_guidance_words": sum(n_words) / len(n_words) if n_words else 0.0,
        }


def _check_cross_refs(problems, submissions):
    ids = {p.id for p in problems}
    seen_sub_ids = set()
    dedup: dict[str, dict[str, str]] = {}
    for s in submissions:
        if s.problem_id not in ids:
            raise CorpusError(f"submission {s.id}: unknown problem {s.problem_id!r}")
        if s.id in seen_sub_ids:
            raise CorpusError(f"duplicate submission id {s.id!r}")
        seen_sub_ids.add(s.id)
        key = normalize_for_dedup(s.incorrect_code)
        prior = dedup.setdefault(s.problem_id, {})
        if key in prior:
            raise CorpusError(
                f"submission {s.id}: duplicate of {prior[key]} after whitespace normalization"
            )
        prior[key] = s.id


_MANIFEST_REQUIRED = ("title", "tier", "category", "time_limit_ms", "memory_limit_kb")


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except FileNotFoundError:
        raise CorpusError(f"{path}: missing file") from None


def _load_problem(pdir: Path) -> Problem:
    manifest_path = pdir / "manifest.json"
    try:
        manifest = json.loads(_read(manifest_path))
    except json.JSONDecodeError as e:
        raise CorpusError(f"{manifest_path}:{e.lineno}: {e.msg}") from None
    for key in _MANIFEST_REQUIRED:
        if key not in manifest:
            raise CorpusError(f"{manifest_path}: missing manifest field {key!r}")

    tests_dir = pdir / "tests"
    cases = []
    for in_path in sorted(tests_dir.glob("*.in")):
        out_path = in_path.with_suffix(".out")
        if not out_path.exists():
            raise CorpusError(f"{in_path}: test input without matching output")
        cases.append(
            TestCase(
                index=len(cases) + 1,
                input_text=in_path.read_text(),
                expected_output_text=out_path.read_text(),
            )
        )
    return Problem(
        id=pdir.name,
        title=manifest["title"],
        statement=_read(pdir / manifest.get("statement", "statement.md")),
        input_format=manifest.get("input_format", ""),
        output_format=manifest.get("output_format", ""),
        time_limit_ms=manifest["time_limit_ms"],
        memory_limit_kb=manifest["memory_limit_kb"],
        tier=manifest["tier"],
        category=manifest["category"],
        solution_description=_read(pdir / manifest.get("solution", "solution.md")),
        test_cases=tuple(cases),
    )


def _load_submissions(pdir: Path) -> list[Submission]:
    subs = []
    subs_dir = pdir / "submissions"
    if not subs_dir.is_dir():
        return subs
    for sdir in sorted(subs_dir.iterdir()):
        if not sdir.is_dir():
            continue
        meta = {}
        meta_path = sdir / "meta.json"
        if meta_path.exists():
            meta = json.loads(meta_path.read_text())
        subs.append(
            Submission(
                id=sdir.name,
                problem_id=pdir.name,
                student_id=meta.get("student_id", ""),
                incorrect_code=_read(sdir / "code.cpp"),
                tutor_guidance=_read(sdir / "guidance.md"),
                corrected_code=_read(sdir / "corrected.cpp"),
            )
        )
    return subs


def ingest(root_path: str | Path) -> Corpus:
    """Load a corpus from a directory tree (one subdirectory per problem)."""
    root = Path(root_path)
    if not root.is_dir():
        raise CorpusError(f"{root}: not a directory")
    problems: list[Problem] = []
    submissions: list[Submission] = []
    for pdir in sorted(root.iterdir()):
        if not pdir.is_dir():
            continue
        problems.append(_load_problem(pdir))
        submissions.extend(_load_submissions(pdir))
    if not problems:
        raise CorpusError(f"{root}: no problem directories found")
    _check_cross_refs(problems, submissions)
    return Corpus(problems=tuple(problems), submissions=tuple(submissions))


def export_bundle(corpus: Corpus, path: str | Path) -> None:
    """Write a single-file `corpus.json` bundle (lossless; re-ingest with load_bundle)."""
    doc = {
        "problems": [asdict(p) for p in corpus.problems],
        "submissions": [asdict(s) for s in corpus.submissions],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True))


def load_bundle(path: str | Path) -> Corpus:
    doc = json.loads(Path(path).read_text())
    problems = tuple(
        Problem(**{**p, "test_cases": tuple(TestCase(**t) for t in p["test_cases"])})
        for p in doc["problems"]
    )
    submissions = tuple(Submission(**s) for s in doc["submissions"])
    _check_cross_refs(problems, submissions)
    return Corpus(problems=problems, submissions=submissions)


@dataclass
class ValidationReport:
    """Ground-truth check: corrected codes that fail their own problem's tests."""

    failures: list[tuple[str, str]] = field(default_factory=list)  # (submission_id, detail)

    @property
    def flagged_submission_ids(self) -> set[str]:
        return {sid for sid, _ in self.failures}

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_corpus(corpus: Corpus, sandbox) -> ValidationReport:
    """Run every corrected_code through the sandbox; flag ground-truth failures.

    Flagged submissions stay in the corpus but are excluded from RPSR
    aggregation downstream.
    """
    report = ValidationReport()
    for sub in corpus.submissions:
        problem = corpus.problem(sub.problem_id)
        run = sandbox.run_all(sub.corrected_code, problem)
        if not run.passed_all:
            worst = run.per_test[0]
            for entry in run.per_test:
                if entry.verdict.name != "Accepted":
                    worst = entry
                    break
            report.failures.append(
                (sub.id, f"test {worst.test_index}: {worst.verdict.name}")
            )
    return report


def filter_corpus(
    corpus: Corpus,
    tiers: set[int] | None = None,
    problem_ids: set[str] | None = None,
) -> Corpus:
    """Subset selection; an empty result is allowed but warned about."""
    problems = [
        p
        for p in corpus.problems
        if (tiers is None or p.tier in tiers)
        and (problem_ids is None or p.id in problem_ids)
    ]
    kept = {p.id for p in problems}
    submissions = [s for s in corpus.submissions if s.problem_id in kept]
    if not problems:
        warnings.warn("corpus filter produced an empty corpus", stacklevel=2)
    return Corpus(problems=tuple(problems), submissions=tuple(submissions))
