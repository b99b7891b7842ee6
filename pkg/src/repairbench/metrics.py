"""Repair-quality metrics: TOP-k / AVG-k over outcome matrices and patch
precision (relative patch size and its ratio to the ground-truth patch).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .syntree import SyntaxTree, parse_source, ted

__all__ = [
    "OutcomeMatrix",
    "PatchMeasure",
    "MetricsReport",
    "StrategyMetrics",
    "top_k",
    "avg_k",
    "rps",
    "rpsr",
    "patch_measure",
    "aggregate",
]

NO_VALUE = "/"  # reported where no successful repairs exist


@dataclass(frozen=True)
class OutcomeMatrix:
    """Rows are submissions, columns are trials; cells are success booleans."""

    submission_ids: tuple[str, ...]
    cells: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        if not self.cells:
            raise ValueError("empty outcome matrix")
        k = len(self.cells[0])
        if k < 1 or any(len(row) != k for row in self.cells):
            raise ValueError("outcome matrix must be rectangular with k >= 1")

    @property
    def k(self) -> int:
        return len(self.cells[0])


def top_k(matrix: OutcomeMatrix) -> Fraction:
    """Fraction of submissions with at least one successful trial."""
    return Fraction(sum(1 for row in matrix.cells if any(row)), len(matrix.cells))


def avg_k(matrix: OutcomeMatrix) -> Fraction:
    """Mean success rate over all submissions x trials."""
    return Fraction(
        sum(sum(row) for row in matrix.cells), len(matrix.cells) * matrix.k
    )


def rps(ast_incorrect: SyntaxTree, ast_repaired: SyntaxTree) -> float:
    """Relative patch size: edit distance over the incorrect tree's node count.

    Can exceed 1.0 (e.g. a near-empty repaired program).
    """
    return ted(ast_incorrect, ast_repaired) / ast_incorrect.size


def rpsr(ast_incorrect: SyntaxTree, ast_corrected: SyntaxTree, ast_repaired: SyntaxTree) -> float:
    """Patch size relative to the ground-truth patch; lower is more precise."""
    denom = ted(ast_incorrect, ast_corrected)
    if denom == 0:
        raise ValueError("ground truth equals incorrect code (zero edit distance)")
    return ted(ast_incorrect, ast_repaired) / denom


@dataclass(frozen=True)
class PatchMeasure:
    submission_id: str
    ted_ir: int
    ted_ic: int
    rps: float
    rpsr: float


def patch_measure(submission_id: str, incorrect: str, corrected: str, repaired: str) -> PatchMeasure:
    ast_i = parse_source(incorrect)
    ast_c = parse_source(corrected)
    ast_r = parse_source(repaired)
    ted_ir = ted(ast_i, ast_r)
    ted_ic = ted(ast_i, ast_c)
    if ted_ic == 0:
        raise ValueError("ground truth equals incorrect code (zero edit distance)")
    return PatchMeasure(
        submission_id=submission_id,
        ted_ir=ted_ir,
        ted_ic=ted_ic,
        rps=ted_ir / ast_i.size,
        rpsr=ted_ir / ted_ic,
    )


@dataclass
class StrategyMetrics:
    provider_id: str
    strategy: str
    top: Fraction
    avg: Fraction
    mean_rpsr: float | None  # None when no successful repairs
    per_tier_avg: dict[int, Fraction] = field(default_factory=dict)
    patch_measures: list[PatchMeasure] = field(default_factory=list)

    def rpsr_text(self) -> str:
        return NO_VALUE if self.mean_rpsr is None else f"{self.mean_rpsr:.3f}"


@dataclass
class MetricsReport:
    k: int
    groups: list[StrategyMetrics] = field(default_factory=list)


def _first_success_code(attempts_for_sub: list) -> str | None:
    """Extracted code of the first successful trial (trial order)."""
    for attempt in sorted(attempts_for_sub, key=lambda a: a["trial_index"]):
        if attempt["success"]:
            stage = attempt["stages"][attempt["succeeded_stage"] - 1]
            return stage["extracted_code"]
    return None


def aggregate(
    attempts: list[dict],
    corpus,
    k: int,
    excluded_ground_truths: set[str] = frozenset(),
    rpsr_all_successes: bool = False,
) -> MetricsReport:
    """Build per-(provider, strategy) metrics from raw attempt documents.

    `attempts` are AttemptRecord.to_dict() documents. Submissions with
    flagged ground truths are excluded from RPSR aggregation only. RPSR is
    the mean over each submission's first successful trial unless
    `rpsr_all_successes` is set.
    """
    groups: dict[tuple[str, str], dict[str, list[dict]]] = {}
    for attempt in attempts:
        key = (attempt["provider_id"], attempt["strategy"])
        groups.setdefault(key, {}).setdefault(attempt["submission_id"], []).append(attempt)

    report = MetricsReport(k=k)
    for (provider_id, strategy), by_sub in sorted(groups.items()):
        sub_ids = sorted(by_sub)
        rows = []
        for sid in sub_ids:
            by_trial = {a["trial_index"]: a["success"] for a in by_sub[sid]}
            if sorted(by_trial) != list(range(1, k + 1)):
                raise ValueError(
                    f"non-rectangular trial grid for {provider_id}/{strategy}/{sid}: "
                    f"trials {sorted(by_trial)}"
                )
            rows.append(tuple(by_trial[t] for t in range(1, k + 1)))
        matrix = OutcomeMatrix(tuple(sub_ids), tuple(rows))

        measures = []
        for sid in sub_ids:
            if sid in excluded_ground_truths:
                continue
            submission = corpus.submission(sid)
            codes: list[str] = []
            if rpsr_all_successes:
                codes = [
                    a["stages"][a["succeeded_stage"] - 1]["extracted_code"]
                    for a in sorted(by_sub[sid], key=lambda a: a["trial_index"])
                    if a["success"]
                ]
            else:
                code = _first_success_code(by_sub[sid])
                codes = [code] if code is not None else []
            for code in codes:
                measures.append(
                    patch_measure(sid, submission.incorrect_code, submission.corrected_code, code)
                )

        tiers: dict[int, list[tuple[bool, ...]]] = {}
        for sid, row in zip(sub_ids, rows):
            tier = corpus.problem(corpus.submission(sid).problem_id).tier
            tiers.setdefault(tier, []).append(row)
        per_tier = {
            tier: avg_k(OutcomeMatrix(("",) * len(t_rows), tuple(t_rows)))
            for tier, t_rows in sorted(tiers.items())
        }

        report.groups.append(
            StrategyMetrics(
                provider_id=provider_id,
                strategy=strategy,
                top=top_k(matrix),
                avg=avg_k(matrix),
                mean_rpsr=(sum(m.rpsr for m in measures) / len(measures)) if measures else None,
                per_tier_avg=per_tier,
                patch_measures=measures,
            )
        )
    return report
