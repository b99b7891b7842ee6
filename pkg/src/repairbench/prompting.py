"""Prompt rendering and code extraction.

Rendering is pure and byte-stable: every template output is pinned by a
golden file under goldens/. The augmented-information entries keep a fixed
T -> S -> F order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

__all__ = [
    "TUTOR_GUIDANCE",
    "SOLUTION_DESCRIPTION",
    "FAILING_TESTS",
    "INFO_ORDER",
    "InfoSet",
    "PromptBundle",
    "PromptError",
    "render_baseline",
    "render_context",
    "render_info_entry",
    "build_bundle",
    "extract_code",
    "ALL_INFO_SETS",
]

DESCRIPTION_INTRO = "This is a programming problem description:"
CODE_INTRO = "This is an incorrect code to the problem:"
TASK_SENTENCE = "You are a software engineer. Can you repair the incorrect code?"
SOLUTION_INTRO = "This is a solution to the problem:"
FAILING_INTRO = "This incorrect code failed to pass the following test cases:"

TUTOR_GUIDANCE = "T"
SOLUTION_DESCRIPTION = "S"
FAILING_TESTS = "F"
INFO_ORDER = (TUTOR_GUIDANCE, SOLUTION_DESCRIPTION, FAILING_TESTS)


class PromptError(ValueError):
    pass


class InfoSet(frozenset):
    """Subset of {T, S, F}; the 7 non-empty subsets are the augmentation grid."""

    def __new__(cls, kinds):
        kinds = frozenset(kinds)
        bad = kinds - set(INFO_ORDER)
        if bad:
            raise PromptError(f"unknown info kinds: {sorted(bad)}")
        return super().__new__(cls, kinds)

    def ordered(self) -> list[str]:
        return [k for k in INFO_ORDER if k in self]

    def label(self) -> str:
        return "&".join(self.ordered()) if self else "none"

    @classmethod
    def parse(cls, text: str) -> "InfoSet":
        return cls(part.strip().upper() for part in text.replace("&", ",").split(",") if part.strip())


ALL_INFO_SETS = tuple(
    InfoSet(combo)
    for size in (1, 2, 3)
    for combo in itertools.combinations(INFO_ORDER, size)
)


@dataclass(frozen=True)
class PromptBundle:
    entries: tuple[str, ...]

    def __post_init__(self):
        if not self.entries or any(not e for e in self.entries):
            raise PromptError("bundle entries must be non-empty")


def _fence_for(code: str) -> str:
    # Inner fences are escaped by using a longer outer fence.
    longest = max((len(m.group()) for m in re.finditer(r"`+", code)), default=0)
    return "`" * max(3, longest + 1)


def _fenced(code: str) -> str:
    fence = _fence_for(code)
    body = code if code.endswith("\n") else code + "\n"
    return f"{fence}\n{body}{fence}"


def render_context(problem, incorrect_code: str) -> str:
    """Problem description plus the incorrect code (baseline without the task)."""
    if not incorrect_code.strip():
        raise PromptError("empty incorrect code")
    return (
        f"{DESCRIPTION_INTRO}\n{problem.statement.rstrip()}\n"
        f"{CODE_INTRO}\n{_fenced(incorrect_code)}"
    )


def render_baseline(problem, incorrect_code: str) -> str:
    return f"{render_context(problem, incorrect_code)}\n{TASK_SENTENCE}"


def render_info_entry(kind: str, payload) -> str:
    if kind == TUTOR_GUIDANCE:
        if not str(payload).strip():
            raise PromptError("empty tutor guidance")
        return str(payload).rstrip()
    if kind == SOLUTION_DESCRIPTION:
        if not str(payload).strip():
            raise PromptError("empty solution description")
        return f"{SOLUTION_INTRO}\n{str(payload).rstrip()}"
    if kind == FAILING_TESTS:
        cases = list(payload)
        if not cases:
            raise PromptError("no failing test cases to render")
        blocks = []
        for case in cases:
            inp = case.input_text if case.input_text.endswith("\n") else case.input_text + "\n"
            out = case.expected_output_text
            blocks.append(f"Input:\n{inp}Expected output:\n{out.rstrip()}")
        return FAILING_INTRO + "\n" + "\n".join(blocks)
    raise PromptError(f"unknown info kind {kind!r}")


def build_bundle(problem, incorrect_code: str, info: InfoSet, payloads: dict) -> PromptBundle:
    """Conversational entries for an augmented prompt.

    Multi-info bundles segment into separate entries (context, one per info
    kind in T/S/F order, task). A single-info bundle collapses into one
    combined prompt.
    """
    if not info:
        raise PromptError("empty info set; use render_baseline instead")
    missing = [k for k in info.ordered() if k not in payloads]
    if missing:
        raise PromptError(f"missing payloads for: {missing}")
    context = render_context(problem, incorrect_code)
    info_entries = [render_info_entry(k, payloads[k]) for k in info.ordered()]
    if len(info_entries) == 1:
        return PromptBundle(entries=(f"{context}\n{info_entries[0]}\n{TASK_SENTENCE}",))
    return PromptBundle(entries=(context, *info_entries, TASK_SENTENCE))


_FENCE_RE = re.compile(
    r"^(?P<fence>`{3,})[ \t]*(?P<tag>[^\n`]*)\n(?P<body>.*?)^(?P=fence)`*[ \t]*$",
    re.MULTILINE | re.DOTALL,
)
_C_TAGS = {"c", "cpp", "c++", "cxx", "cc"}


def extract_code(response: str) -> str | None:
    """Pull a candidate program out of a free-form model response.

    Cascade: last C/C++-tagged fenced block, else last fenced block of any
    tag, else the whole response if it plausibly is a bare program, else None.
    """
    blocks = [(m.group("tag").strip().lower(), m.group("body")) for m in _FENCE_RE.finditer(response)]
    c_blocks = [body for tag, body in blocks if tag in _C_TAGS]
    if c_blocks:
        return c_blocks[-1]
    if blocks:
        return blocks[-1][1]
    if "int main" in response:
        return response
    return None
