"""Regenerate the golden prompt files from the fixture corpus.

Run from the repo root after any deliberate template change:
    python tools/gen_goldens.py
Tests compare rendered prompts byte-wise against goldens/, so wording
drift fails until the goldens are regenerated on purpose.
"""
from pathlib import Path

from repairbench import corpus as corpus_mod
from repairbench import prompting
from repairbench.sandbox import Sandbox

ENTRY_BREAK = "\n<<<ENTRY-BREAK>>>\n"

def main():
    root = Path(__file__).resolve().parent.parent
    corpus = corpus_mod.ingest(root / "fixtures" / "corpus")
    sub = corpus.submission("s1")
    problem = corpus.problem(sub.problem_id)
    failing = Sandbox().failing_test_cases(sub.incorrect_code, problem)
    payloads = {
        prompting.TUTOR_GUIDANCE: sub.tutor_guidance,
        prompting.SOLUTION_DESCRIPTION: problem.solution_description,
        prompting.FAILING_TESTS: failing,
    }
    out = root / "goldens"
    out.mkdir(exist_ok=True)
    (out / "baseline.txt").write_text(prompting.render_baseline(problem, sub.incorrect_code))
    for info in prompting.ALL_INFO_SETS:
        bundle = prompting.build_bundle(problem, sub.incorrect_code, info, payloads)
        name = "bundle_" + "".join(info.ordered()).lower() + ".txt"
        (out / name).write_text(ENTRY_BREAK.join(bundle.entries))
    print("goldens written:", sorted(p.name for p in out.iterdir()))

if __name__ == "__main__":
    main()
