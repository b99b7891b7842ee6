"""Regenerate the deterministic replay scripts for the mini-benchmark.

Outcome design (k independent trials all share the same script unless noted):
  baseline            every submission fails (no code in the response)
  augmented[T&S&F]    s1, s2, s3 succeed on trial 1 only; others never
  multiregen          s1 passes at phase 2, s3/s4 at phase 1, rest never
  cref                s1 passes at stage 2, s2 at stage 3 (stage-2 produces a
                      deliberately wrong intermediate repair), s3/s4/s5 at
                      stage 1, s6 never
"""
import json
from pathlib import Path

from repairbench import corpus as corpus_mod

NO_CODE = "We are sorry, the issue is unclear to us and no repair is proposed."
ACK = "Understood."
K = 5

# intermediate wrong repair used by s2's second conversational stage
OFF_BY_ONE = """#include <iostream>
int main() {
    int n;
    std::cin >> n;
    for (int i = 0; i < n; i++) {
        long long a, b;
        std::cin >> a >> b;
        std::cout << a + b + 1 << "\\n";
    }
    return 0;
}
"""

def fenced(code):
    return f"Here is the repaired code:\n```cpp\n{code}```\nPlease try it."

def main():
    root = Path(__file__).resolve().parent.parent
    corpus = corpus_mod.ingest(root / "fixtures" / "corpus")
    fix = {s.id: s for s in corpus.submissions}
    scripts = {}
    for sid in ("s1", "s2", "s3", "s4", "s5", "s6"):
        good = fenced(fix[sid].corrected_code)
        for t in range(1, K + 1):
            scripts[f"{sid}/baseline/{t}"] = [NO_CODE]
            final = good if sid in ("s1", "s2", "s3") and t == 1 else NO_CODE
            scripts[f"{sid}/augmented[T&S&F]/{t}"] = [ACK, ACK, ACK, ACK, final]
            # multiregen: one fresh session per phase
            if sid == "s1":
                scripts[f"{sid}/multiregen/{t}#1"] = [fenced(fix["s1"].incorrect_code)]
                scripts[f"{sid}/multiregen/{t}#2"] = [ACK, ACK, ACK, good]
            elif sid in ("s3", "s4"):
                scripts[f"{sid}/multiregen/{t}#1"] = [good]
            else:
                scripts[f"{sid}/multiregen/{t}#1"] = [NO_CODE]
                scripts[f"{sid}/multiregen/{t}#2"] = [ACK, ACK, ACK, NO_CODE]
                scripts[f"{sid}/multiregen/{t}#3"] = [ACK, ACK, ACK, ACK, NO_CODE]
            # cref: one session, one response per stage
            if sid == "s1":
                scripts[f"{sid}/cref/{t}"] = [fenced(fix["s1"].incorrect_code), good]
            elif sid == "s2":
                scripts[f"{sid}/cref/{t}"] = [NO_CODE, fenced(OFF_BY_ONE), good]
            elif sid in ("s3", "s4", "s5"):
                scripts[f"{sid}/cref/{t}"] = [good]
            else:
                scripts[f"{sid}/cref/{t}"] = [NO_CODE, NO_CODE, NO_CODE]
    # tutor-console sessions run cref with fixture key console-<problem_id>;
    # pair-sums repairs at stage 2, word-flip at stage 1, best-run never
    scripts["console-pair-sums/cref/1"] = [
        fenced(fix["s1"].incorrect_code),
        fenced(fix["s1"].corrected_code),
    ]
    scripts["console-word-flip/cref/1"] = [fenced(fix["s3"].corrected_code)]
    scripts["console-best-run/cref/1"] = [NO_CODE, NO_CODE, NO_CODE]
    out = root / "fixtures" / "replay"
    out.mkdir(parents=True, exist_ok=True)
    (out / "minibench.json").write_text(json.dumps({"scripts": scripts}, indent=2, sort_keys=True))
    (root / "fixtures" / "providers.json").write_text(json.dumps(
        {"replay:minibench": {"kind": "replay", "script": "replay/minibench.json"}},
        indent=2, sort_keys=True))
    print("replay scripts:", len(scripts))

if __name__ == "__main__":
    main()
