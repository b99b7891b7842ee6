import textwrap

import pytest

from repairbench.sandbox import (
    JudgePolicy,
    Sandbox,
    Verdict,
    judge_output,
)

ECHO_SUM = textwrap.dedent(
    """
    #include <iostream>
    int main() { long a, b; std::cin >> a >> b; std::cout << a + b << "\\n"; }
    """
)

BUSY_LOOP = textwrap.dedent(
    """
    #include <iostream>
    int main() { volatile unsigned long long x = 0; while (true) ++x; }
    """
)

CRASHER = textwrap.dedent(
    """
    #include <cstdlib>
    int main() { std::abort(); }
    """
)

HOG = textwrap.dedent(
    """
    #include <cstring>
    #include <iostream>
    #include <unistd.h>
    int main() {
        // grow slowly so the watcher can observe the peak
        for (int i = 0; i < 150; i++) {
            char* block = new char[1 << 20];
            std::memset(block, 1, 1 << 20);
            usleep(2000);
        }
        std::cout << "0\\n";
    }
    """
)


class FakeProblem:
    def __init__(self, cases, time_limit_ms=2000, memory_limit_kb=262144):
        self.test_cases = cases
        self.time_limit_ms = time_limit_ms
        self.memory_limit_kb = memory_limit_kb


class FakeCase:
    def __init__(self, index, inp, out):
        self.index = index
        self.input_text = inp
        self.expected_output_text = out


def test_compile_ok(sandbox, tmp_path):
    result = sandbox.compile(ECHO_SUM, workdir=tmp_path)
    assert result.ok
    assert result.artifact.exists()


def test_compile_error_reports_diagnostics(sandbox, tmp_path):
    result = sandbox.compile("int main() { return 0 }", workdir=tmp_path)
    assert not result.ok
    assert "error" in result.diagnostics


def test_execute_happy_path(sandbox, tmp_path):
    artifact = sandbox.compile(ECHO_SUM, workdir=tmp_path).artifact
    result = sandbox.execute(artifact, "2 3\n", time_limit_ms=2000, memory_limit_kb=262144)
    assert result.status == "exited"
    assert result.exit_code == 0
    assert result.stdout == "5\n"
    assert result.wall_time_ms < 2000


def test_execute_time_limit(sandbox, tmp_path):
    artifact = sandbox.compile(BUSY_LOOP, workdir=tmp_path).artifact
    result = sandbox.execute(artifact, "", time_limit_ms=300, memory_limit_kb=262144)
    assert result.status == "timeout"
    # killed close to the limit, not left to run forever
    assert result.wall_time_ms < 300 + 1000


def test_execute_runtime_error(sandbox, tmp_path):
    artifact = sandbox.compile(CRASHER, workdir=tmp_path).artifact
    result = sandbox.execute(artifact, "", time_limit_ms=2000, memory_limit_kb=262144)
    assert result.status == "signaled"
    assert result.exit_code != 0


def test_run_all_verdicts():
    sandbox = Sandbox()
    cases = [FakeCase(1, "2 3\n", "5\n"), FakeCase(2, "10 1\n", "12\n")]
    report = sandbox.run_all(ECHO_SUM, FakeProblem(cases))
    verdicts = [t.verdict for t in report.per_test]
    assert verdicts == [Verdict.Accepted, Verdict.WrongAnswer]
    assert not report.passed_all
    assert report.failing_cases == [2]


def test_run_all_no_fail_fast():
    # the failing-case list must include every failure, not stop at the first
    sandbox = Sandbox()
    cases = [FakeCase(i, "0 0\n", "1\n") for i in range(1, 4)]
    report = sandbox.run_all(ECHO_SUM, FakeProblem(cases))
    assert report.failing_cases == [1, 2, 3]


def test_run_all_compile_error_marks_every_case():
    sandbox = Sandbox()
    cases = [FakeCase(1, "", ""), FakeCase(2, "", "")]
    report = sandbox.run_all("no c++ here", FakeProblem(cases))
    assert [t.verdict for t in report.per_test] == [Verdict.CompileError] * 2
    assert report.failing_cases == [1, 2]


def test_run_all_time_limit_verdict():
    sandbox = Sandbox()
    report = sandbox.run_all(
        BUSY_LOOP, FakeProblem([FakeCase(1, "", "")], time_limit_ms=300)
    )
    assert report.per_test[0].verdict == Verdict.TimeLimit


def test_run_all_memory_limit_verdict():
    sandbox = Sandbox()
    report = sandbox.run_all(
        HOG, FakeProblem([FakeCase(1, "", "0\n")], memory_limit_kb=65536)
    )
    assert report.per_test[0].verdict == Verdict.MemoryLimit


def test_failing_test_cases_returns_case_objects(sandbox, corpus):
    problem = corpus.problem("pair-sums")
    s2 = corpus.submission("s2")
    cases = sandbox.failing_test_cases(s2.incorrect_code, problem)
    assert [c.index for c in cases] == [2]
    assert cases[0].input_text == problem.test_cases[1].input_text


def test_judging_is_deterministic(sandbox, corpus):
    problem = corpus.problem("pair-sums")
    s1 = corpus.submission("s1")
    first = sandbox.run_all(s1.incorrect_code, problem)
    second = sandbox.run_all(s1.incorrect_code, problem)
    assert [t.verdict for t in first.per_test] == [t.verdict for t in second.per_test]


# --- output judging -------------------------------------------------------

def test_judge_trailing_ws_tolerant_default():
    assert judge_output("I can answer you !\n", "I can answer you !")
    assert judge_output("5\n", "5")
    assert judge_output("5 \n", "5")
    assert not judge_output("5\n6\n", "5\n")
    assert not judge_output("5", "6")


def test_judge_exact_policy():
    assert not judge_output("5\n", "5", policy=JudgePolicy.EXACT)
    assert judge_output("5\n", "5\n", policy=JudgePolicy.EXACT)


def test_judge_tokens_policy():
    assert judge_output(" 1   2\n3", "1 2 3", policy=JudgePolicy.TOKENS)
    assert not judge_output("1 2", "1 2 3", policy=JudgePolicy.TOKENS)
