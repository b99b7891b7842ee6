"""Compile-and-run oracle: builds candidate C++ programs and judges them
against a problem's test cases under time/memory limits.

Isolation is per-run temp directories plus rlimits; this is an evaluation
harness, not a hardened multi-tenant sandbox (deploy inside a container if
untrusted code matters).
"""

from __future__ import annotations

import enum
import os
import resource
import shutil
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "Verdict",
    "ToolchainConfig",
    "CompileResult",
    "ExecutionResult",
    "RunReport",
    "TestResult",
    "SandboxError",
    "JudgePolicy",
    "Sandbox",
    "judge_output",
]

STDOUT_CAP_BYTES = 8 * 1024 * 1024

# Bounds concurrent child processes across all Sandbox instances.
_process_gate = threading.BoundedSemaphore(int(os.environ.get("REPAIRBENCH_MAX_PROCS", "8")))


class SandboxError(Exception):
    """Host-side failure (missing toolchain, spawn error) - not a verdict."""


class Verdict(enum.Enum):
    Accepted = "Accepted"
    WrongAnswer = "WrongAnswer"
    TimeLimit = "TimeLimit"
    MemoryLimit = "MemoryLimit"
    RuntimeError = "RuntimeError"
    CompileError = "CompileError"


class JudgePolicy(enum.Enum):
    #: strip trailing whitespace per line, drop trailing blank lines, compare bytes
    TRAILING_WS_TOLERANT = "trailing_ws_tolerant"
    EXACT = "exact"
    TOKENS = "tokens"


@dataclass(frozen=True)
class ToolchainConfig:
    """Compiler invocation template; `{src}` and `{out}` are substituted."""

    command: tuple[str, ...] = ("g++", "-O2", "-std=c++17", "{src}", "-o", "{out}")
    compile_timeout_s: float = 30.0
    env_passthrough: tuple[str, ...] = ("PATH", "HOME", "TMPDIR")

    def compiler_binary(self) -> str:
        return self.command[0]


@dataclass
class CompileResult:
    ok: bool
    diagnostics: str
    artifact: Path | None = None


@dataclass
class ExecutionResult:
    stdout: str
    status: str  # exited | timeout | signaled
    exit_code: int | None
    wall_time_ms: int
    peak_memory_kb: int
    truncated: bool = False


@dataclass(frozen=True)
class TestResult:
    test_index: int
    verdict: Verdict
    wall_time_ms: int
    peak_memory_kb: int


@dataclass
class RunReport:
    per_test: list[TestResult] = field(default_factory=list)

    @property
    def passed_all(self) -> bool:
        return bool(self.per_test) and all(
            t.verdict is Verdict.Accepted for t in self.per_test
        )

    @property
    def failing_cases(self) -> list[int]:
        return [t.test_index for t in self.per_test if t.verdict is not Verdict.Accepted]


def _canon(text: str, policy: JudgePolicy) -> str:
    if policy is JudgePolicy.EXACT:
        return text
    if policy is JudgePolicy.TOKENS:
        return " ".join(text.split())
    lines = [line.rstrip() for line in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


def judge_output(actual: str, expected: str, policy: JudgePolicy = JudgePolicy.TRAILING_WS_TOLERANT) -> bool:
    return _canon(actual, policy) == _canon(expected, policy)


class Sandbox:
    def __init__(
        self,
        toolchain: ToolchainConfig | None = None,
        judge_policy: JudgePolicy = JudgePolicy.TRAILING_WS_TOLERANT,
        work_root: str | Path | None = None,
    ):
        self.toolchain = toolchain or ToolchainConfig()
        self.judge_policy = judge_policy
        self.work_root = Path(work_root) if work_root else None

    def _env(self) -> dict[str, str]:
        return {k: os.environ[k] for k in self.toolchain.env_passthrough if k in os.environ}

    def compile(self, source: str, workdir: str | Path | None = None) -> CompileResult:
        if shutil.which(self.toolchain.compiler_binary()) is None:
            raise SandboxError(f"toolchain not found: {self.toolchain.compiler_binary()}")
        owns_dir = workdir is None
        wd = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="rbx-", dir=self.work_root))
        try:
            src = wd / "candidate.cpp"
            out = wd / "candidate.bin"
            src.write_text(source)
            cmd = [part.format(src=src, out=out) for part in self.toolchain.command]
            with _process_gate:
                proc = subprocess.run(
                    cmd,
                    capture_output=True,
                    text=True,
                    timeout=self.toolchain.compile_timeout_s,
                    env=self._env(),
                    cwd=wd,
                )
            diagnostics = (proc.stderr or "") + (proc.stdout or "")
            if proc.returncode == 0 and out.exists():
                return CompileResult(ok=True, diagnostics=diagnostics, artifact=out)
            if not diagnostics.strip():
                diagnostics = f"compiler exited with status {proc.returncode}"
            if owns_dir:
                shutil.rmtree(wd, ignore_errors=True)
            return CompileResult(ok=False, diagnostics=diagnostics)
        except subprocess.TimeoutExpired:
            if owns_dir:
                shutil.rmtree(wd, ignore_errors=True)
            return CompileResult(ok=False, diagnostics="compiler timed out")

    def execute(
        self,
        artifact: Path,
        input_text: str,
        time_limit_ms: int,
        memory_limit_kb: int,
        stdout_cap: int = STDOUT_CAP_BYTES,
    ) -> ExecutionResult:
        limit_bytes = memory_limit_kb * 1024

        def set_limits():
            # Address-space cap approximates the memory limit; generous slack
            # for the C++ runtime so tiny programs do not trip it at startup.
            resource.setrlimit(resource.RLIMIT_AS, (limit_bytes + 256 * 1024 * 1024,) * 2)
            resource.setrlimit(resource.RLIMIT_CORE, (0, 0))

        peak_kb = 0
        with _process_gate:
            start = time.monotonic()
            try:
                proc = subprocess.Popen(
                    [str(artifact)],
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.DEVNULL,
                    text=True,
                    env=self._env(),
                    cwd=artifact.parent,
                    preexec_fn=set_limits,
                )
            except OSError as e:
                raise SandboxError(f"failed to spawn {artifact}: {e}") from e

            stop_poll = threading.Event()

            def poll_memory():
                nonlocal peak_kb
                try:
                    import psutil

                    handle = psutil.Process(proc.pid)
                    while not stop_poll.wait(0.02):
                        peak_kb = max(peak_kb, handle.memory_info().rss // 1024)
                except Exception:
                    pass

            poller = threading.Thread(target=poll_memory, daemon=True)
            poller.start()
            try:
                # deadline-based so spawn overhead does not extend the limit
                remaining = max(0.001, time_limit_ms / 1000.0 - (time.monotonic() - start))
                stdout, _ = proc.communicate(input_text, timeout=remaining)
                status = "exited" if proc.returncode >= 0 else "signaled"
                wall_ms = int((time.monotonic() - start) * 1000)
                exit_code = proc.returncode
            except subprocess.TimeoutExpired:
                wall_ms = int((time.monotonic() - start) * 1000)
                proc.kill()
                try:
                    stdout, _ = proc.communicate(timeout=5)
                except subprocess.TimeoutExpired:
                    stdout = ""
                status, exit_code = "timeout", None
            finally:
                stop_poll.set()
            poller.join(timeout=1)

        stdout = stdout or ""
        truncated = len(stdout.encode(errors="replace")) > stdout_cap
        if truncated:
            stdout = stdout.encode(errors="replace")[:stdout_cap].decode(errors="replace")
        return ExecutionResult(
            stdout=stdout,
            status=status,
            exit_code=exit_code,
            wall_time_ms=wall_ms,
            peak_memory_kb=peak_kb,
        )

    def _verdict_for(self, result: ExecutionResult, expected: str, memory_limit_kb: int) -> Verdict:
        if result.status == "timeout":
            return Verdict.TimeLimit
        if result.peak_memory_kb > memory_limit_kb:
            return Verdict.MemoryLimit
        if result.status == "signaled" or result.exit_code != 0:
            return Verdict.RuntimeError
        if judge_output(result.stdout, expected, self.judge_policy):
            return Verdict.Accepted
        return Verdict.WrongAnswer

    def run_all(self, source: str, problem) -> RunReport:
        """Compile and run every test in index order (no early abort, so the
        failing-case list is always complete)."""
        wd = Path(tempfile.mkdtemp(prefix="rbx-", dir=self.work_root))
        try:
            compiled = self.compile(source, workdir=wd)
            if not compiled.ok:
                return RunReport(
                    per_test=[
                        TestResult(t.index, Verdict.CompileError, 0, 0)
                        for t in problem.test_cases
                    ]
                )
            report = RunReport()
            for case in problem.test_cases:
                result = self.execute(
                    compiled.artifact,
                    case.input_text,
                    time_limit_ms=problem.time_limit_ms,
                    memory_limit_kb=problem.memory_limit_kb,
                )
                verdict = self._verdict_for(
                    result, case.expected_output_text, problem.memory_limit_kb
                )
                report.per_test.append(
                    TestResult(case.index, verdict, result.wall_time_ms, result.peak_memory_kb)
                )
            return report
        finally:
            shutil.rmtree(wd, ignore_errors=True)

    def failing_test_cases(self, source: str, problem) -> list:
        """TestCase objects the given source fails, in index order."""
        report = self.run_all(source, problem)
        failing = set(report.failing_cases)
        return [t for t in problem.test_cases if t.index in failing]
