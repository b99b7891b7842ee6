"""Provider-agnostic multi-turn chat sessions with deterministic replay.

Replay providers return scripted assistant turns keyed by
(fixture key, assistant-turn index), so tests and the offline acceptance
suite run without any network. Live providers speak an OpenAI-style chat
completion API; credentials come only from environment variables.
"""

from __future__ import annotations

import itertools
import json
import math
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import httpx

__all__ = [
    "SamplingParams",
    "ChatTurn",
    "ChatSession",
    "ProviderError",
    "TransientProviderError",
    "ContextLengthError",
    "UnknownProviderError",
    "ReplayProvider",
    "LiveHttpProvider",
    "ProviderRegistry",
    "estimate_tokens",
]


class ProviderError(Exception):
    """Hard provider failure (after retries)."""


class TransientProviderError(ProviderError):
    """Retryable failure (rate limit, 5xx, network)."""


class ContextLengthError(ProviderError):
    """Prompt exceeded the provider's context window; surfaced distinctly so
    strategies can record a stage failure instead of aborting."""


class UnknownProviderError(ProviderError):
    pass


@dataclass(frozen=True)
class SamplingParams:
    temperature: float = 1.0
    top_p: float = 1.0
    max_tokens: int = 4096

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


def estimate_tokens(text: str) -> int:
    """Fallback token estimate when the provider reports no usage."""
    return math.ceil(len(text.encode()) / 4)


@dataclass
class ChatTurn:
    role: str  # system | user | assistant
    content: str
    token_count: int = 0

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {self.role!r}")
        if self.role != "system" and not self.content:
            raise ValueError("empty content for non-system turn")


@dataclass
class ChatSession:
    id: str
    provider_id: str
    params: SamplingParams
    turns: list[ChatTurn] = field(default_factory=list)
    total_prompt_tokens: int = 0
    total_completion_tokens: int = 0
    fixture_key: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "provider_id": self.provider_id,
            "params": {
                "temperature": self.params.temperature,
                "top_p": self.params.top_p,
                "max_tokens": self.params.max_tokens,
            },
            "turns": [
                {"role": t.role, "content": t.content, "token_count": t.token_count}
                for t in self.turns
            ],
            "total_prompt_tokens": self.total_prompt_tokens,
            "total_completion_tokens": self.total_completion_tokens,
        }


class ReplayProvider:
    """Scripted assistant turns for deterministic offline runs.

    Scripts map a fixture key to the ordered list of assistant responses;
    response N answers the session's N-th user turn regardless of prompt
    wording, so template evolution does not invalidate fixtures. Strict mode
    additionally checks a recorded prompt prefix to catch drift.

    Script file format (JSON):
        {"scripts": {"<key>": ["resp 1", "resp 2", ...]},
         "prefixes": {"<key>": ["This is a programming", ...]}}   # optional

    A response entry may also be {"error": "context_length"} to script a
    context-window failure.
    """

    kind = "replay"

    def __init__(self, scripts: dict[str, list], prefixes: dict[str, list[str]] | None = None,
                 strict: bool = False):
        self.scripts = scripts
        self.prefixes = prefixes or {}
        self.strict = strict

    @classmethod
    def from_file(cls, path: str | Path, strict: bool = False) -> "ReplayProvider":
        doc = json.loads(Path(path).read_text())
        return cls(doc["scripts"], doc.get("prefixes"), strict=strict)

    def complete(self, session: ChatSession, params: SamplingParams) -> tuple[str, int, int]:
        key = session.fixture_key or "default"
        if key not in self.scripts:
            raise ProviderError(f"no replay script for fixture key {key!r}")
        index = sum(1 for t in session.turns if t.role == "assistant")
        script = self.scripts[key]
        if index >= len(script):
            raise ProviderError(f"replay script {key!r} exhausted at turn {index}")
        entry = script[index]
        if isinstance(entry, dict):
            if entry.get("error") == "context_length":
                raise ContextLengthError(f"scripted context-length failure ({key}#{index})")
            raise ProviderError(f"scripted failure ({key}#{index})")
        if self.strict:
            prefixes = self.prefixes.get(key, [])
            if index < len(prefixes):
                last_user = session.turns[-1].content
                if not last_user.startswith(prefixes[index]):
                    raise ProviderError(
                        f"replay prompt drift at {key}#{index}: expected prefix "
                        f"{prefixes[index]!r}"
                    )
        prompt_tokens = sum(estimate_tokens(t.content) for t in session.turns)
        return entry, prompt_tokens, estimate_tokens(entry)


class LiveHttpProvider:
    """OpenAI-style chat-completions adapter; the concrete service is pure config."""

    kind = "live"

    def __init__(self, endpoint: str, model: str, api_key: str | None = None,
                 timeout_s: float = 120.0):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.timeout_s = timeout_s

    def complete(self, session: ChatSession, params: SamplingParams) -> tuple[str, int, int]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": t.role, "content": t.content} for t in session.turns],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_tokens,
        }
        try:
            resp = httpx.post(self.endpoint, json=payload, headers=headers,
                              timeout=self.timeout_s)
        except httpx.HTTPError as e:
            raise TransientProviderError(str(e)) from e
        if resp.status_code in (429, 500, 502, 503, 504):
            raise TransientProviderError(f"HTTP {resp.status_code}")
        if resp.status_code == 400 and "context" in resp.text.lower():
            raise ContextLengthError(resp.text[:500])
        if resp.status_code != 200:
            raise ProviderError(f"HTTP {resp.status_code}: {resp.text[:500]}")
        doc = resp.json()
        content = doc["choices"][0]["message"]["content"]
        usage = doc.get("usage", {})
        return (
            content,
            usage.get("prompt_tokens", 0) or sum(estimate_tokens(t.content) for t in session.turns),
            usage.get("completion_tokens", 0) or estimate_tokens(content),
        )


class ProviderRegistry:
    """provider_id -> adapter; config comes from a JSON file or a dict.

    Config entry shape:
        {"kind": "replay", "script": "path/to/script.json", "strict": false}
        {"kind": "live", "endpoint": "...", "model": "...",
         "credential_env": "MY_API_KEY"}
    """

    def __init__(self, retry_attempts: int = 3, retry_base_s: float = 0.5):
        self._providers: dict[str, object] = {}
        self.retry_attempts = retry_attempts
        self.retry_base_s = retry_base_s
        self._session_counter = itertools.count(1)

    @classmethod
    def from_config(cls, config: dict, base_dir: str | Path = ".") -> "ProviderRegistry":
        import os

        registry = cls()
        for provider_id, entry in config.items():
            if entry["kind"] == "replay":
                registry.register(
                    provider_id,
                    ReplayProvider.from_file(
                        Path(base_dir) / entry["script"], strict=entry.get("strict", False)
                    ),
                )
            elif entry["kind"] == "live":
                registry.register(
                    provider_id,
                    LiveHttpProvider(
                        endpoint=entry["endpoint"],
                        model=entry["model"],
                        api_key=os.environ.get(entry.get("credential_env", "")),
                        timeout_s=entry.get("timeout_s", 120.0),
                    ),
                )
            else:
                raise UnknownProviderError(f"unknown provider kind {entry['kind']!r}")
        return registry

    def register(self, provider_id: str, provider) -> None:
        self._providers[provider_id] = provider

    def get(self, provider_id: str):
        try:
            return self._providers[provider_id]
        except KeyError:
            raise UnknownProviderError(provider_id) from None

    def open_session(
        self,
        provider_id: str,
        params: SamplingParams | None = None,
        fixture_key: str | None = None,
        system_prompt: str | None = None,
    ) -> ChatSession:
        self.get(provider_id)  # fail fast on unknown providers
        session = ChatSession(
            id=f"s{next(self._session_counter):06d}-{uuid.uuid4().hex[:8]}",
            provider_id=provider_id,
            params=params or SamplingParams(),
            fixture_key=fixture_key,
        )
        if system_prompt:
            session.turns.append(
                ChatTurn("system", system_prompt, estimate_tokens(system_prompt))
            )
        return session

    def send(self, session: ChatSession, user_content: str) -> str:
        """Append a user turn, obtain the assistant reply, update totals.

        A failed send leaves the session unchanged (atomic append).
        Transient failures retry with exponential backoff.
        """
        if session.turns and session.turns[-1].role == "user":
            raise ValueError("previous user turn is unanswered")
        if not user_content:
            raise ValueError("empty user content")
        provider = self.get(session.provider_id)
        trial = ChatSession(
            id=session.id,
            provider_id=session.provider_id,
            params=session.params,
            turns=session.turns + [ChatTurn("user", user_content, estimate_tokens(user_content))],
            fixture_key=session.fixture_key,
        )
        last_error: ProviderError | None = None
        for attempt in range(self.retry_attempts):
            try:
                content, prompt_tokens, completion_tokens = provider.complete(
                    trial, session.params
                )
                break
            except TransientProviderError as e:
                last_error = e
                time.sleep(self.retry_base_s * 2**attempt)
            except ProviderError:
                raise
        else:
            raise ProviderError(f"provider failed after retries: {last_error}")
        session.turns.append(ChatTurn("user", user_content, estimate_tokens(user_content)))
        session.turns.append(ChatTurn("assistant", content, completion_tokens))
        session.total_prompt_tokens += prompt_tokens
        session.total_completion_tokens += completion_tokens
        return content
