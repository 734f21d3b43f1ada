"""LLM clients: an HTTP chat-completions client and a scripted mock.

The mock replays a transcript of suffix patterns: the entry whose
``suffix`` matches the longest tail of the prompt wins. Scripted
transcripts make orchestration tests hermetic and deterministic.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import requests

from .errors import LlmTransportError

logger = logging.getLogger(__name__)


class LlmClient(Protocol):
    def complete(self, prompt: str, stop: Sequence[str]) -> str: ...


@dataclass
class LlmClientConfig:
    endpoint: str
    model: str
    api_key_env: str = "POLYHOP_LLM_API_KEY"
    timeout_s: float = 30.0
    retries: int = 3
    backoff_s: float = 0.5


class HttpLlmClient:
    """Chat-completions client pinned to temperature 0.

    Transient transport failures (timeouts, connection errors, HTTP 5xx)
    are retried with exponential backoff; exhausting the budget or any
    malformed response raises :class:`LlmTransportError`.
    """

    def __init__(
        self,
        config: LlmClientConfig,
        transport: Callable[[str, dict, dict, float], tuple[int, dict]] | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config
        self._transport = transport or self._requests_transport
        self._sleep = sleep

    @staticmethod
    def _requests_transport(url: str, payload: dict, headers: dict, timeout: float):
        response = requests.post(url, json=payload, headers=headers, timeout=timeout)
        try:
            return response.status_code, response.json()
        except ValueError as exc:
            raise LlmTransportError(f"non-JSON response from {url}") from exc

    def complete(self, prompt: str, stop: Sequence[str]) -> str:
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
            "stop": list(stop),
        }
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.config.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        attempts = self.config.retries + 1
        last: Exception | None = None
        for attempt in range(attempts):
            if attempt:
                self._sleep(self.config.backoff_s * (2 ** (attempt - 1)))
            try:
                status, body = self._transport(
                    self.config.endpoint, payload, headers, self.config.timeout_s
                )
            except (requests.Timeout, requests.ConnectionError, TimeoutError) as exc:
                last = exc
                logger.warning("LLM attempt %d/%d failed: %s", attempt + 1, attempts, exc)
                continue
            if 500 <= status < 600:
                last = LlmTransportError(f"server error {status}")
                continue
            if status != 200:
                raise LlmTransportError(f"unexpected HTTP {status} from {self.config.endpoint}")
            try:
                return body["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as exc:
                raise LlmTransportError("response missing choices[0].message.content") from exc
        raise LlmTransportError(f"LLM endpoint failed {attempts} attempts: {last}") from last


@dataclass
class MockLlm:
    """Scripted responder: longest matching prompt suffix wins.

    Exact two-line tails hit a dict fast path; anything else falls back
    to a longest-suffix scan, so hand-written fixtures with short
    patterns still work. Unmatched prompts get ``default``.
    """

    entries: list[tuple[str, str]] = field(default_factory=list)
    default: str = ""
    calls: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._exact = {suffix: response for suffix, response in self.entries}
        self._by_length = sorted(self.entries, key=lambda e: len(e[0]), reverse=True)

    @classmethod
    def from_file(cls, path: str | Path) -> "MockLlm":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        entries = [(e["suffix"], e["response"]) for e in raw.get("entries", [])]
        return cls(entries=entries, default=raw.get("default", ""))

    def complete(self, prompt: str, stop: Sequence[str]) -> str:
        self.calls.append(prompt)
        hit = self._exact.get(tail_key(prompt))
        if hit is not None:
            return hit
        for suffix, response in self._by_length:
            if prompt.endswith(suffix):
                return response
        return self.default


def tail_key(prompt: str) -> str:
    """The last two newline-separated segments of a prompt, as a true suffix."""
    return "\n".join(prompt.split("\n")[-2:])


def save_transcript(path: str | Path, entries: Sequence[tuple[str, str]], default: str = "") -> None:
    payload = {
        "entries": [{"suffix": s, "response": r} for s, r in entries],
        "default": default,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, ensure_ascii=False, indent=1)
        fh.write("\n")
