"""Chat-completion backends: an HTTP client and two offline stand-ins."""

from __future__ import annotations

import json
import logging
import os
import sys
import threading
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Protocol, Sequence

import httpx

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)


class BackendError(RuntimeError):
    pass


class TransportError(BackendError):
    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempt(s))")
        self.attempts = attempts


class AuthenticationError(BackendError):
    pass


class TokenLimitError(BackendError):
    pass


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "http"  # http | oracle-mock | scripted
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-4"
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = 0.0
    max_tokens: int = 1500
    retries: int = 2
    backoff: tuple[float, ...] = (1.0, 2.0, 4.0)
    timeout: float = 60.0
    script: str | None = None  # replies file for kind="scripted"

    def __post_init__(self):
        if self.kind not in ("http", "oracle-mock", "scripted"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        object.__setattr__(self, "backoff", tuple(float(b) for b in self.backoff))

    def delay(self, attempt: int) -> float:
        if not self.backoff:
            return 0.0
        return self.backoff[min(attempt, len(self.backoff) - 1)]

    @classmethod
    def from_toml(cls, path: str | Path) -> "BackendConfig":
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
        doc = doc.get("backend", doc)
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"{path}: unknown backend keys {sorted(unknown)}")
        if "backoff" in doc:
            doc["backoff"] = tuple(doc["backoff"])
        if doc.get("script") and not Path(doc["script"]).is_absolute():
            doc["script"] = str(Path(path).parent / doc["script"])
        return cls(**doc)


class Backend(Protocol):
    def complete(self, prompt: str) -> str: ...


@dataclass
class ChatClient:
    """Minimal chat-completions client with retry and call log.

    Safe to share between threads: the only shared state is the call log,
    guarded by a lock.
    """

    config: BackendConfig
    transport: httpx.BaseTransport | None = None
    sleep: Callable[[float], None] = time.sleep
    calls: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        self._lock = threading.Lock()

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "").strip()
        if not key:
            raise AuthenticationError(
                f"environment variable {self.config.api_key_env} is not set; no request was sent"
            )
        return key

    def complete(self, prompt: str) -> str:
        key = self._api_key()
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        headers = {"Authorization": f"Bearer {key}"}
        attempts = self.config.retries + 1
        last = "no attempt made"
        with httpx.Client(transport=self.transport, timeout=self.config.timeout) as http:
            for attempt in range(attempts):
                if attempt:
                    self.sleep(self.config.delay(attempt - 1))
                try:
                    resp = http.post(self.config.endpoint, json=body, headers=headers)
                except httpx.TransportError as e:
                    last = f"transport failure: {e!r}"
                    log.warning("attempt %d/%d failed: %s", attempt + 1, attempts, last)
                    continue
                if resp.status_code in (401, 403):
                    raise AuthenticationError(f"endpoint rejected credentials ({resp.status_code})")
                if resp.status_code == 429 or resp.status_code >= 500:
                    last = f"HTTP {resp.status_code}"
                    log.warning("attempt %d/%d failed: %s", attempt + 1, attempts, last)
                    continue
                text = self._read(resp)
                with self._lock:
                    self.calls.append({"prompt": prompt, "response": text, "attempts": attempt + 1})
                return text
        raise TransportError(last, attempts)

    @staticmethod
    def _read(resp: httpx.Response) -> str:
        try:
            payload = resp.json()
        except json.JSONDecodeError:
            raise BackendError(f"HTTP {resp.status_code}: response is not JSON") from None
        if resp.status_code >= 400:
            err = payload.get("error", {}) if isinstance(payload, dict) else {}
            code = str(err.get("code", "")) + " " + str(err.get("message", ""))
            if "context_length" in code or "maximum context" in code or "too many tokens" in code:
                raise TokenLimitError(code.strip())
            raise BackendError(f"HTTP {resp.status_code}: {code.strip()}")
        try:
            choice = payload["choices"][0]
            text = choice["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise BackendError("malformed chat-completion response") from None
        if choice.get("finish_reason") == "length":
            raise TokenLimitError("reply truncated at the output token limit")
        return text


def complete(prompt: str, backend: BackendConfig, transport: httpx.BaseTransport | None = None,
             sleep: Callable[[float], None] = time.sleep) -> str:
    return ChatClient(backend, transport=transport, sleep=sleep).complete(prompt)


class ScriptedBackend:
    """Replays canned replies in order and remembers every prompt it saw."""

    def __init__(self, replies: Sequence[str]):
        self.replies = list(replies)
        self.prompts: list[str] = []

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if len(self.prompts) > len(self.replies):
            raise BackendError(f"script exhausted after {len(self.replies)} replies")
        return self.replies[len(self.prompts) - 1]


def load_script(path: str | Path, task_id: str | None = None) -> list[str]:
    """Replies file: a JSON list, or an object mapping task id to a list."""
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, list):
        return [str(x) for x in doc]
    if task_id is None or task_id not in doc:
        raise BackendError(f"{path}: no scripted replies for task {task_id!r}")
    return [str(x) for x in doc[task_id]]
