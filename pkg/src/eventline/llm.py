"""Chat-completion client used by the judging and pseudo-labeling stages.

The wire shape is plain JSON-over-HTTP: {"model", "messages", "temperature",
"max_tokens"} in, {"choices": [{"message": {"content": ...}}]} out. All
network activity lives in HttpTransport; the replay transport serves canned
responses keyed by a canonical request hash, so every test and offline
pipeline run is deterministic.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

from .errors import (
    AuthFailureError,
    FixtureMissError,
    MalformedUpstreamResponseError,
    RateLimitedError,
    UpstreamUnavailableError,
)
from .jsonio import atomic_write_text

_ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class Message:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in _ROLES:
            raise ValueError(f"role must be one of {_ROLES}, got {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[Message, ...]
    model_id: str = "judge-default"
    temperature: float = 0.0
    max_tokens: int = 512

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(self.messages))
        if not self.messages:
            raise ValueError("request needs at least one message")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    def payload(self) -> dict:
        return {
            "model": self.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_backoff_ms: int = 250

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class ClientConfig:
    """Endpoint plus retry/rate settings; credentials only via env indirection."""

    endpoint: str = ""
    auth_env: str = "EVENTLINE_API_TOKEN"
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    requests_per_minute: int = 60

    def __post_init__(self):
        if self.requests_per_minute <= 0:
            raise ValueError("requests_per_minute must be positive")


def request_hash(request: ChatRequest) -> str:
    """Canonical fixture key: message JSON with sorted keys, trimmed content."""
    canonical = json.dumps(
        [{"content": m.content.strip(), "role": m.role} for m in request.messages],
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class Transport(Protocol):
    def send(self, payload: dict) -> dict: ...


class HttpTransport:
    """POSTs the payload to the configured endpoint with bearer auth."""

    def __init__(self, config: ClientConfig, timeout: float = 30.0):
        self.config = config
        self.timeout = timeout

    def send(self, payload: dict) -> dict:
        import requests

        token = os.environ.get(self.config.auth_env, "")
        if not token:
            raise AuthFailureError(f"credential env var {self.config.auth_env} is not set")
        try:
            resp = requests.post(
                self.config.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {token}"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise UpstreamUnavailableError(f"request failed: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthFailureError(f"upstream rejected credentials ({resp.status_code})")
        if resp.status_code == 429:
            raise RateLimitedError("upstream rate limit hit")
        if resp.status_code >= 500:
            raise UpstreamUnavailableError(f"upstream error {resp.status_code}")
        if resp.status_code != 200:
            raise MalformedUpstreamResponseError(f"unexpected status {resp.status_code}")
        try:
            return resp.json()
        except ValueError as exc:
            raise MalformedUpstreamResponseError("response body is not JSON") from exc


class ReplayTransport:
    """Serves canned responses from a fixture: {"version": 1, "responses": {hash: text}}."""

    def __init__(self, fixture: dict | str | Path):
        if not isinstance(fixture, dict):
            with open(fixture, "r", encoding="utf-8") as fh:
                fixture = json.load(fh)
        self.responses: dict[str, str] = dict(fixture.get("responses", {}))

    def send(self, payload: dict) -> dict:
        key = _payload_hash(payload)
        if key not in self.responses:
            raise FixtureMissError(f"no recorded response for request {key[:12]}...")
        return {"choices": [{"message": {"role": "assistant", "content": self.responses[key]}}]}


class RecordingTransport:
    """Wraps another transport and captures (hash -> content) pairs for replay."""

    def __init__(self, inner: Transport):
        self.inner = inner
        self.responses: dict[str, str] = {}

    def send(self, payload: dict) -> dict:
        response = self.inner.send(payload)
        self.responses[_payload_hash(payload)] = _extract_content(response)
        return response

    def save(self, path: str | Path) -> None:
        atomic_write_text(
            path,
            json.dumps({"version": 1, "responses": self.responses}, indent=2, sort_keys=True),
        )


def _payload_hash(payload: dict) -> str:
    canonical = json.dumps(
        [
            {"content": str(m.get("content", "")).strip(), "role": m.get("role", "")}
            for m in payload.get("messages", [])
        ],
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _extract_content(response: dict) -> str:
    try:
        content = response["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise MalformedUpstreamResponseError(f"no assistant text in response: {exc}") from exc
    if not isinstance(content, str):
        raise MalformedUpstreamResponseError("assistant content is not text")
    return content


class RateLimiter:
    """Shared token bucket: capacity and refill both set by requests/minute."""

    def __init__(
        self,
        per_minute: int,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.capacity = float(per_minute)
        self.rate = per_minute / 60.0
        self.tokens = float(per_minute)
        self.clock = clock
        self.sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self.clock()
                self.tokens = min(self.capacity, self.tokens + (now - self._last) * self.rate)
                self._last = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                wait = (1.0 - self.tokens) / self.rate
            self.sleep(wait)


class LlmClient:
    """complete() with retry, exponential backoff + jitter, and a rate cap.

    Transient failures (rate limit, upstream unavailable) are retried up to
    retry.max_attempts; auth and malformed-response failures are not.
    Backoff delays are non-decreasing across attempts within one call.
    """

    def __init__(
        self,
        config: ClientConfig,
        transport: Transport | None = None,
        *,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
        rng: random.Random | None = None,
    ):
        self.config = config
        self.transport = transport if transport is not None else HttpTransport(config)
        self._sleep = sleep
        self._rng = rng if rng is not None else random.Random()
        self._limiter = RateLimiter(config.requests_per_minute, clock=clock, sleep=sleep)

    def complete(self, request: ChatRequest) -> str:
        payload = request.payload()
        attempts = self.config.retry.max_attempts
        base = self.config.retry.base_backoff_ms / 1000.0
        last: Exception | None = None
        for attempt in range(attempts):
            self._limiter.acquire()
            try:
                return _extract_content(self.transport.send(payload))
            except (RateLimitedError, UpstreamUnavailableError) as exc:
                last = exc
                if attempt + 1 < attempts:
                    # 2^k growth dominates the jitter term, so delays never shrink.
                    delay = base * (2**attempt) + base * self._rng.random()
                    self._sleep(delay)
        raise UpstreamUnavailableError(
            f"gave up after {attempts} attempts: {last}"
        ) from last
