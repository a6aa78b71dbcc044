"""Text-generation gateways: live HTTP endpoint, scripted mock, record/replay.

All gateways expose one method, generate(request) -> GenerationResult.
Stop-sequence trimming is applied client-side as a guarantee, whatever the
server did. With the scripted mock or a replay session every downstream
pipeline is bit-reproducible and needs no network.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Protocol

import httpx

from . import jsonl
from .errors import (
    ConfigError,
    GatewayTimeout,
    ReplayMissError,
    ScriptExhaustedError,
    TransportError,
)

log = logging.getLogger(__name__)

API_KEY_ENV = "STEPRAG_API_KEY"

FINISH_STOP = "stop"
FINISH_LENGTH = "length"
FINISH_ERROR = "error"


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    stop_sequences: tuple[str, ...] = ()
    max_new_tokens: int = 256
    temperature: float = 0.0
    model: str = "default"

    def __post_init__(self):
        if self.max_new_tokens < 1:
            raise ConfigError(f"max_new_tokens must be >= 1, got {self.max_new_tokens}")
        if any(not s for s in self.stop_sequences):
            raise ConfigError("stop sequences must be non-empty strings")
        if self.temperature < 0:
            raise ConfigError(f"temperature must be >= 0, got {self.temperature}")


@dataclass(frozen=True)
class GenerationResult:
    text: str
    finish_reason: str
    latency: float = 0.0


class Gateway(Protocol):
    def generate(self, request: GenerationRequest) -> GenerationResult: ...


def request_hash(request: GenerationRequest) -> str:
    """Content hash used as the replay key; independent of call order."""
    payload = json.dumps(
        {
            "prompt": request.prompt,
            "stop": list(request.stop_sequences),
            "max_new_tokens": request.max_new_tokens,
            "temperature": request.temperature,
            "model": request.model,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def trim_at_stop(text: str, stop_sequences: tuple[str, ...]) -> tuple[str, bool]:
    """Cut at the earliest stop-sequence occurrence; returns (text, trimmed)."""
    cut = len(text)
    for stop in stop_sequences:
        pos = text.find(stop)
        if pos != -1:
            cut = min(cut, pos)
    return text[:cut], cut < len(text)


class HttpGateway:
    """Completions-style HTTP endpoint: prompt in, text out.

    Credential comes from the environment (never flags or files). Transport
    failures and timeouts are retried with exponential backoff up to the
    configured cap, then surfaced with the attempt count.
    """

    def __init__(
        self,
        base_url: str,
        model: str = "default",
        api_key_env: str = API_KEY_ENV,
        timeout: float = 60.0,
        retries: int = 3,
        backoff: float = 0.5,
        max_in_flight: int = 8,
        completions_path: str = "/v1/completions",
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.completions_path = completions_path
        self._slots = threading.Semaphore(max_in_flight)
        headers = {}
        api_key = os.environ.get(api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(timeout=timeout, headers=headers)

    def _payload(self, request: GenerationRequest) -> dict:
        return {
            "model": request.model if request.model != "default" else self.model,
            "prompt": request.prompt,
            "max_tokens": request.max_new_tokens,
            "temperature": request.temperature,
            "stop": list(request.stop_sequences) or None,
        }

    def generate(self, request: GenerationRequest) -> GenerationResult:
        url = self.base_url + self.completions_path
        started = time.monotonic()
        attempts = 0
        last_error: Exception | None = None
        timed_out = False
        with self._slots:
            while attempts <= self.retries:
                attempts += 1
                try:
                    response = self._client.post(url, json=self._payload(request))
                    if response.status_code // 100 == 2:
                        return self._parse(request, response, time.monotonic() - started)
                    last_error = TransportError(
                        f"{url} returned HTTP {response.status_code}", attempts
                    )
                except httpx.TimeoutException as exc:
                    timed_out = True
                    last_error = exc
                except httpx.HTTPError as exc:
                    timed_out = False
                    last_error = exc
                if attempts <= self.retries:
                    time.sleep(self.backoff * (2 ** (attempts - 1)))
        if timed_out:
            raise GatewayTimeout(f"timeout calling {url}: {last_error}", attempts)
        raise TransportError(f"cannot reach {url}: {last_error}", attempts)

    def _parse(self, request, response, latency) -> GenerationResult:
        body = response.json()
        if "choices" in body:
            choice = body["choices"][0]
            text = choice.get("text", "")
            finish = choice.get("finish_reason", FINISH_STOP)
        else:
            text = body.get("text", "")
            finish = body.get("finish_reason", FINISH_STOP)
        text, trimmed = trim_at_stop(text, request.stop_sequences)
        if trimmed:
            finish = FINISH_STOP
        if finish not in (FINISH_STOP, FINISH_LENGTH, FINISH_ERROR):
            finish = FINISH_STOP
        return GenerationResult(text=text, finish_reason=finish, latency=latency)


@dataclass
class ScriptEntry:
    """One canned completion. `match` is a prompt substring; None matches any
    prompt (positional use). Non-repeating entries are consumed once."""

    text: str
    match: str | None = None
    repeat: bool = False
    used: bool = field(default=False, compare=False)


class ScriptedGateway:
    """Deterministic offline gateway driven by an ordered script.

    The first live entry whose matcher hits the prompt answers the request.
    Running out of matching entries raises, never answers silently.
    """

    def __init__(self, entries: list[ScriptEntry]):
        self.entries = [replace(e) for e in entries]
        self.calls = 0
        self._lock = threading.Lock()

    @classmethod
    def from_texts(cls, texts: list[str]) -> "ScriptedGateway":
        return cls([ScriptEntry(text=t) for t in texts])

    @classmethod
    def load(cls, path: str | Path) -> "ScriptedGateway":
        entries = []
        for _, obj in jsonl.read_lines(path):
            entries.append(
                ScriptEntry(
                    text=obj["text"],
                    match=obj.get("match"),
                    repeat=bool(obj.get("repeat", False)),
                )
            )
        return cls(entries)

    def generate(self, request: GenerationRequest) -> GenerationResult:
        with self._lock:
            self.calls += 1
            for entry in self.entries:
                if entry.used and not entry.repeat:
                    continue
                if entry.match is not None and entry.match not in request.prompt:
                    continue
                entry.used = True
                text, trimmed = trim_at_stop(entry.text, request.stop_sequences)
                return GenerationResult(text=text, finish_reason=FINISH_STOP, latency=0.0)
        raise ScriptExhaustedError(
            f"no scripted entry matches request #{self.calls} "
            f"(prompt starts: {request.prompt[:80]!r})"
        )


class RecordingGateway:
    """Wraps a live gateway and appends every (request, result) to a session file."""

    def __init__(self, inner: Gateway, path: str | Path):
        self.inner = inner
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def generate(self, request: GenerationRequest) -> GenerationResult:
        result = self.inner.generate(request)
        entry = {
            "hash": request_hash(request),
            "prompt_head": request.prompt[:120],
            "text": result.text,
            "finish_reason": result.finish_reason,
        }
        with self._lock, open(self.path, "a", encoding="utf-8") as fh:
            fh.write(jsonl.dumps(entry) + "\n")
        return result


class ReplayGateway:
    """Serves recorded results by request content hash; a miss is an error."""

    def __init__(self, path: str | Path):
        self.results: dict[str, GenerationResult] = {}
        for _, obj in jsonl.read_lines(path):
            self.results[obj["hash"]] = GenerationResult(
                text=obj["text"], finish_reason=obj["finish_reason"], latency=0.0
            )

    def generate(self, request: GenerationRequest) -> GenerationResult:
        h = request_hash(request)
        try:
            return self.results[h]
        except KeyError:
            raise ReplayMissError(h, request.prompt[:80]) from None
