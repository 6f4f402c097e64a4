"""Backend-agnostic chat-completion client: JSON-over-HTTP (bearer auth,
chat-completions wire shape) plus a deterministic offline mock."""

from __future__ import annotations

import json
import os
import re
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field

ENV_ENDPOINT = "DUANZAI_LLM_ENDPOINT"
ENV_API_KEY = "DUANZAI_LLM_API_KEY"
ENV_MODEL = "DUANZAI_LLM_MODEL"

VALID_ROLES = {"system", "user", "assistant"}


class GatewayError(RuntimeError):
    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[tuple[str, str], ...]
    model_name: str = ""
    temperature: float = 0.0
    max_tokens: int = 512
    timeout: float = 30.0

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        for role, _ in self.messages:
            if role not in VALID_ROLES:
                raise ValueError(f"invalid role {role!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    backend: str
    latency: float
    token_usage: dict | None = None


_CLUE_RE = re.compile(r"「([^」]*)」")


class MockBackend:
    """Pure function of the request; lets the whole pipeline run offline.

    Echoes the first two 「...」-bracketed clue strings of the final user
    message, or a fixed no-clue reply when fewer than two are present.
    """

    name = "mock"

    def complete(self, request: CompletionRequest) -> CompletionResult:
        final_user = ""
        for role, content in reversed(request.messages):
            if role == "user":
                final_user = content
                break
        clues = _CLUE_RE.findall(final_user)
        if len(clues) >= 2:
            text = f"【解读】谐音「{clues[0]}」指「{clues[1]}」。(mock)"
        else:
            text = "【解读】(无提示) (mock)"
        return CompletionResult(text=text, backend=self.name, latency=0.0)


class HttpBackend:
    """POSTs the widely used chat-completions JSON shape to any endpoint.

    Endpoint/credential/model come from the environment unless given
    explicitly. Transient failures (timeouts, connection errors, 5xx and
    429) are retried with exponential backoff.
    """

    name = "http"

    def __init__(self, endpoint: str | None = None, api_key: str | None = None,
                 model: str | None = None, max_retries: int = 2,
                 backoff: float = 0.5):
        self.endpoint = endpoint or os.environ.get(ENV_ENDPOINT, "")
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY, "")
        self.model = model or os.environ.get(ENV_MODEL, "")
        self.max_retries = max_retries
        self.backoff = backoff
        if not self.endpoint:
            raise GatewayError(
                f"http backend needs an endpoint; set {ENV_ENDPOINT}")

    def _attempt(self, request: CompletionRequest) -> CompletionResult:
        payload = {
            "model": request.model_name or self.model,
            "messages": [
                {"role": role, "content": content}
                for role, content in request.messages
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(
            self.endpoint, data=json.dumps(payload).encode("utf-8"),
            headers=headers, method="POST")
        start = time.monotonic()
        with urllib.request.urlopen(req, timeout=request.timeout) as resp:
            body = resp.read().decode("utf-8")
        latency = time.monotonic() - start
        try:
            obj = json.loads(body)
            text = obj["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
            raise GatewayError(
                f"malformed completion response: {body[:200]!r}") from exc
        if not isinstance(text, str):
            raise GatewayError("completion response has non-text content")
        return CompletionResult(
            text=text, backend=self.name, latency=latency,
            token_usage=obj.get("usage"))

    def complete(self, request: CompletionRequest) -> CompletionResult:
        last: GatewayError | None = None
        for attempt in range(self.max_retries + 1):
            try:
                return self._attempt(request)
            except urllib.error.HTTPError as exc:
                body = exc.read().decode("utf-8", "replace")[:200]
                err = GatewayError(
                    f"completion endpoint returned HTTP {exc.code}: {body}",
                    status=exc.code)
                if exc.code not in (429,) and exc.code < 500:
                    raise err from exc
                last = err
            except (urllib.error.URLError, TimeoutError, OSError) as exc:
                last = GatewayError(f"completion request failed: {exc}")
            if attempt < self.max_retries:
                time.sleep(self.backoff * (2 ** attempt))
        assert last is not None
        raise last


def make_backend(name: str, **kwargs):
    if name == "mock":
        return MockBackend()
    if name == "http":
        return HttpBackend(**kwargs)
    raise GatewayError(f"unknown backend {name!r}; expected 'mock' or 'http'")


def complete(request: CompletionRequest, backend) -> CompletionResult:
    return backend.complete(request)
