"""Completion backends for the editor.

ScriptedBackend replays ordered fixtures and fails loudly on any
mismatch, exhaustion, or leftover fixture, so tests cannot silently
drift from the prompts they claim to answer. HttpModelBackend talks to
a single-turn completion endpoint.
"""

from __future__ import annotations

import json
import os
from collections import deque

from .errors import BackendError

TOKEN_ENV = "POSECODEC_LLM_TOKEN"


class ScriptedBackend:
    """Ordered (expected-prompt-substring, response) fixtures."""

    def __init__(self, fixtures):
        self._queue = deque()
        for i, item in enumerate(fixtures):
            if len(item) != 2:
                raise BackendError(f"fixture {i} must be (expect, response), got {item!r}")
            self._queue.append((str(item[0]), str(item[1])))
        self.transcript = []

    def complete(self, prompt: str) -> str:
        if not self._queue:
            raise BackendError(
                "scripted fixtures exhausted; unexpected prompt starting "
                f"{prompt[:120]!r}"
            )
        expect, response = self._queue.popleft()
        if expect and expect not in prompt:
            raise BackendError(
                f"prompt does not contain expected fixture text {expect[:120]!r}; "
                f"prompt starts {prompt[:120]!r}"
            )
        self.transcript.append((prompt, response))
        return response

    @property
    def remaining(self) -> int:
        return len(self._queue)

    def assert_exhausted(self) -> None:
        if self._queue:
            raise BackendError(f"{len(self._queue)} scripted fixtures left unconsumed")


def load_fixtures(path) -> list:
    """JSON fixture file: list of {"expect": ..., "response": ...}."""
    with open(path, "r", encoding="utf-8") as f:
        records = json.load(f)
    if not isinstance(records, list):
        raise BackendError(f"fixture file {path} must hold a JSON list")
    out = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or "response" not in rec:
            raise BackendError(f"fixture {i} needs at least a 'response' field")
        out.append((rec.get("expect", ""), rec["response"]))
    return out


class HttpModelBackend:
    """Single-turn completion over HTTPS.

    Request: POST {url} with JSON {model, prompt, max_tokens};
    response JSON must carry "text". Bearer token read from
    POSECODEC_LLM_TOKEN when set. One retry on timeout.
    """

    def __init__(self, url: str, model: str = "default", max_tokens: int = 1024,
                 timeout: float = 60.0, retries: int = 1):
        self.url = url
        self.model = model
        self.max_tokens = max_tokens
        self.timeout = timeout
        self.retries = retries

    def complete(self, prompt: str) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        token = os.environ.get(TOKEN_ENV)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        body = {"model": self.model, "prompt": prompt, "max_tokens": self.max_tokens}
        last = None
        for _ in range(self.retries + 1):
            try:
                resp = requests.post(self.url, json=body, headers=headers,
                                     timeout=self.timeout)
            except requests.Timeout as exc:
                last = exc
                continue
            if resp.status_code != 200:
                raise BackendError(
                    f"completion endpoint returned {resp.status_code}: {resp.text[:200]}"
                )
            try:
                payload = resp.json()
            except ValueError:
                raise BackendError("completion endpoint returned non-JSON body") from None
            if "text" not in payload:
                raise BackendError("completion response missing 'text' field")
            return str(payload["text"])
        raise BackendError(f"completion endpoint timed out after retries: {last}")
