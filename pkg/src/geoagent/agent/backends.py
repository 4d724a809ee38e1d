"""Chat backends: a scripted one for replays and tests, and an HTTP client for
OpenAI-compatible chat-completion endpoints."""

from __future__ import annotations

import threading
from typing import Protocol, Sequence

import httpx

SYSTEM_MESSAGE = "You are a GIS assistant. Solve the user's geospatial task by calling the listed tools, following the required format exactly."


class BackendError(RuntimeError):
    """The backend could not produce an utterance."""


class ChatBackend(Protocol):
    def complete(self, prompt: str, stop: Sequence[str]) -> str: ...


def apply_stop(text: str, stop: Sequence[str]) -> str:
    cut = len(text)
    for s in stop:
        if s:
            i = text.find(s)
            if 0 <= i < cut:
                cut = i
    return text[:cut]


class ScriptedBackend:
    """Returns canned utterances in order; single-run only."""

    def __init__(self, utterances: Sequence[str]):
        self.utterances = list(utterances)
        self.prompts: list[str] = []
        self._next = 0

    @property
    def remaining(self) -> int:
        return len(self.utterances) - self._next

    def complete(self, prompt: str, stop: Sequence[str] = ()) -> str:
        self.prompts.append(prompt)
        if self._next >= len(self.utterances):
            raise BackendError(f"script exhausted after {len(self.utterances)} utterances")
        text = self.utterances[self._next]
        self._next += 1
        return text


class RemoteChat:
    """POSTs ``{model, temperature, stop, messages}`` to a chat-completion endpoint.

    ``endpoint`` may be a base URL (``.../v1``) or the full
    ``.../chat/completions`` URL. Safe to share between threads.
    """

    def __init__(self, endpoint: str, token: str, model: str = "gpt-3.5-turbo", temperature: float = 0.0, client: httpx.Client | None = None, timeout: float = 60.0):
        if not endpoint:
            raise ValueError("an endpoint URL is required")
        if not token:
            raise ValueError("an auth token is required")
        if temperature < 0:
            raise ValueError("temperature must be non-negative")
        url = endpoint.rstrip("/")
        self.url = url if url.endswith("/chat/completions") else url + "/chat/completions"
        self.token = token
        self.model = model
        self.temperature = temperature
        self.client = client or httpx.Client(timeout=timeout)
        self._lock = threading.Lock()
        self.calls = 0

    def request_body(self, prompt: str, stop: Sequence[str]) -> dict:
        return {
            "model": self.model,
            "temperature": self.temperature,
            "stop": list(stop),
            "messages": [
                {"role": "system", "content": SYSTEM_MESSAGE},
                {"role": "user", "content": prompt},
            ],
        }

    def complete(self, prompt: str, stop: Sequence[str] = ()) -> str:
        headers = {"Authorization": f"Bearer {self.token}"}
        try:
            resp = self.client.post(self.url, json=self.request_body(prompt, stop), headers=headers)
            resp.raise_for_status()
            data = resp.json()
        except httpx.HTTPStatusError as exc:
            raise BackendError(f"endpoint returned HTTP {exc.response.status_code}") from exc
        except (httpx.HTTPError, ValueError) as exc:
            raise BackendError(f"request failed: {exc}") from exc
        with self._lock:
            self.calls += 1
        try:
            choice = data["choices"][0]
            text = choice["message"]["content"] if "message" in choice else choice["text"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError("malformed chat-completion response") from exc
        if not isinstance(text, str):
            raise BackendError("response content is not text")
        # some servers ignore stop sequences
        return apply_stop(text, stop)
