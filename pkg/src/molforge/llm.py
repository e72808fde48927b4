"""Language-model client layer: scripted, policy and live backends.

Every backend answers :class:`LlmRequest` -> :class:`LlmResponse`.  The
scripted file backend is a pure lookup on (role, cycle, round); the
deterministic policy backend (see ``molforge.orchestrator.policy``) is a
pure function of the request content and campaign seed; the live backend
speaks the chat-completion JSON wire contract with bounded retries.
"""

from __future__ import annotations

import json
import os
import random
import time
import urllib.error
import urllib.request
from dataclasses import dataclass

DEFAULT_TEMPERATURE = 0.7
LIVE_ATTEMPTS = 3
LIVE_TIMEOUT = 60.0

ENV_URL = "MOLFORGE_LLM_URL"
ENV_KEY = "MOLFORGE_LLM_KEY"


class LlmError(RuntimeError):
    pass


class ScriptMissError(LlmError):
    def __init__(self, role: str, cycle: int, turn: int):
        super().__init__(f"no scripted response for (role={role!r}, cycle={cycle}, turn={turn})")
        self.role = role
        self.cycle = cycle
        self.turn = turn


@dataclass(slots=True)
class LlmRequest:
    model: str
    messages: list[tuple[str, str]]
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = 2048
    # Routing metadata for deterministic backends.
    agent_role: str = ""
    cycle: int = 0
    turn: int = 0

    def digest_text(self) -> str:
        return json.dumps(
            {"messages": self.messages, "role": self.agent_role, "cycle": self.cycle, "turn": self.turn},
            sort_keys=True,
        )


@dataclass(slots=True)
class LlmResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency: float = 0.0


class ScriptFileBackend:
    """Static lookup backend: JSON array of {role, cycle, turn, response}."""

    def __init__(self, records: list[dict]):
        self._table: dict[tuple[str, int, int], str] = {}
        for row in records:
            key = (row["role"], int(row["cycle"]), int(row["turn"]))
            self._table[key] = row["response"]

    @classmethod
    def from_path(cls, path) -> "ScriptFileBackend":
        with open(path) as handle:
            return cls(json.load(handle))

    def complete(self, request: LlmRequest) -> LlmResponse:
        key = (request.agent_role, request.cycle, request.turn)
        if key not in self._table:
            raise ScriptMissError(*key)
        return LlmResponse(text=self._table[key])


class LiveChatBackend:
    """Chat-completion JSON over HTTP(S) with bounded retries."""

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        model: str = "",
        attempts: int = LIVE_ATTEMPTS,
        timeout: float = LIVE_TIMEOUT,
        rng: random.Random | None = None,
    ):
        self.endpoint = (endpoint or os.environ.get(ENV_URL, "")).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_KEY, "")
        self.model = model
        self.attempts = attempts
        self.timeout = timeout
        self.rng = rng or random.Random()
        if not self.endpoint:
            raise LlmError(f"no live endpoint configured (set {ENV_URL})")

    def complete(self, request: LlmRequest) -> LlmResponse:
        payload = {
            "model": request.model or self.model,
            "messages": [{"role": role, "content": text} for role, text in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        body = json.dumps(payload).encode()
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        url = f"{self.endpoint}/chat/completions"
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            started = time.monotonic()
            req = urllib.request.Request(url, data=body, headers=headers)
            try:
                with urllib.request.urlopen(req, timeout=self.timeout) as response:
                    data = json.loads(response.read())
                choice = data["choices"][0]["message"]["content"]
                usage = data.get("usage", {})
                return LlmResponse(
                    text=choice,
                    prompt_tokens=int(usage.get("prompt_tokens", 0)),
                    completion_tokens=int(usage.get("completion_tokens", 0)),
                    latency=time.monotonic() - started,
                )
            except urllib.error.HTTPError as exc:
                if exc.code in (408, 429, 500, 502, 503, 504) and attempt < self.attempts - 1:
                    last_error = exc
                else:
                    raise LlmError(f"chat endpoint returned HTTP {exc.code}") from exc
            except (urllib.error.URLError, TimeoutError, OSError, KeyError, json.JSONDecodeError) as exc:
                last_error = exc
            if attempt < self.attempts - 1:
                delay = 0.25 * (2**attempt) * (1.0 + self.rng.random() * 0.25)
                time.sleep(delay)
        raise LlmError(f"exhausted {self.attempts} attempts against {url}: {last_error}")
