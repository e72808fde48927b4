"""LLM client backends: scripted lookup and live retry behavior."""

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from molforge.llm import (
    LiveChatBackend,
    LlmError,
    LlmRequest,
    ScriptFileBackend,
    ScriptMissError,
)


def request_for(role="Database", cycle=1, turn=0):
    return LlmRequest(
        model="m", messages=[("user", "hi")], agent_role=role, cycle=cycle, turn=turn
    )


def test_script_lookup_hit():
    backend = ScriptFileBackend(
        [{"role": "Database", "cycle": 1, "turn": 0, "response": "canned"}]
    )
    assert backend.complete(request_for()).text == "canned"


def test_script_lookup_miss_names_key():
    backend = ScriptFileBackend([])
    with pytest.raises(ScriptMissError) as err:
        backend.complete(request_for(role="Ranking", cycle=2, turn=1))
    message = str(err.value)
    assert "Ranking" in message and "cycle=2" in message and "turn=1" in message


def test_script_file_round_trip(tmp_path):
    path = tmp_path / "script.json"
    path.write_text(json.dumps([{"role": "Solo", "cycle": 3, "turn": 0, "response": "done"}]))
    backend = ScriptFileBackend.from_path(path)
    assert backend.complete(request_for(role="Solo", cycle=3)).text == "done"


class _FlakyHandler(BaseHTTPRequestHandler):
    attempts = 0

    def do_POST(self):
        type(self).attempts += 1
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        if type(self).attempts <= 2:
            self.send_response(429)
            self.end_headers()
            return
        payload = {
            "choices": [{"message": {"content": f"echo:{body['messages'][-1]['content']}"}}],
            "usage": {"prompt_tokens": 5, "completion_tokens": 2},
        }
        raw = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


@pytest.fixture()
def flaky_server():
    _FlakyHandler.attempts = 0
    server = HTTPServer(("127.0.0.1", 0), _FlakyHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def test_live_backend_retries_through_429(flaky_server):
    backend = LiveChatBackend(endpoint=flaky_server, api_key="k", model="test")
    response = backend.complete(request_for())
    assert response.text == "echo:hi"
    assert _FlakyHandler.attempts == 3
    assert response.prompt_tokens == 5


def test_live_backend_exhausts_retries(flaky_server):
    backend = LiveChatBackend(endpoint=flaky_server, api_key="k", model="test", attempts=2)
    with pytest.raises(LlmError):
        backend.complete(request_for())


def test_live_backend_requires_endpoint(monkeypatch):
    monkeypatch.delenv("MOLFORGE_LLM_URL", raising=False)
    with pytest.raises(LlmError):
        LiveChatBackend()


def test_live_backend_reads_environment(monkeypatch):
    monkeypatch.setenv("MOLFORGE_LLM_URL", "http://example.invalid")
    monkeypatch.setenv("MOLFORGE_LLM_KEY", "secret")
    backend = LiveChatBackend()
    assert backend.endpoint == "http://example.invalid"
    assert backend.api_key == "secret"
