"""Minimal stateless HTTP service for the two tool wire contracts.

    POST /generate  {"sequence": str, "n": int, "seed": int}
                    -> {"smiles": [str]}
    POST /plip      {"receptor_ref": str, "pose_ref": str}
                    -> {"interactions": [{"type", "residue", "distance"}]}
    GET  /healthz   -> 200 {"status": "ok"}

Schema violations return 400 {"error": ...}; a sequence outside the
amino-acid alphabet returns 422.  Handlers are pure functions of the
request plus the server seed, so concurrent requests are independent.
"""

from __future__ import annotations

import argparse
import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from toolserver.generator import AMINO_ALPHABET, generate
from toolserver.interactions import profile


class StubError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def handle_generate(payload: dict, server_seed: int) -> dict:
    sequence = payload.get("sequence")
    n = payload.get("n")
    seed = payload.get("seed", server_seed)
    if not isinstance(sequence, str) or not sequence:
        raise StubError(400, "sequence must be a nonempty string")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise StubError(400, "n must be a positive integer")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise StubError(400, "seed must be an integer")
    bad = set(sequence.upper()) - AMINO_ALPHABET
    if bad:
        raise StubError(422, f"sequence contains non-amino characters: {sorted(bad)}")
    return {"smiles": generate(sequence.upper(), n, seed)}


def handle_plip(payload: dict, server_seed: int) -> dict:
    receptor = payload.get("receptor_ref")
    pose = payload.get("pose_ref")
    if not isinstance(receptor, str) or not receptor:
        raise StubError(400, "receptor_ref must be a nonempty string")
    if not isinstance(pose, str) or not pose:
        raise StubError(400, "pose_ref must be a nonempty string")
    return {"interactions": profile(receptor, pose)}


class _Handler(BaseHTTPRequestHandler):
    server_version = "toolserver/0.1"

    def _send(self, status: int, payload: dict) -> None:
        raw = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def do_GET(self):
        if self.path == "/healthz":
            self._send(200, {"status": "ok"})
        else:
            self._send(404, {"error": f"unknown path {self.path}"})

    def do_POST(self):
        try:
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length)) if length else {}
            if not isinstance(payload, dict):
                raise StubError(400, "request body must be a JSON object")
        except (ValueError, json.JSONDecodeError):
            self._send(400, {"error": "malformed JSON body"})
            return
        try:
            if self.path == "/generate":
                self._send(200, handle_generate(payload, self.server.stub_seed))
            elif self.path == "/plip":
                self._send(200, handle_plip(payload, self.server.stub_seed))
            else:
                self._send(404, {"error": f"unknown path {self.path}"})
        except StubError as exc:
            self._send(exc.status, {"error": str(exc)})

    def log_message(self, *args):  # quiet by default
        pass


class StubServer(ThreadingHTTPServer):
    stub_seed = 0


def serve(port: int = 8742, seed: int = 0) -> StubServer:
    """Bind and return the server (caller drives serve_forever)."""
    server = StubServer(("127.0.0.1", port), _Handler)
    server.stub_seed = seed
    return server


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="toolserver", description=__doc__)
    parser.add_argument("--port", type=int, default=8742)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    server = serve(args.port, args.seed)
    print(f"toolserver listening on 127.0.0.1:{server.server_address[1]} (seed {args.seed})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
