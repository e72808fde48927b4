"""Live adapter wire contracts: docking subprocess and tool-server HTTP."""

import json
import os
import stat
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from molforge.tools.errors import ToolError
from molforge.tools.live import LiveEndpoints, LiveToolBackend, run_docking_subprocess

BOX = {
    "center_x": 1.0, "center_y": 2.0, "center_z": 3.0,
    "size_x": 20.0, "size_y": 20.0, "size_z": 20.0,
    "exhaustiveness": 4,
}


def fake_docking_exe(tmp_path, stdout_body, exit_code=0):
    path = tmp_path / "fake-vina"
    script = "#!/bin/sh\n"
    if exit_code:
        script += f"echo 'boom' >&2\nexit {exit_code}\n"
    else:
        script += f"cat <<'EOF'\n{stdout_body}\nEOF\n"
    path.write_text(script)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


VINA_STDOUT = """\
Performing docking (random seed: -12345)
mode |   affinity | dist from best mode
     | (kcal/mol) | rmsd l.b.| rmsd u.b.
-----+------------+----------+----------
   1       -9.724          0          0
   2       -9.101      1.502      2.118
   3       -8.553      2.009      5.312
"""


def test_subprocess_parses_best_mode_affinity(tmp_path):
    exe = fake_docking_exe(tmp_path, VINA_STDOUT)
    score = run_docking_subprocess(exe, "receptor.pdbqt", "ligand.pdbqt", BOX)
    assert score == pytest.approx(-9.724)


def test_subprocess_passes_box_arguments(tmp_path):
    exe = tmp_path / "argdump"
    out = tmp_path / "args.txt"
    exe.write_text(f"#!/bin/sh\necho \"$@\" > {out}\nprintf '   1   -7.5   0   0\\n'\n")
    exe.chmod(exe.stat().st_mode | stat.S_IEXEC)
    run_docking_subprocess(str(exe), "rec", "lig", BOX)
    args = out.read_text()
    for token in ("--receptor rec", "--ligand lig", "--center_x 1.0", "--size_x 20.0",
                  "--exhaustiveness 4"):
        assert token in args


def test_subprocess_missing_executable():
    with pytest.raises(ToolError) as err:
        run_docking_subprocess("/nonexistent/vina", "r", "l", BOX)
    assert err.value.kind == "backend"


def test_subprocess_nonzero_exit(tmp_path):
    exe = fake_docking_exe(tmp_path, "", exit_code=3)
    with pytest.raises(ToolError) as err:
        run_docking_subprocess(exe, "r", "l", BOX)
    assert err.value.kind == "backend"


def test_subprocess_unparseable_output(tmp_path):
    exe = fake_docking_exe(tmp_path, "no table here")
    with pytest.raises(ToolError) as err:
        run_docking_subprocess(exe, "r", "l", BOX)
    assert err.value.kind == "parse"


# ---------------------------------------------------------------------------
# Tool-server HTTP contract from the consumer side
# ---------------------------------------------------------------------------


class _ToolServerHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length))
        if self.path == "/generate":
            if payload.get("n", 0) < 1:
                self._send(400, {"error": "n must be positive"})
                return
            self._send(200, {"smiles": ["CCO"] * payload["n"]})
        elif self.path == "/plip":
            self._send(
                200,
                {"interactions": [{"type": "hbond", "residue": "GLU228", "distance": 2.9}]},
            )
        else:
            self._send(404, {"error": "nope"})

    def _send(self, status, payload):
        raw = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


@pytest.fixture()
def toolserver_url():
    server = HTTPServer(("127.0.0.1", 0), _ToolServerHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def test_live_generate_roundtrip(toolserver_url):
    backend = LiveToolBackend(LiveEndpoints(toolserver=toolserver_url))
    smiles = backend.generate_molecules("MKAV", 3, seed=1)
    assert smiles == ["CCO", "CCO", "CCO"]


def test_live_generate_client_precondition(toolserver_url):
    backend = LiveToolBackend(LiveEndpoints(toolserver=toolserver_url))
    with pytest.raises(ToolError) as err:
        backend.generate_molecules("MKAV", 0)
    assert err.value.kind == "precondition"


def test_http_400_surfaces_as_tool_error(toolserver_url):
    from molforge.tools.live import http_request

    with pytest.raises(ToolError) as err:
        http_request(f"{toolserver_url}/generate", payload={"sequence": "MK", "n": 0})
    assert err.value.kind == "backend"
    assert "400" in str(err.value)


def test_live_interaction_report_roundtrip(toolserver_url):
    backend = LiveToolBackend(LiveEndpoints(toolserver=toolserver_url))
    report = backend.get_interaction_report("struct:X", "pose:Y")
    assert report["interactions"][0]["residue"] == "GLU228"


def test_live_ligand_prep_required():
    backend = LiveToolBackend(LiveEndpoints())
    with pytest.raises(ToolError) as err:
        backend.run_docking("struct:X", ["CCO"])
    assert "ligand_prep_cmd" in str(err.value)
