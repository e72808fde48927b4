"""Live adapters: REST services, the docking executable, the tool server.

These define the wire contracts only; desk-scale runs never touch them.
All HTTP goes through one throttled, retrying helper (3 attempts,
exponential backoff with jitter, per-host minimum spacing).  The docking
adapter shells out to a configured executable and parses the best-mode
affinity from the first results-table row; 3D ligand preparation is
delegated to a configured external prep command.
"""

from __future__ import annotations

import json
import random
import re
import subprocess
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from urllib.parse import urlparse

from molforge.tools.errors import ToolError

RETRY_ATTEMPTS = 3
RETRY_BASE_DELAY = 0.5
HOST_MIN_INTERVAL = 0.2
REQUEST_TIMEOUT = 30.0


@dataclass(slots=True)
class LiveEndpoints:
    protein_api: str = "https://rest.uniprot.org"
    structure_api: str = "https://files.rcsb.org"
    predicted_api: str = "https://alphafold.ebi.ac.uk"
    bioactivity_api: str = "https://www.ebi.ac.uk/chembl/api/data"
    toolserver: str = "http://127.0.0.1:8742"
    docking_exe: str = "vina"
    ligand_prep_cmd: str = ""
    docking_box: dict = field(
        default_factory=lambda: {
            "center_x": 0.0, "center_y": 0.0, "center_z": 0.0,
            "size_x": 22.0, "size_y": 22.0, "size_z": 22.0,
            "exhaustiveness": 8,
        }
    )


class _Throttle:
    def __init__(self, min_interval: float = HOST_MIN_INTERVAL):
        self.min_interval = min_interval
        self._last: dict[str, float] = {}

    def wait(self, url: str) -> None:
        host = urlparse(url).netloc
        now = time.monotonic()
        previous = self._last.get(host, 0.0)
        delta = now - previous
        if delta < self.min_interval:
            time.sleep(self.min_interval - delta)
        self._last[host] = time.monotonic()


_throttle = _Throttle()


def http_request(
    url: str,
    payload: dict | None = None,
    headers: dict | None = None,
    timeout: float = REQUEST_TIMEOUT,
    attempts: int = RETRY_ATTEMPTS,
    rng: random.Random | None = None,
) -> bytes:
    """GET (payload None) or JSON POST with bounded retries and backoff."""
    rng = rng or random.Random()
    body = None
    final_headers = {"Accept": "application/json"}
    if payload is not None:
        body = json.dumps(payload).encode()
        final_headers["Content-Type"] = "application/json"
    final_headers.update(headers or {})
    last_error: Exception | None = None
    for attempt in range(attempts):
        _throttle.wait(url)
        request = urllib.request.Request(url, data=body, headers=final_headers)
        try:
            with urllib.request.urlopen(request, timeout=timeout) as response:
                return response.read()
        except urllib.error.HTTPError as exc:
            if exc.code in (408, 429, 500, 502, 503, 504) and attempt < attempts - 1:
                last_error = exc
            else:
                detail = ""
                try:
                    detail = exc.read().decode(errors="replace")[:300]
                except Exception:
                    pass
                raise ToolError("backend", f"HTTP {exc.code} from {url}: {detail}") from exc
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            last_error = exc
        if attempt < attempts - 1:
            delay = RETRY_BASE_DELAY * (2**attempt) * (1.0 + rng.random() * 0.25)
            time.sleep(delay)
    raise ToolError("backend", f"exhausted {attempts} attempts against {url}: {last_error}")


class LiveToolBackend:
    """Same call surface as the mock backend, served by real endpoints."""

    def __init__(self, endpoints: LiveEndpoints | None = None, seed: int = 0):
        self.endpoints = endpoints or LiveEndpoints()
        self.seed = seed
        self._poses: dict[str, dict] = {}

    # -- data retrieval ------------------------------------------------

    def search_uniprot(self, query: str) -> dict:
        if not query or not query.strip():
            raise ToolError("precondition", "empty query")
        base = self.endpoints.protein_api
        url = (
            f"{base}/uniprotkb/search?query=gene:{query}+AND+organism_id:9606"
            "&format=json&size=1&fields=accession,gene_primary,protein_name,sequence,xref_pdb"
        )
        data = json.loads(http_request(url))
        results = data.get("results", [])
        if not results:
            raise ToolError("not-found", f"no protein record for {query!r}")
        row = results[0]
        pdb_ids = [
            xref.get("id")
            for xref in row.get("uniProtKBCrossReferences", [])
            if xref.get("database") == "PDB"
        ]
        return {
            "accession": row.get("primaryAccession", ""),
            "gene": query.upper(),
            "protein_name": (
                row.get("proteinDescription", {})
                .get("recommendedName", {})
                .get("fullName", {})
                .get("value", "")
            ),
            "organism": "Homo sapiens",
            "sequence": row.get("sequence", {}).get("value", ""),
            "function_text": "",
            "pdb_ids": [p for p in pdb_ids if p],
        }

    def get_pdb_file(self, pdb_id: str) -> dict:
        if not pdb_id or len(pdb_id.strip()) != 4:
            raise ToolError("precondition", f"pdb id must be 4 characters, got {pdb_id!r}")
        pdb_id = pdb_id.strip().upper()
        url = f"{self.endpoints.structure_api}/download/{pdb_id}.pdb"
        try:
            content = http_request(url)
        except ToolError as exc:
            raise ToolError("not-found", f"structure {pdb_id!r} unavailable: {exc}") from exc
        return {
            "pdb_id": pdb_id,
            "structure_ref": f"struct:{pdb_id}",
            "size_bytes": len(content),
            "predicted": False,
        }

    def afdb_call(self, accession: str) -> dict:
        if not accession or not accession.strip():
            raise ToolError("precondition", "empty accession")
        accession = accession.strip().upper()
        url = f"{self.endpoints.predicted_api}/api/prediction/{accession}"
        rows = json.loads(http_request(url))
        if not rows:
            raise ToolError("not-found", f"no predicted structure for {accession!r}")
        return {
            "accession": accession,
            "structure_ref": f"struct:{accession}:predicted",
            "size_bytes": int(rows[0].get("pdbUrl") is not None),
            "predicted": True,
        }

    def search_chembl_activity(self, target: str) -> dict:
        if not target or not target.strip():
            raise ToolError("precondition", "empty target")
        base = self.endpoints.bioactivity_api
        url = (
            f"{base}/activity.json?target_pref_name__iexact={target}"
            "&standard_type=IC50&limit=200"
        )
        data = json.loads(http_request(url))
        activities = data.get("activities", [])
        if not activities:
            raise ToolError("not-found", f"no bioactivity data for {target!r}")
        actives, inactives = [], []
        for row in activities:
            smiles = row.get("canonical_smiles")
            pchembl = row.get("pchembl_value")
            if not smiles or pchembl is None:
                continue
            bucket = actives if float(pchembl) >= 6.0 else inactives
            bucket.append({"smiles": smiles, "activity": float(pchembl)})
        reference = [
            {**row, "label": "reference"}
            for row in sorted(actives, key=lambda r: -r["activity"])[:10]
        ]
        return {
            "target": target.upper(),
            "actives": actives,
            "inactives": inactives,
            "reference_profile": reference,
        }

    # -- generation / interactions via the tool server ------------------

    def generate_molecules(self, sequence: str, n: int, seed: int | None = None) -> list[str]:
        if not sequence:
            raise ToolError("precondition", "empty protein sequence")
        if n < 1:
            raise ToolError("precondition", f"n must be >= 1, got {n}")
        url = f"{self.endpoints.toolserver}/generate"
        payload = {"sequence": sequence, "n": n, "seed": self.seed if seed is None else seed}
        data = json.loads(http_request(url, payload=payload))
        smiles = data.get("smiles")
        if not isinstance(smiles, list):
            raise ToolError("parse", f"malformed generator response: {data!r}")
        return smiles

    def get_interaction_report(self, structure_ref: str, pose_ref: str, smiles: str = "") -> dict:
        url = f"{self.endpoints.toolserver}/plip"
        payload = {"receptor_ref": structure_ref, "pose_ref": pose_ref}
        data = json.loads(http_request(url, payload=payload))
        if "interactions" not in data:
            raise ToolError("parse", f"malformed interaction response: {data!r}")
        return {"pose_ref": pose_ref, "interactions": data["interactions"]}

    # -- docking subprocess ---------------------------------------------

    def run_docking(
        self,
        structure_ref: str,
        ligands: list[str],
        box: dict | None = None,
        seed: int | None = None,
    ) -> dict:
        if not ligands:
            raise ToolError("precondition", "no ligands supplied")
        box = box or self.endpoints.docking_box
        results = []
        for smiles in ligands:
            ligand_file = self._prepare_ligand(smiles)
            score = run_docking_subprocess(
                self.endpoints.docking_exe, structure_ref, ligand_file, box
            )
            results.append(
                {"smiles": smiles, "score": score, "pose_ref": f"pose:{structure_ref}:{smiles}"}
            )
        return {"structure_ref": structure_ref, "results": results}

    def _prepare_ligand(self, smiles: str) -> str:
        if not self.endpoints.ligand_prep_cmd:
            raise ToolError(
                "precondition",
                "ligand_prep_cmd not configured (3D preparation is delegated to an external tool)",
            )
        proc = subprocess.run(
            [*self.endpoints.ligand_prep_cmd.split(), smiles],
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            raise ToolError("backend", f"ligand preparation failed: {proc.stderr[:200]}")
        return proc.stdout.strip()


_AFFINITY_ROW = re.compile(r"^\s*1\s+(-?\d+(?:\.\d+)?)\s", re.MULTILINE)


def run_docking_subprocess(exe: str, receptor_file: str, ligand_file: str, box: dict) -> float:
    """Invoke the docking executable and parse the best-mode affinity.

    Contract: ``<exe> --receptor <file> --ligand <file> --center_x ..
    --size_x .. --exhaustiveness <n>``; affinity read from the first
    results-table row of standard output.
    """
    argv = [
        exe,
        "--receptor", receptor_file,
        "--ligand", ligand_file,
        "--center_x", str(box["center_x"]),
        "--center_y", str(box["center_y"]),
        "--center_z", str(box["center_z"]),
        "--size_x", str(box["size_x"]),
        "--size_y", str(box["size_y"]),
        "--size_z", str(box["size_z"]),
        "--exhaustiveness", str(box.get("exhaustiveness", 8)),
    ]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=600)
    except FileNotFoundError as exc:
        raise ToolError("backend", f"docking executable not found: {exe!r}") from exc
    except subprocess.TimeoutExpired as exc:
        raise ToolError("backend", f"docking timed out: {exe!r}") from exc
    if proc.returncode != 0:
        raise ToolError("backend", f"docking failed: {proc.stderr[:300]}")
    match = _AFFINITY_ROW.search(proc.stdout)
    if match is None:
        raise ToolError("parse", "no affinity row found in docking output")
    return float(match.group(1))
