"""Deterministic mock backends for every external tool.

All outputs are pure functions of (input, seed): scaffold draws, docking
jitter and residue assignments come from sha256 draws, never from process
state.  The docking score is an admitted fiction — a descriptor-weighted
pseudo-score tuned so the bundled actives land near the -10 kcal/mol
regime — and is never presented as physics.  Raw payloads embed
:data:`~molforge.tools.records.RAW_SENTINEL` for leak testing.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources

from molforge.chem import ChemError, canonicalize, compute_descriptors, parse_smiles
from molforge.chem.mutate import draw_index, mutate, tokenize
from molforge.tools.errors import ToolError
from molforge.tools.records import RAW_SENTINEL
from molforge.tools.target import TargetContext

# Pseudo-score weights: aromatic rings, donors, acceptors, excess-logp
# penalty, rotatable-bond penalty.
DOCK_WEIGHTS = (2.1, 0.8, 0.55, 0.8, 0.15)
DOCK_MIN, DOCK_MAX = -15.0, -2.0

_GENERATION_MIN_TOKENS = 12
_GENERATION_MAX_TOKENS = 45

_HBOND_RESIDUES = ("GLU228", "ALA230", "GLU234", "THR211", "LYS179", "ASP274")
_HYDROPHOBIC_RESIDUES = ("LEU210", "VAL270", "MET281", "PHE161")
_SALT_BRIDGE_RESIDUE = "ASP292"
_PISTACK_RESIDUE = "TRP80"


def _fixture_text(name: str) -> str:
    return resources.files("molforge.tools.fixtures").joinpath(name).read_text()


@lru_cache(maxsize=1)
def _target_record() -> dict:
    return json.loads(_fixture_text("target_akt1.json"))


@lru_cache(maxsize=1)
def _activity_rows() -> list[tuple[str, float, str]]:
    rows = []
    for line in _fixture_text("actives_akt1.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        smiles, value, _units, label = line.split("\t")
        rows.append((smiles, float(value), label))
    return rows


@lru_cache(maxsize=1)
def generation_scaffolds() -> list[str]:
    """Drug-sized corpus lines by atom-token count (shared with the stub)."""
    text = resources.files("molforge.chem.data").joinpath("corpus_ref.smi").read_text()
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        atom_tokens = sum(
            1
            for tok in tokenize(line)
            if tok[0] == "[" or tok[0].isalpha()
        )
        if _GENERATION_MIN_TOKENS <= atom_tokens <= _GENERATION_MAX_TOKENS:
            out.append(line)
    return out


def _unit_draw(*key_parts) -> float:
    digest = hashlib.sha256("|".join(str(p) for p in key_parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") / float(1 << 64)


class MockToolBackend:
    """Offline deterministic implementations of the tool surface."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    # ------------------------------------------------------------------
    # Data retrieval
    # ------------------------------------------------------------------

    def search_uniprot(self, query: str) -> dict:
        if not query or not query.strip():
            raise ToolError("precondition", "empty query")
        record = _target_record()
        if query.strip().upper() not in {n.upper() for n in record["query_names"]}:
            raise ToolError("not-found", f"no protein record for {query!r}")
        return {
            "sentinel": RAW_SENTINEL,
            "accession": record["accession"],
            "gene": record["gene"],
            "protein_name": record["protein_name"],
            "organism": record["organism"],
            "sequence": record["sequence"],
            "function_text": record["function_text"],
            "pdb_ids": list(record["pdb_ids"]),
        }

    def get_pdb_file(self, pdb_id: str) -> dict:
        if not pdb_id or len(pdb_id.strip()) != 4:
            raise ToolError("precondition", f"pdb id must be 4 characters, got {pdb_id!r}")
        pdb_id = pdb_id.strip().upper()
        if pdb_id not in set(_target_record()["pdb_ids"]):
            raise ToolError("not-found", f"no structure {pdb_id!r} in archive")
        content = _fixture_text(f"structure_{pdb_id}.pdb")
        return {
            "sentinel": RAW_SENTINEL,
            "pdb_id": pdb_id,
            "structure_ref": f"struct:{pdb_id}",
            "size_bytes": len(content),
            "predicted": False,
        }

    def afdb_call(self, accession: str) -> dict:
        if not accession or not accession.strip():
            raise ToolError("precondition", "empty accession")
        accession = accession.strip().upper()
        if accession != _target_record()["accession"]:
            raise ToolError("not-found", f"no predicted structure for {accession!r}")
        content = _fixture_text(f"structure_{accession}_predicted.pdb")
        return {
            "sentinel": RAW_SENTINEL,
            "accession": accession,
            "structure_ref": f"struct:{accession}:predicted",
            "size_bytes": len(content),
            "predicted": True,
        }

    def search_chembl_activity(self, target: str) -> dict:
        if not target or not target.strip():
            raise ToolError("precondition", "empty target")
        record = _target_record()
        if target.strip().upper() not in {n.upper() for n in record["query_names"]}:
            raise ToolError("not-found", f"no bioactivity data for {target!r}")
        rows = _activity_rows()
        actives = [r for r in rows if r[2] == "active"]
        inactives = [r for r in rows if r[2] == "inactive"]
        # Reference binding profile: the ten most active compounds docked.
        reference = [
            {"smiles": smiles, "activity": value, "label": "reference",
             "docking": self.dock_score(smiles)}
            for smiles, value, _ in sorted(actives, key=lambda r: -r[1])[:10]
        ]
        return {
            "sentinel": RAW_SENTINEL,
            "target": record["gene"],
            "actives": [{"smiles": s, "activity": v} for s, v, _ in actives],
            "inactives": [{"smiles": s, "activity": v} for s, v, _ in inactives],
            "reference_profile": reference,
        }

    # ------------------------------------------------------------------
    # Generation / evaluation
    # ------------------------------------------------------------------

    def generate_molecules(self, sequence: str, n: int, seed: int | None = None) -> list[str]:
        if not sequence:
            raise ToolError("precondition", "empty protein sequence")
        if n < 1:
            raise ToolError("precondition", f"n must be >= 1, got {n}")
        seed = self.seed if seed is None else seed
        seq_digest = hashlib.sha256(sequence.encode()).hexdigest()[:12]
        scaffolds = generation_scaffolds()
        out = []
        for i in range(n):
            scaffold = scaffolds[draw_index(len(scaffolds), "scaffold", seed, i, seq_digest)]
            candidate = mutate(scaffold, seed=seed * 1000 + i, round_index=0)
            if draw_index(2, "second-edit", seed, i, seq_digest) == 1:
                candidate = mutate(candidate, seed=seed * 1000 + i, round_index=1)
            out.append(candidate)
        return out

    # ------------------------------------------------------------------
    # Docking / interactions
    # ------------------------------------------------------------------

    def dock_score(self, smiles: str, seed: int | None = None, jitter: bool = True) -> float:
        """Deterministic pseudo-affinity in kcal/mol (clamped to [-15, -2])."""
        try:
            mol = parse_smiles(smiles)
            canonical = canonicalize(mol)
            d = compute_descriptors(mol)
        except ChemError as exc:
            raise ToolError("precondition", f"unparseable ligand {smiles!r}: {exc}") from exc
        w1, w2, w3, w4, w5 = DOCK_WEIGHTS
        base = -(
            w1 * d.aromatic_rings
            + w2 * d.hbd
            + w3 * d.hba
            - w4 * max(0.0, d.logp - 5.0)
            - w5 * d.rot_bonds
        )
        noise = 0.0
        if jitter:
            seed = self.seed if seed is None else seed
            noise = _unit_draw("dock", seed, canonical) - 0.5
        return max(DOCK_MIN, min(DOCK_MAX, base + noise))

    def run_docking(
        self,
        structure_ref: str,
        ligands: list[str],
        box: dict | None = None,
        seed: int | None = None,
    ) -> dict:
        if not structure_ref:
            raise ToolError("precondition", "missing structure reference")
        if not ligands:
            raise ToolError("precondition", "no ligands supplied")
        seed = self.seed if seed is None else seed
        results = []
        for smiles in ligands:
            score = self.dock_score(smiles, seed=seed)
            pose = "pose:" + hashlib.sha256(
                f"{structure_ref}|{canonicalize(parse_smiles(smiles))}|{seed}".encode()
            ).hexdigest()[:12]
            results.append({"smiles": smiles, "score": round(score, 2), "pose_ref": pose})
        return {"sentinel": RAW_SENTINEL, "structure_ref": structure_ref, "results": results}

    def get_interaction_report(self, structure_ref: str, pose_ref: str, smiles: str) -> dict:
        """Rule-derived interaction list for a docked pose.

        The mock needs the ligand structure to apply its rules, so the
        SMILES rides along with the pose reference.
        """
        if not pose_ref or not pose_ref.startswith("pose:"):
            raise ToolError("not-found", f"unknown pose {pose_ref!r}")
        try:
            mol = parse_smiles(smiles)
            d = compute_descriptors(mol)
        except ChemError as exc:
            raise ToolError("precondition", f"unparseable ligand: {exc}") from exc
        interactions = []
        for k in range(d.hbd):
            residue = _HBOND_RESIDUES[
                draw_index(len(_HBOND_RESIDUES), "hbond", pose_ref, k)
            ]
            distance = 2.6 + 0.8 * _unit_draw("hbond-d", pose_ref, k)
            interactions.append(
                {"type": "hbond", "residue": residue, "distance": round(distance, 2)}
            )
        for k in range(d.aromatic_rings):
            residue = _HYDROPHOBIC_RESIDUES[
                draw_index(len(_HYDROPHOBIC_RESIDUES), "phobic", pose_ref, k)
            ]
            distance = 3.4 + 0.8 * _unit_draw("phobic-d", pose_ref, k)
            interactions.append(
                {"type": "hydrophobic", "residue": residue, "distance": round(distance, 2)}
            )
        if any(a.formal_charge != 0 for a in mol.atoms):
            distance = 2.9 + 0.6 * _unit_draw("salt-d", pose_ref)
            interactions.append(
                {"type": "saltbridge", "residue": _SALT_BRIDGE_RESIDUE, "distance": round(distance, 2)}
            )
        if d.aromatic_rings >= 2:
            distance = 3.6 + 0.6 * _unit_draw("pistack-d", pose_ref)
            interactions.append(
                {"type": "pistack", "residue": _PISTACK_RESIDUE, "distance": round(distance, 2)}
            )
        return {"sentinel": RAW_SENTINEL, "pose_ref": pose_ref, "interactions": interactions}

    # ------------------------------------------------------------------
    # Context assembly helper used by the orchestrator's database turn.
    # ------------------------------------------------------------------

    def assemble_target(self, query: str, pdb_id: str | None = None) -> TargetContext:
        meta = self.search_uniprot(query)
        ctx = TargetContext(
            uniprot_accession=meta["accession"],
            gene=meta["gene"],
            protein_name=meta["protein_name"],
            protein_sequence=meta["sequence"],
        )
        ctx.validate_sequence()
        wanted = pdb_id or (meta["pdb_ids"][0] if meta["pdb_ids"] else "")
        try:
            structure = self.get_pdb_file(wanted)
            ctx.pdb_id = structure["pdb_id"]
            ctx.structure_ref = structure["structure_ref"]
            ctx.structure_predicted = False
        except ToolError as exc:
            if exc.kind != "not-found":
                raise
            predicted = self.afdb_call(meta["accession"])
            ctx.structure_ref = predicted["structure_ref"]
            ctx.structure_predicted = True
        activity = self.search_chembl_activity(query)
        ctx.actives = [(r["smiles"], r["activity"], "active") for r in activity["actives"]]
        ctx.inactives = [
            (r["smiles"], r["activity"], "inactive") for r in activity["inactives"]
        ]
        return ctx
