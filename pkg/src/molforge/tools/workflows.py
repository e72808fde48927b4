"""Composite workflows chaining the atomic tools.

``vina_mol_gen``: generate from the target sequence, filter on drug-like
gates, dock survivors, profile interactions of the docked poses.
``vina_report``: evaluate a user-provided SMILES list; invalid entries
become per-item errors, never workflow failures.

Both return (raw payload, child step records) so the registry can emit
one workflow record plus one child record per step.
"""

from __future__ import annotations

from molforge.chem import ChemError, compute_descriptors, parse_smiles
from molforge.tools.errors import ToolError
from molforge.tools.records import RAW_SENTINEL

DEFAULT_FILTERS = {"qed_min": 0.3, "sa_max": 6.0, "ro5_max_violations": 1}


def _descriptor_row(smiles: str) -> dict:
    d = compute_descriptors(parse_smiles(smiles))
    return {
        "qed": round(d.qed, 4),
        "sa": round(d.sa_score, 4),
        "logp": round(d.logp, 4),
        "mol_weight": round(d.mol_weight, 3),
        "ro5_violations": d.ro5_violations,
        "hbd": d.hbd,
        "hba": d.hba,
        "aromatic_rings": d.aromatic_rings,
    }


def _passes(filters: dict, row: dict) -> bool:
    return (
        row["qed"] >= filters["qed_min"]
        and row["sa"] <= filters["sa_max"]
        and row["ro5_violations"] <= filters["ro5_max_violations"]
    )


def vina_mol_gen(backend, target, n: int, filters: dict | None = None, seed: int | None = None):
    if not target.complete():
        raise ToolError("precondition", "target context incomplete (sequence/structure)")
    if n < 1:
        raise ToolError("precondition", f"n must be >= 1, got {n}")
    merged = dict(DEFAULT_FILTERS)
    merged.update(filters or {})

    children = []
    generated = backend.generate_molecules(target.protein_sequence, n, seed)
    children.append(
        ("generate_molecules", {"n": n, "seed": seed}, {"sentinel": RAW_SENTINEL, "smiles": generated})
    )

    rows = []
    survivors = []
    for smiles in generated:
        try:
            props = _descriptor_row(smiles)
        except ChemError as exc:
            rows.append({"smiles": smiles, "error": f"parse: {exc}", "passed_filter": False})
            continue
        passed = _passes(merged, props)
        row = {"smiles": smiles, **props, "passed_filter": passed, "docking": None}
        rows.append(row)
        if passed:
            survivors.append(row)

    if survivors:
        docking = backend.run_docking(
            target.structure_ref, [r["smiles"] for r in survivors], target.docking_box, seed
        )
        children.append(
            ("run_docking", {"ligands": len(survivors), "seed": seed}, docking)
        )
        for row, result in zip(survivors, docking["results"]):
            row["docking"] = result["score"]
            row["pose_ref"] = result["pose_ref"]
            report = backend.get_interaction_report(
                target.structure_ref, result["pose_ref"], row["smiles"]
            )
            row["interactions"] = report["interactions"]
            children.append(
                ("get_interaction_report", {"pose_ref": result["pose_ref"]}, report)
            )

    raw = {
        "sentinel": RAW_SENTINEL,
        "filters": merged,
        "candidates": rows,
        "item_errors": [r for r in rows if "error" in r],
    }
    return raw, children


def vina_report(backend, target, smiles_list: list[str], seed: int | None = None):
    if not smiles_list:
        raise ToolError("precondition", "empty molecule list")
    if not target.complete():
        raise ToolError("precondition", "target context incomplete (sequence/structure)")

    children = []
    rows = []
    valid_rows = []
    for smiles in smiles_list:
        try:
            props = _descriptor_row(smiles)
        except ChemError as exc:
            rows.append({"smiles": smiles, "error": f"parse: {exc}"})
            continue
        row = {"smiles": smiles, **props, "docking": None}
        rows.append(row)
        valid_rows.append(row)

    if not valid_rows:
        raise ToolError("precondition", "every input SMILES is invalid")

    docking = backend.run_docking(
        target.structure_ref, [r["smiles"] for r in valid_rows], target.docking_box, seed
    )
    children.append(("run_docking", {"ligands": len(valid_rows), "seed": seed}, docking))
    for row, result in zip(valid_rows, docking["results"]):
        row["docking"] = result["score"]
        row["pose_ref"] = result["pose_ref"]
        report = backend.get_interaction_report(
            target.structure_ref, result["pose_ref"], row["smiles"]
        )
        row["interactions"] = report["interactions"]
        children.append(("get_interaction_report", {"pose_ref": result["pose_ref"]}, report))

    raw = {
        "sentinel": RAW_SENTINEL,
        "candidates": rows,
        "item_errors": [r for r in rows if "error" in r],
    }
    return raw, children
