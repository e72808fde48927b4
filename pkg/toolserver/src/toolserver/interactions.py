"""Interaction-profile stub.

Applies the engine mock's residue tables and distance formulas, with
contact counts drawn from the pose reference hash: the /plip wire
contract carries no ligand structure, so ligand-derived counts cannot
cross it.  This is the second replaceable function (see README).
"""

from __future__ import annotations

import hashlib

HBOND_RESIDUES = ("GLU228", "ALA230", "GLU234", "THR211", "LYS179", "ASP274")
HYDROPHOBIC_RESIDUES = ("LEU210", "VAL270", "MET281", "PHE161")
SALT_BRIDGE_RESIDUE = "ASP292"
PISTACK_RESIDUE = "TRP80"


def _draw(count: int, *key_parts: object) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in key_parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") % max(count, 1)


def _unit(*key_parts: object) -> float:
    digest = hashlib.sha256("|".join(str(p) for p in key_parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") / float(1 << 64)


def profile(receptor_ref: str, pose_ref: str) -> list[dict]:
    """Deterministic contact list for one docked pose."""
    key = f"{receptor_ref}|{pose_ref}"
    interactions = []
    for k in range(1 + _draw(3, "n-hbond", key)):
        residue = HBOND_RESIDUES[_draw(len(HBOND_RESIDUES), "hbond", pose_ref, k)]
        distance = 2.6 + 0.8 * _unit("hbond-d", pose_ref, k)
        interactions.append({"type": "hbond", "residue": residue, "distance": round(distance, 2)})
    for k in range(1 + _draw(2, "n-phobic", key)):
        residue = HYDROPHOBIC_RESIDUES[
            _draw(len(HYDROPHOBIC_RESIDUES), "phobic", pose_ref, k)
        ]
        distance = 3.4 + 0.8 * _unit("phobic-d", pose_ref, k)
        interactions.append(
            {"type": "hydrophobic", "residue": residue, "distance": round(distance, 2)}
        )
    if _draw(4, "salt", key) == 0:
        distance = 2.9 + 0.6 * _unit("salt-d", pose_ref)
        interactions.append(
            {"type": "saltbridge", "residue": SALT_BRIDGE_RESIDUE, "distance": round(distance, 2)}
        )
    if _draw(2, "stack", key) == 0:
        distance = 3.6 + 0.6 * _unit("pistack-d", pose_ref)
        interactions.append(
            {"type": "pistack", "residue": PISTACK_RESIDUE, "distance": round(distance, 2)}
        )
    return interactions
