"""Topological polar surface area from N/O fragment contributions.

Follows the published fragment scheme (nitrogen and oxygen environments
only, matching the common toolkit default that excludes S and P).  The
contribution table is bundled in ``data/tpsa.json``, keyed by an
environment signature: ``element;charge;hcount;bondshape`` with a ``;r3``
suffix for three-membered-ring variants.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from molforge.chem.molecule import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Molecule,
)
from molforge.chem.rings import find_sssr


@lru_cache(maxsize=1)
def _tables() -> tuple[dict[str, float], dict[str, float]]:
    text = resources.files("molforge.chem.data").joinpath("tpsa.json").read_text()
    data = json.loads(text)
    return data["nitrogen"], data["oxygen"]


def _signature(symbol: str, charge: int, h: int, a: int, s: int, d: int, t: int) -> str:
    parts = []
    if a:
        parts.append(f"a{a}")
    if s:
        parts.append(f"s{s}")
    if d:
        parts.append(f"d{d}")
    if t:
        parts.append(f"t{t}")
    return f"{symbol};{charge};{h};{''.join(parts)}"


def tpsa(mol: Molecule) -> float:
    n_table, o_table = _tables()
    ring3_atoms: set[int] = set()
    for ring in find_sssr(mol):
        if len(ring) == 3:
            ring3_atoms.update(ring)
    total = 0.0
    for idx, atom in enumerate(mol.atoms):
        if atom.element not in ("N", "O"):
            continue
        singles = doubles = triples = aromatic = 0
        for _, bi in mol.neighbors(idx):
            order = mol.bonds[bi].order
            if order == BOND_SINGLE:
                singles += 1
            elif order == BOND_DOUBLE:
                doubles += 1
            elif order == BOND_TRIPLE:
                triples += 1
            elif order == BOND_AROMATIC:
                aromatic += 1
        charge = max(min(atom.formal_charge, 1), -1)
        h = min(atom.implicit_h, 3)
        symbol = atom.element.lower() if atom.aromatic else atom.element
        key = _signature(symbol, charge, h, aromatic, singles, doubles, triples)
        table = n_table if atom.element == "N" else o_table
        if idx in ring3_atoms and f"{key};r3" in table:
            key = f"{key};r3"
        if key in table:
            total += table[key]
        elif atom.element == "N":
            total += _nitrogen_fallback(atom.aromatic, charge, h, singles, doubles, aromatic, n_table)
        else:
            total += _oxygen_fallback(atom.aromatic, h, singles, doubles, o_table)
    return total


def _nitrogen_fallback(
    is_aromatic: bool, charge: int, h: int, s: int, d: int, a: int, table: dict[str, float]
) -> float:
    """Nearest published environment for shapes outside the exact table."""
    if is_aromatic:
        if charge > 0:
            return table["n;1;1;a2"] if h else table["n;1;0;a2s1"]
        if h:
            return table["n;0;1;a2"]
        if d:
            return table["n;0;0;a2d1"]
        if s:
            return table["n;0;0;a2s1"]
        return table["n;0;0;a3"] if a >= 3 else table["n;0;0;a2"]
    shape = _signature("N", 0, min(h, 2), 0, s, d, 0)
    return table.get(shape, table["N;0;0;s3"] if h == 0 else table["N;0;1;s2"])


def _oxygen_fallback(is_aromatic: bool, h: int, s: int, d: int, table: dict[str, float]) -> float:
    if is_aromatic:
        return table["o;0;0;a2"]
    if h:
        return table["O;0;1;s1"]
    if d:
        return table["O;0;0;d1"]
    return table["O;0;0;s2"]
