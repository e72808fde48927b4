"""Atom-contribution LogP (Wildman/Crippen-style atom typing).

Each heavy atom (and each implicit hydrogen) is assigned one type from
the published contribution scheme via first-match-wins rules; LogP is the
sum of contributions.  Coefficients live in ``data/crippen.json``.
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


@lru_cache(maxsize=1)
def _table() -> dict[str, float]:
    text = resources.files("molforge.chem.data").joinpath("crippen.json").read_text()
    return {row["type"]: row["logp"] for row in json.loads(text)}


def _neighbor_info(mol: Molecule, idx: int):
    """Classify the bonds of one atom for typing decisions."""
    single_el: list[tuple[str, bool]] = []  # (element, neighbor aromatic)
    double_el: list[tuple[str, bool]] = []
    triple = False
    aromatic_bonds = 0
    for nb, bi in mol.neighbors(idx):
        bond = mol.bonds[bi]
        other = mol.atoms[nb]
        if bond.order == BOND_SINGLE:
            single_el.append((other.element, other.aromatic))
        elif bond.order == BOND_DOUBLE:
            double_el.append((other.element, other.aromatic))
        elif bond.order == BOND_TRIPLE:
            triple = True
        elif bond.order == BOND_AROMATIC:
            aromatic_bonds += 1
    return single_el, double_el, triple, aromatic_bonds


_HALOGEN = {"F": "C14", "Cl": "C15", "Br": "C16", "I": "C17"}
_HETERO = {"N", "O", "P", "S", "F", "Cl", "Br", "I"}


def _type_carbon(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    single, double, triple, arom_bonds = _neighbor_info(mol, idx)
    if atom.aromatic:
        exo_double = [el for el, aromatic in double if not aromatic]
        if exo_double and exo_double[0] in ("C", "N", "O"):
            return "C25"
        subs = single  # substituents attached by single bonds
        if not subs:
            return "C19" if arom_bonds >= 3 else "C18"
        el, sub_aromatic = subs[0]
        if el in _HALOGEN and not sub_aromatic:
            return _HALOGEN[el]
        if sub_aromatic:
            return "C20"
        if el == "C":
            return "C21"
        if el == "N":
            return "C22"
        if el == "O":
            return "C23"
        if el == "S":
            return "C24"
        return "C13"
    if triple:
        return "C7"
    if double:
        # sp2 carbon: double bond to a heteroatom is carbonyl-like.
        if any(el != "C" for el, _ in double):
            return "C5"
        attached_aromatic = any(aromatic for _, aromatic in single) or any(
            aromatic for _, aromatic in double
        )
        if attached_aromatic:
            return "C26"
        return "C6"
    # sp3 carbon; aliphatic heteroatom neighbors win over aromatic attachment.
    if any(el in _HETERO and not aromatic for el, aromatic in single):
        return "C3" if atom.implicit_h >= 2 else "C4"
    if any(aromatic for _, aromatic in single):
        h = atom.implicit_h
        if h >= 3:
            carbon_aromatic = any(el == "C" and aromatic for el, aromatic in single)
            return "C8" if carbon_aromatic else "C9"
        if h == 2:
            return "C10"
        if h == 1:
            return "C11"
        return "C12"
    if all(el == "C" for el, _ in single):
        return "C1" if atom.implicit_h >= 2 else "C2"
    return "CS"


def _type_nitrogen(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    single, double, triple, _ = _neighbor_info(mol, idx)
    if atom.aromatic:
        return "N12" if atom.formal_charge > 0 else "N11"
    if atom.formal_charge > 0:
        if atom.implicit_h > 0:
            return "N10"
        if double or triple:
            return "N14"
        return "N13"
    if atom.formal_charge < 0:
        return "NS"
    if triple:
        return "N9"
    if double:
        return "N5" if atom.implicit_h >= 1 else "N6"
    attached_aromatic = any(aromatic for _, aromatic in single)
    h = atom.implicit_h
    if h >= 2:
        return "N3" if attached_aromatic else "N1"
    if h == 1:
        return "N4" if attached_aromatic else "N2"
    return "N8" if attached_aromatic else "N7"


def _type_oxygen(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    single, double, triple, _ = _neighbor_info(mol, idx)
    if atom.aromatic:
        return "O1"
    degree = len(mol.neighbors(idx))
    if atom.formal_charge == 0 and atom.implicit_h >= 1:
        return "O2"
    if degree == 2 and atom.formal_charge == 0:
        if all(el == "C" and not aromatic for el, aromatic in single):
            return "O3"
        return "O4"
    # Single-coordinate oxygen: =X or [O-]X.
    partner_el, partner_aromatic, partner_idx = None, False, None
    for nb, bi in mol.neighbors(idx):
        partner_el = mol.atoms[nb].element
        partner_aromatic = mol.atoms[nb].aromatic
        partner_idx = nb
        break
    if partner_el in ("N", "P"):
        return "O5"
    if partner_el == "S":
        return "O6"
    if partner_el == "C":
        if partner_aromatic:
            return "O8"
        # Inspect the carbonyl carbon's other substituents.
        other_els = []
        for nb2, bi2 in mol.neighbors(partner_idx):
            if nb2 == idx:
                continue
            other_els.append((mol.atoms[nb2].element, mol.atoms[nb2].aromatic))
        if atom.formal_charge < 0:
            carbonyl = any(
                mol.bonds[bi2].order == BOND_DOUBLE and mol.atoms[nb2].element == "O"
                for nb2, bi2 in mol.neighbors(partner_idx)
                if nb2 != idx
            )
            return "O12" if carbonyl else "OS"
        if atom.formal_charge == 0:
            carboxylate = any(
                mol.atoms[nb2].element == "O" and mol.atoms[nb2].formal_charge < 0
                for nb2, _ in mol.neighbors(partner_idx)
            )
            if carboxylate:
                return "O12"
            non_carbon = sum(1 for el, _ in other_els if el not in ("C", "H"))
            if non_carbon >= 2:
                return "O11"
            if any(aromatic for _, aromatic in other_els):
                return "O10"
            return "O9"
    return "OS"


def atom_type(mol: Molecule, idx: int) -> str:
    """Contribution type for one heavy atom."""
    element = mol.atoms[idx].element
    if element == "C":
        return _type_carbon(mol, idx)
    if element == "N":
        return _type_nitrogen(mol, idx)
    if element == "O":
        return _type_oxygen(mol, idx)
    if element == "S":
        atom = mol.atoms[idx]
        if atom.aromatic:
            return "S3"
        return "S2" if atom.formal_charge != 0 else "S1"
    if element == "P":
        return "P"
    if element in ("F", "Cl", "Br", "I"):
        return element
    if element == "B":
        return "BOR"
    if element == "H":
        return "HS"
    return "CS"


def hydrogen_type(mol: Molecule, idx: int) -> str:
    """Contribution type for the implicit hydrogens of one heavy atom."""
    element = mol.atoms[idx].element
    if element == "C":
        return "H1"
    if element == "N":
        return "H3"
    if element != "O":
        return "H2"
    # Hydroxyl hydrogen: classification depends on what the oxygen touches.
    for nb, _ in mol.neighbors(idx):
        other = mol.atoms[nb]
        if other.element == "N":
            return "H3"
        if other.element == "O":
            return "H4"
        if other.element == "C" and not other.aromatic:
            for nb2, bi2 in mol.neighbors(nb):
                bond = mol.bonds[bi2]
                if bond.order == BOND_DOUBLE and mol.atoms[nb2].element in ("C", "N", "O", "S"):
                    return "H4"  # acid / enol hydroxyl
    return "H2"


def crippen_logp(mol: Molecule) -> float:
    table = _table()
    total = 0.0
    for idx, atom in enumerate(mol.atoms):
        total += table[atom_type(mol, idx)]
        if atom.implicit_h:
            total += atom.implicit_h * table[hydrogen_type(mol, idx)]
    return total


def crippen_breakdown(mol: Molecule) -> list[tuple[int, str, float]]:
    """Per-atom (index, type, contribution incl. hydrogens) for debugging."""
    table = _table()
    rows = []
    for idx, atom in enumerate(mol.atoms):
        t = atom_type(mol, idx)
        value = table[t]
        if atom.implicit_h:
            value += atom.implicit_h * table[hydrogen_type(mol, idx)]
        rows.append((idx, t, value))
    return rows
