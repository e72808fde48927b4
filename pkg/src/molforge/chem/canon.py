"""Canonical SMILES generation.

Canonical ranks come from iterative neighborhood refinement of atom
invariants (element, charge, aromatic flag, ring flag, degree, hydrogen
count).  Remaining ties are broken by branch-and-compare: each candidate
atom in the first tied cell is promoted in turn and the lexicographically
smallest emitted string wins, which makes the output independent of input
atom numbering even for automorphic atoms.
"""

from __future__ import annotations

import sys

from molforge.chem.elements import SUPPORTED_ELEMENTS, allowed_valences
from molforge.chem.molecule import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Molecule,
)

_ELEMENT_INDEX = {sym: i for i, sym in enumerate(SUPPORTED_ELEMENTS)}
_BOND_SORT_KEY = {BOND_SINGLE: 1, BOND_AROMATIC: 2, BOND_DOUBLE: 3, BOND_TRIPLE: 4}
_BOND_TEXT = {BOND_SINGLE: "", BOND_AROMATIC: "", BOND_DOUBLE: "=", BOND_TRIPLE: "#"}


def canonicalize(mol: Molecule) -> str:
    """Deterministic canonical SMILES, invariant under atom renumbering."""
    if mol.canonical_smiles:
        return mol.canonical_smiles
    writer = _Writer(mol)
    parts = sorted(writer.fragment_text(frag) for frag in writer.fragments)
    smiles = ".".join(parts)
    mol.canonical_smiles = smiles
    return smiles


class _Writer:
    """Per-molecule precomputed state shared across tie-break branches."""

    def __init__(self, mol: Molecule):
        self.mol = mol
        adj = mol.adjacency()
        self.adj_keys: list[list[tuple[int, int, int]]] = [
            [(_BOND_SORT_KEY[mol.bonds[bi].order], nb, bi) for nb, bi in adj[i]]
            for i in range(len(mol.atoms))
        ]
        self.atom_text = [_atom_text(mol, i) for i in range(len(mol.atoms))]
        self.bond_text = [_bond_text(mol, bi) for bi in range(len(mol.bonds))]
        self.fragments = _connected_components(mol, adj)

    # -- ranking --------------------------------------------------------

    def refine(self, atoms: list[int], ranks: dict[int, int]) -> dict[int, int]:
        adj_keys = self.adj_keys
        distinct = len(set(ranks.values()))
        empty: tuple = ()
        while True:
            counts: dict[int, int] = {}
            for i in atoms:
                r = ranks[i]
                counts[r] = counts.get(r, 0) + 1
            signatures = {}
            for i in atoms:
                r = ranks[i]
                if counts[r] == 1:
                    # Already unique: rank alone identifies the atom.
                    signatures[i] = (r, empty)
                else:
                    neigh = sorted((key, ranks[nb]) for key, nb, _ in adj_keys[i])
                    signatures[i] = (r, tuple(neigh))
            ordered = sorted(set(signatures.values()))
            index = {sig: r for r, sig in enumerate(ordered)}
            new_ranks = {i: index[signatures[i]] for i in atoms}
            if len(ordered) == distinct:
                return new_ranks
            ranks = new_ranks
            distinct = len(ordered)

    def fragment_text(self, atoms: list[int]) -> str:
        mol = self.mol
        inv = {}
        for i in atoms:
            a = mol.atoms[i]
            inv[i] = (
                _ELEMENT_INDEX[a.element],
                a.formal_charge,
                1 if a.aromatic else 0,
                1 if a.in_ring else 0,
                len(self.adj_keys[i]),
                a.implicit_h,
            )
        ordered = sorted(set(inv.values()))
        index = {v: r for r, v in enumerate(ordered)}
        ranks = self.refine(atoms, {i: index[inv[i]] for i in atoms})
        return self.resolve_ties(atoms, ranks)

    def resolve_ties(self, atoms: list[int], ranks: dict[int, int]) -> str:
        cells: dict[int, list[int]] = {}
        for i in atoms:
            cells.setdefault(ranks[i], []).append(i)
        tied = [r for r, members in cells.items() if len(members) > 1]
        if not tied:
            return self.write(atoms, ranks)
        target = min(tied)
        best: str | None = None
        for candidate in cells[target]:
            bumped = {i: r * 2 + 1 for i, r in ranks.items()}
            bumped[candidate] = ranks[candidate] * 2
            refined = self.refine(atoms, bumped)
            text = self.resolve_ties(atoms, refined)
            if best is None or text < best:
                best = text
        return best  # type: ignore[return-value]

    # -- emission ---------------------------------------------------------

    def write(self, atoms: list[int], ranks: dict[int, int]) -> str:
        adj_keys = self.adj_keys
        start = min(atoms, key=lambda i: (ranks[i], i))

        visited = {start}
        seen_edges: set[int] = set()
        tree_children: dict[int, list[tuple[int, int]]] = {i: [] for i in atoms}
        closure_pairs: list[tuple[int, int, int]] = []

        def neighbor_order(i: int):
            return sorted(adj_keys[i], key=lambda row: (ranks[row[1]], row[1]))

        walk = [(start, iter(neighbor_order(start)))]
        while walk:
            cur, it = walk[-1]
            advanced = False
            for _, nb, bi in it:
                if bi in seen_edges:
                    continue
                if nb in visited:
                    seen_edges.add(bi)
                    closure_pairs.append((cur, nb, bi))
                    continue
                seen_edges.add(bi)
                visited.add(nb)
                tree_children[cur].append((nb, bi))
                walk.append((nb, iter(neighbor_order(nb))))
                advanced = True
                break
            if not advanced:
                walk.pop()

        atom_closures: dict[int, list[tuple[int, int]]] = {i: [] for i in atoms}
        for a, b, bi in closure_pairs:
            atom_closures[a].append((b, bi))
            atom_closures[b].append((a, bi))

        free_digits = list(range(1, 100))
        open_closures: dict[int, int] = {}
        out: list[str] = []
        atom_text = self.atom_text
        bond_text = self.bond_text

        def digit_text(number: int) -> str:
            return str(number) if number < 10 else f"%{number:02d}"

        def emit(idx: int, via_bond: int | None) -> None:
            if via_bond is not None:
                out.append(bond_text[via_bond])
            out.append(atom_text[idx])
            closures = atom_closures[idx]
            if closures:
                closures.sort(key=lambda p: (ranks[p[0]], p[0]))
                for _, bi in closures:
                    if bi in open_closures:
                        number = open_closures.pop(bi)
                        out.append(bond_text[bi])
                        out.append(digit_text(number))
                        free_digits.insert(0, number)
                        free_digits.sort()
                    else:
                        number = free_digits.pop(0)
                        open_closures[bi] = number
                        out.append(bond_text[bi])
                        out.append(digit_text(number))
            children = tree_children[idx]
            last = len(children) - 1
            for pos, (child, bi) in enumerate(children):
                if pos != last:
                    out.append("(")
                emit(child, bi)
                if pos != last:
                    out.append(")")

        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, len(atoms) * 8 + 100))
        try:
            emit(start, None)
        finally:
            sys.setrecursionlimit(old_limit)
        return "".join(out)


def _connected_components(mol: Molecule, adj) -> list[list[int]]:
    n = len(mol.atoms)
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            cur = stack.pop()
            comp.append(cur)
            for nb, _ in adj[cur]:
                if not seen[nb]:
                    seen[nb] = True
                    stack.append(nb)
        comps.append(comp)
    return comps


def _derived_bare_hcount(mol: Molecule, idx: int) -> int:
    """Hydrogen count the parser would assign to this atom written bare."""
    a = mol.atoms[idx]
    count = 0
    order_sum = 0.0
    has_multiple = False
    for _, bi in mol.neighbors(idx):
        bond = mol.bonds[bi]
        count += 1
        order_sum += 1.0 if bond.order == BOND_AROMATIC else bond.value()
        if bond.order in (BOND_DOUBLE, BOND_TRIPLE):
            has_multiple = True
    valences = allowed_valences(a.element, 0)
    if a.aromatic:
        base = valences[0]
        pi = 0
        if a.element == "C":
            pi = 0 if has_multiple else 1
        elif a.element in ("N", "P"):
            pi = 1 if (not has_multiple and count <= 2) else 0
        return base - count - int(round(order_sum - count)) - pi
    for v in valences:
        if v + 1e-9 >= order_sum:
            return int(round(v - order_sum))
    return -1


def _atom_text(mol: Molecule, idx: int) -> str:
    a = mol.atoms[idx]
    symbol = a.element.lower() if a.aromatic else a.element
    bare_ok = (
        a.formal_charge == 0
        and a.element != "H"
        and _derived_bare_hcount(mol, idx) == a.implicit_h
    )
    if bare_ok:
        return symbol
    h = "" if a.implicit_h == 0 else ("H" if a.implicit_h == 1 else f"H{a.implicit_h}")
    if a.formal_charge == 0:
        charge = ""
    elif a.formal_charge == 1:
        charge = "+"
    elif a.formal_charge == -1:
        charge = "-"
    elif a.formal_charge > 1:
        charge = f"+{a.formal_charge}"
    else:
        charge = f"-{-a.formal_charge}"
    return f"[{symbol}{h}{charge}]"


def _bond_text(mol: Molecule, bond_idx: int) -> str:
    bond = mol.bonds[bond_idx]
    if bond.order == BOND_SINGLE:
        # A single bond between two aromatic atoms must be written out,
        # otherwise it would re-parse as aromatic (biphenyl case).
        if mol.atoms[bond.a].aromatic and mol.atoms[bond.b].aromatic:
            return "-"
        return ""
    return _BOND_TEXT[bond.order]
