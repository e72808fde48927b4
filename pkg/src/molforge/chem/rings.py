"""Ring perception (SSSR) and Hückel aromaticity.

The aromaticity model is 4n+2 over SSSR rings whose members are C, N, O
or S (P tolerated for completeness), with exocyclic double bonds
contributing zero electrons and saturated lone-pair heteroatoms
contributing two.  Fused systems are handled by iterating ring
aromatization to a fixpoint; peripheral systems like azulene are outside
the model and stay non-aromatic.
"""

from __future__ import annotations

from collections import deque

from molforge.chem.molecule import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_TRIPLE,
    Molecule,
    SmilesSyntaxError,
)


def find_sssr(mol: Molecule) -> list[list[int]]:
    """Smallest set of smallest rings, each ring an ordered atom-index cycle.

    Candidate rings come from per-edge shortest cycles; a linearly
    independent subset (over GF(2) edge vectors) of size E - V + C is
    selected smallest-first.
    """
    n_atoms = len(mol.atoms)
    n_bonds = len(mol.bonds)
    if n_bonds == 0:
        return []
    adj = mol.adjacency()
    components = _count_components(mol)
    ring_count = n_bonds - n_atoms + components
    if ring_count <= 0:
        return []

    bond_index = {}
    for bi, bond in enumerate(mol.bonds):
        bond_index[(bond.a, bond.b)] = bi
        bond_index[(bond.b, bond.a)] = bi

    candidates: list[tuple[int, int, list[int]]] = []
    seen_cycles: set[frozenset[int]] = set()
    for bi, bond in enumerate(mol.bonds):
        cycle = _shortest_cycle_through(mol, adj, bond.a, bond.b, bi)
        if cycle is None:
            continue
        edges = 0
        for k in range(len(cycle)):
            e = bond_index[(cycle[k], cycle[(k + 1) % len(cycle)])]
            edges |= 1 << e
        key = frozenset(cycle)
        if key in seen_cycles:
            continue
        seen_cycles.add(key)
        candidates.append((len(cycle), edges, cycle))

    candidates.sort(key=lambda item: (item[0], item[2]))
    basis: list[int] = []
    chosen: list[list[int]] = []
    for _, edges, cycle in candidates:
        reduced = edges
        for vec in basis:
            low = vec & -vec
            if reduced & low:
                reduced ^= vec
        if reduced:
            basis.append(reduced)
            basis.sort(key=lambda v: v & -v)
            chosen.append(cycle)
            if len(chosen) == ring_count:
                break
    return chosen


def _count_components(mol: Molecule) -> int:
    n = len(mol.atoms)
    seen = [False] * n
    adj = mol.adjacency()
    components = 0
    for start in range(n):
        if seen[start]:
            continue
        components += 1
        queue = deque([start])
        seen[start] = True
        while queue:
            cur = queue.popleft()
            for nb, _ in adj[cur]:
                if not seen[nb]:
                    seen[nb] = True
                    queue.append(nb)
    return components


def _shortest_cycle_through(mol, adj, a: int, b: int, skip_bond: int) -> list[int] | None:
    """Shortest path a..b avoiding the direct bond; None if the bond is a bridge."""
    n = len(mol.atoms)
    parent = [-1] * n
    seen = [False] * n
    seen[a] = True
    queue = deque([a])
    while queue:
        cur = queue.popleft()
        if cur == b:
            break
        for nb, bi in adj[cur]:
            if bi == skip_bond or seen[nb]:
                continue
            seen[nb] = True
            parent[nb] = cur
            queue.append(nb)
    if not seen[b]:
        return None
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return path


def perceive_rings_and_aromaticity(mol: Molecule) -> list[list[int]]:
    """Set in_ring flags, aromatize qualifying rings, validate input aromatics.

    Idempotent: calling again on the result changes nothing.  Returns the
    SSSR rings for downstream descriptor use.
    """
    rings = find_sssr(mol)
    ring_atoms: set[int] = set()
    ring_bond_ids: set[int] = set()
    bond_index = {}
    for bi, bond in enumerate(mol.bonds):
        bond_index[(bond.a, bond.b)] = bi
        bond_index[(bond.b, bond.a)] = bi
    for ring in rings:
        ring_atoms.update(ring)
        for k in range(len(ring)):
            ring_bond_ids.add(bond_index[(ring[k], ring[(k + 1) % len(ring)])])
    for idx, atom in enumerate(mol.atoms):
        atom.in_ring = idx in ring_atoms
    for bi, bond in enumerate(mol.bonds):
        bond.in_ring = bi in ring_bond_ids

    for idx, atom in enumerate(mol.atoms):
        if atom.aromatic and not atom.in_ring:
            raise SmilesSyntaxError(f"aromatic atom {idx} ({atom.element.lower()}) outside any ring")

    aromatic_rings = _perceive_aromatic_rings(mol, rings, ring_bond_ids, bond_index)

    # Any atom written aromatic must end up in at least one aromatic ring.
    flagged = set()
    for ring in aromatic_rings:
        flagged.update(ring)
    for idx, atom in enumerate(mol.atoms):
        if atom.aromatic and idx not in flagged:
            raise SmilesSyntaxError(
                f"atom {idx} written aromatic but its ring fails the aromaticity model"
            )
    return rings


def _pi_contribution(mol: Molecule, idx: int, ring: set[int]) -> int | None:
    """Pi electrons one atom donates to a candidate ring; None disqualifies."""
    atom = mol.atoms[idx]
    element = atom.element
    if element not in ("C", "N", "O", "S", "P", "B"):
        return None
    sigma = 0
    ring_multiple = False
    exo_multiple = False
    for _, bi in mol.neighbors(idx):
        bond = mol.bonds[bi]
        sigma += 1
        if bond.order == BOND_TRIPLE:
            return None
        if bond.order == BOND_DOUBLE:
            if bond.in_ring:
                ring_multiple = True
            else:
                exo_multiple = True
    if sigma > 3:
        return None

    if element == "C":
        if exo_multiple:
            return 0
        if ring_multiple or atom.aromatic:
            return 1
        if atom.formal_charge == 1:
            return 0
        if atom.formal_charge == -1:
            return 2
        return None
    if element == "B":
        return 1 if ring_multiple else 0
    # Heteroatoms: a ring double bond donates one electron; a +1 center is
    # pyridinium/pyrylium-type (one electron); otherwise the lone pair
    # donates two (pyrrole/furan/thiophene type).
    if ring_multiple:
        return 1
    if exo_multiple:
        return 0
    if atom.formal_charge == 1:
        return 1
    if (
        atom.aromatic
        and element in ("N", "P")
        and sigma <= 2
        and atom.implicit_h == 0
        and atom.formal_charge == 0
    ):
        # Bare lowercase n with two ring neighbors is pyridine-type.
        return 1
    return 2


def _perceive_aromatic_rings(mol, rings, ring_bond_ids, bond_index) -> list[list[int]]:
    aromatic_rings: list[list[int]] = []
    pending = list(rings)
    changed = True
    accepted: set[int] = set()
    while changed:
        changed = False
        remaining = []
        for ring in pending:
            members = set(ring)
            contributions = []
            ok = True
            for idx in ring:
                pi = _pi_contribution(mol, idx, members)
                if pi is None:
                    ok = False
                    break
                contributions.append(pi)
            if ok and sum(contributions) % 4 == 2:
                for idx in ring:
                    mol.atoms[idx].aromatic = True
                for k in range(len(ring)):
                    bi = bond_index[(ring[k], ring[(k + 1) % len(ring)])]
                    mol.bonds[bi].order = BOND_AROMATIC
                aromatic_rings.append(ring)
                accepted.add(id(ring))
                changed = True
            else:
                remaining.append(ring)
        pending = remaining
    return aromatic_rings


def aromatic_ring_count(mol: Molecule, rings: list[list[int]] | None = None) -> int:
    """Number of SSSR rings in which every atom is aromatic."""
    if rings is None:
        rings = find_sssr(mol)
    count = 0
    for ring in rings:
        if all(mol.atoms[i].aromatic for i in ring):
            count += 1
    return count
