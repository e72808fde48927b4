"""Substructure pattern language and VF2-style matching.

The pattern dialect is a small SMARTS subset sufficient for the bundled
structural alerts: element symbols with aromatic lowercase, ``*`` (any),
``[...]`` atom expressions with ``,`` (or) / ``;`` (and) / ``!`` (not)
over primitives ``#n`` (atomic number), ``+``/``-`` charge, ``Hn`` (total
hydrogen count), ``Dn`` (degree), ``R``/``R0`` (ring membership), ``a``/``A``;
bonds ``- = # : ~`` with the SMARTS default of single-or-aromatic; plus
branches and ring closures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from molforge.chem.elements import SUPPORTED_ELEMENTS
from molforge.chem.molecule import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Molecule,
)

_ATOMIC_NUMBER = {
    "H": 1, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9,
    "P": 15, "S": 16, "Cl": 17, "Br": 35, "I": 53,
}
_NUMBER_TO_ELEMENT = {v: k for k, v in _ATOMIC_NUMBER.items()}


class PatternError(ValueError):
    """Malformed pattern text or disconnected pattern graph."""


@dataclass(slots=True)
class AtomPredicate:
    """Conjunction of alternatives: each alternative is a primitive test list."""

    alternatives: list[list[tuple[str, object]]] = field(default_factory=list)

    def matches(self, mol: Molecule, idx: int) -> bool:
        return any(
            all(_test_primitive(mol, idx, name, value) for name, value in alt)
            for alt in self.alternatives
        )


def _test_primitive(mol: Molecule, idx: int, name: str, value: object) -> bool:
    atom = mol.atoms[idx]
    if name == "any":
        return True
    if name == "element":
        return atom.element == value
    if name == "element_aromatic":
        return atom.element == value and atom.aromatic
    if name == "element_aliphatic":
        return atom.element == value and not atom.aromatic
    if name == "aromatic":
        return atom.aromatic is value
    if name == "charge":
        return atom.formal_charge == value
    if name == "hcount":
        return atom.implicit_h == value
    if name == "degree":
        return atom.degree == value
    if name == "min_degree":
        return atom.degree >= value
    if name == "ring":
        return atom.in_ring is value
    if name == "not":
        inner_name, inner_value = value  # type: ignore[misc]
        return not _test_primitive(mol, idx, inner_name, inner_value)
    raise PatternError(f"unknown primitive {name!r}")


@dataclass(slots=True)
class BondPredicate:
    kind: str = "default"  # default | single | double | triple | aromatic | any

    def matches(self, order: int) -> bool:
        if self.kind == "any":
            return True
        if self.kind == "default":
            return order in (BOND_SINGLE, BOND_AROMATIC)
        return {
            "single": BOND_SINGLE,
            "double": BOND_DOUBLE,
            "triple": BOND_TRIPLE,
            "aromatic": BOND_AROMATIC,
        }[self.kind] == order


@dataclass(slots=True)
class QueryPattern:
    """Connected pattern graph of atom and bond predicates."""

    pattern_atoms: list[AtomPredicate]
    pattern_bonds: list[tuple[int, int, BondPredicate]]
    source_text: str

    def adjacency(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in self.pattern_atoms]
        for bi, (a, b, _) in enumerate(self.pattern_bonds):
            adj[a].append((b, bi))
            adj[b].append((a, bi))
        return adj


_BRACKET_PRIM = re.compile(
    r"""(?P<not>!)?(?:
        \#(?P<atnum>\d+)
      | (?P<arom_flag>a)
      | (?P<aliph_flag>A)
      | (?P<ring>R0|R)
      | H(?P<hcount>\d?)
      | D(?P<degree>\d)(?P<dplus>\+?)
      | (?P<charge>\+{1,2}|-{1,2}|\+\d|-\d)
      | (?P<elem>br|cl|b|c|n|o|p|s|Cl|Br|[A-IK-Z][a-z]?)
      | (?P<any>\*)
    )""",
    re.VERBOSE,
)


def _parse_bracket_expr(body: str) -> AtomPredicate:
    alternatives = []
    for alt_text in body.split(","):
        tests: list[tuple[str, object]] = []
        pos = 0
        for chunk in alt_text.split(";"):
            chunk = chunk.replace("&", "")
            pos = 0
            while pos < len(chunk):
                m = _BRACKET_PRIM.match(chunk, pos)
                if m is None:
                    raise PatternError(f"bad atom primitive at {chunk[pos:]!r}")
                pos = m.end()
                prim = _primitive_from_match(m)
                if m.group("not"):
                    tests.append(("not", prim))
                else:
                    tests.append(prim)
        if not tests:
            raise PatternError(f"empty atom expression in [{body}]")
        alternatives.append(tests)
    return AtomPredicate(alternatives=alternatives)


def _primitive_from_match(m: re.Match) -> tuple[str, object]:
    if m.group("atnum"):
        number = int(m.group("atnum"))
        if number not in _NUMBER_TO_ELEMENT:
            raise PatternError(f"unsupported atomic number {number}")
        return ("element", _NUMBER_TO_ELEMENT[number])
    if m.group("arom_flag"):
        return ("aromatic", True)
    if m.group("aliph_flag"):
        return ("aromatic", False)
    if m.group("ring"):
        return ("ring", m.group("ring") == "R")
    if m.group("hcount") is not None:
        return ("hcount", int(m.group("hcount") or "1"))
    if m.group("degree"):
        if m.group("dplus"):
            return ("min_degree", int(m.group("degree")))
        return ("degree", int(m.group("degree")))
    if m.group("charge"):
        text = m.group("charge")
        if text[-1].isdigit():
            return ("charge", int(text[1:]) * (1 if text[0] == "+" else -1))
        return ("charge", len(text) * (1 if text[0] == "+" else -1))
    if m.group("elem"):
        text = m.group("elem")
        if text[0].islower():
            element = text.capitalize()
            if element not in SUPPORTED_ELEMENTS:
                raise PatternError(f"unsupported element {element!r}")
            return ("element_aromatic", element)
        if text not in SUPPORTED_ELEMENTS:
            raise PatternError(f"unsupported element {text!r}")
        return ("element", text)
    if m.group("any"):
        return ("any", None)
    raise PatternError("unreachable primitive")


_BOND_KIND = {"-": "single", "=": "double", "#": "triple", ":": "aromatic", "~": "any"}


def parse_pattern(text: str) -> QueryPattern:
    """Parse pattern text; raises :class:`PatternError` on bad syntax."""
    text = text.strip()
    if not text:
        raise PatternError("empty pattern")
    atoms: list[AtomPredicate] = []
    bonds: list[tuple[int, int, BondPredicate]] = []
    prev_stack: list[int] = []
    prev: int | None = None
    pending: str | None = None
    open_rings: dict[int, tuple[int, str | None]] = {}

    def add_bond(a: int, b: int, kind: str | None) -> None:
        bonds.append((a, b, BondPredicate(kind=kind or "default")))

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "(":
            if prev is None:
                raise PatternError("branch with no preceding atom")
            prev_stack.append(prev)
            i += 1
            continue
        if ch == ")":
            if not prev_stack:
                raise PatternError("unmatched ')'")
            prev = prev_stack.pop()
            i += 1
            continue
        if ch in _BOND_KIND:
            if pending is not None:
                raise PatternError("two bond symbols in a row")
            pending = _BOND_KIND[ch]
            i += 1
            continue
        if ch.isdigit() or ch == "%":
            if prev is None:
                raise PatternError("ring closure before any atom")
            if ch == "%":
                number = int(text[i + 1 : i + 3])
                i += 3
            else:
                number = int(ch)
                i += 1
            if number in open_rings:
                other, kind = open_rings.pop(number)
                add_bond(other, prev, pending or kind)
            else:
                open_rings[number] = (prev, pending)
            pending = None
            continue
        if ch == "[":
            end = text.find("]", i)
            if end == -1:
                raise PatternError("unterminated bracket expression")
            pred = _parse_bracket_expr(text[i + 1 : end])
            atoms.append(pred)
            idx = len(atoms) - 1
            if prev is not None:
                add_bond(prev, idx, pending)
            pending = None
            prev = idx
            i = end + 1
            continue
        if ch == "*":
            atoms.append(AtomPredicate(alternatives=[[("any", None)]]))
            idx = len(atoms) - 1
            if prev is not None:
                add_bond(prev, idx, pending)
            pending = None
            prev = idx
            i += 1
            continue
        matched = None
        for sym in ("Cl", "Br"):
            if text.startswith(sym, i):
                matched = sym
                break
        if matched is None and ch in "BCNOFPSI":
            matched = ch
        if matched is not None:
            atoms.append(AtomPredicate(alternatives=[[("element_aliphatic", matched)]]))
            idx = len(atoms) - 1
            if prev is not None:
                add_bond(prev, idx, pending)
            pending = None
            prev = idx
            i += len(matched)
            continue
        if ch in "bcnops":
            atoms.append(
                AtomPredicate(alternatives=[[("element_aromatic", ch.capitalize())]])
            )
            idx = len(atoms) - 1
            if prev is not None:
                add_bond(prev, idx, pending)
            pending = None
            prev = idx
            i += 1
            continue
        raise PatternError(f"unexpected character {ch!r} in pattern")

    if open_rings:
        raise PatternError(f"unclosed ring closure(s) {sorted(open_rings)}")
    if pending is not None:
        raise PatternError("dangling bond symbol")
    if prev_stack:
        raise PatternError("unclosed branch")
    pattern = QueryPattern(pattern_atoms=atoms, pattern_bonds=bonds, source_text=text)
    _check_connected(pattern)
    return pattern


def _check_connected(pattern: QueryPattern) -> None:
    if len(pattern.pattern_atoms) <= 1:
        return
    adj = pattern.adjacency()
    seen = {0}
    stack = [0]
    while stack:
        cur = stack.pop()
        for nb, _ in adj[cur]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != len(pattern.pattern_atoms):
        raise PatternError("pattern graph must be connected")


def match_pattern(mol: Molecule, pattern: QueryPattern) -> list[tuple[int, ...]]:
    """All embeddings of the pattern into the molecule, deterministically ordered.

    Each result maps pattern atom k to molecule atom ``result[k]``.
    """
    p_count = len(pattern.pattern_atoms)
    if p_count == 0:
        return []
    if p_count > len(mol.atoms):
        return []
    p_adj = pattern.adjacency()

    # Order pattern atoms so each (after the first) touches an earlier one.
    order = [0]
    placed = {0}
    while len(order) < p_count:
        for candidate in range(p_count):
            if candidate in placed:
                continue
            if any(nb in placed for nb, _ in p_adj[candidate]):
                order.append(candidate)
                placed.add(candidate)
                break
        else:  # disconnected guard; parse_pattern already rejects this
            raise PatternError("pattern graph must be connected")

    results: list[tuple[int, ...]] = []
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(depth: int) -> None:
        if depth == p_count:
            results.append(tuple(mapping[k] for k in range(p_count)))
            return
        p_atom = order[depth]
        anchors = [(nb, bi) for nb, bi in p_adj[p_atom] if nb in mapping]
        if anchors:
            anchor_nb, _ = anchors[0]
            candidates = [nb for nb, _ in mol.neighbors(mapping[anchor_nb])]
        else:
            candidates = list(range(len(mol.atoms)))
        for m_atom in candidates:
            if m_atom in used:
                continue
            if not pattern.pattern_atoms[p_atom].matches(mol, m_atom):
                continue
            ok = True
            for nb, bi in p_adj[p_atom]:
                if nb not in mapping:
                    continue
                bond = mol.bond_between(m_atom, mapping[nb])
                if bond is None or not pattern.pattern_bonds[bi][2].matches(bond.order):
                    ok = False
                    break
            if ok:
                mapping[p_atom] = m_atom
                used.add(m_atom)
                extend(depth + 1)
                used.discard(m_atom)
                del mapping[p_atom]

    extend(0)
    results.sort()
    return results


def has_match(mol: Molecule, pattern: QueryPattern) -> bool:
    return bool(match_pattern(mol, pattern))


def isomorphic(a: Molecule, b: Molecule) -> bool:
    """Exact graph isomorphism under (element, charge, aromatic, bond order).

    Used as the independent oracle for canonicalization round-trips, so it
    deliberately avoids canonical ranks and runs a plain VF2 search.
    """
    if len(a.atoms) != len(b.atoms) or len(a.bonds) != len(b.bonds):
        return False

    def label(mol: Molecule, i: int):
        at = mol.atoms[i]
        return (at.element, at.formal_charge, at.aromatic)

    a_labels = sorted(label(a, i) for i in range(len(a.atoms)))
    b_labels = sorted(label(b, i) for i in range(len(b.atoms)))
    if a_labels != b_labels:
        return False

    n = len(a.atoms)
    mapping: dict[int, int] = {}
    used: set[int] = set()
    a_adj = a.adjacency()

    order = _connect_order(a)

    def feasible(ai: int, bi_: int) -> bool:
        if label(a, ai) != label(b, bi_):
            return False
        if len(a_adj[ai]) != len(b.neighbors(bi_)):
            return False
        for nb, bond_i in a_adj[ai]:
            if nb in mapping:
                bond_b = b.bond_between(bi_, mapping[nb])
                if bond_b is None or bond_b.order != a.bonds[bond_i].order:
                    return False
        return True

    def extend(depth: int) -> bool:
        if depth == n:
            return True
        ai = order[depth]
        anchored = [(nb, bi_) for nb, bi_ in a_adj[ai] if nb in mapping]
        candidates = (
            [nb for nb, _ in b.neighbors(mapping[anchored[0][0]])]
            if anchored
            else range(n)
        )
        for cand in candidates:
            if cand in used or not feasible(ai, cand):
                continue
            mapping[ai] = cand
            used.add(cand)
            if extend(depth + 1):
                return True
            used.discard(cand)
            del mapping[ai]
        return False

    return extend(0)


def _connect_order(mol: Molecule) -> list[int]:
    n = len(mol.atoms)
    adj = mol.adjacency()
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < n:
        seed = next(i for i in range(n) if i not in placed)
        order.append(seed)
        placed.add(seed)
        frontier = True
        while frontier:
            frontier = False
            for candidate in range(n):
                if candidate in placed:
                    continue
                if any(nb in placed for nb, _ in adj[candidate]):
                    order.append(candidate)
                    placed.add(candidate)
                    frontier = True
    return order
