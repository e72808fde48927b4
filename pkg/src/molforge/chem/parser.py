"""SMILES parser for the supported dialect.

Supported: organic-subset atoms, bracket atoms with charge and H-count,
ring closures (including %nn), branches, single/double/triple/aromatic
bonds, lowercase aromatic atoms, and dot-separated fragments (flagged
``multifragment``).  Stereo markers (``/``, ``\\``, ``@``) and isotope
labels are accepted and discarded with a warning; stereochemistry is out
of scope for this engine.
"""

from __future__ import annotations

import re

from molforge.chem.elements import (
    AROMATIC_ELEMENTS,
    ORGANIC_SUBSET,
    SUPPORTED_ELEMENTS,
    allowed_valences,
)
from molforge.chem.molecule import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Atom,
    Bond,
    Molecule,
    SmilesSyntaxError,
    UnsupportedElementError,
    ValenceError,
)
from molforge.chem.rings import perceive_rings_and_aromaticity

_BRACKET_RE = re.compile(
    r"""^\[
        (?P<isotope>\d+)?
        (?P<element>br|cl|b|c|n|o|p|s|as|se|[A-Z][a-z]?)
        (?P<stereo>@{1,2})?
        (?P<hcount>H\d*)?
        (?P<charge>\+{1,3}|-{1,3}|\+\d|-\d)?
        (?::\d+)?
    \]$""",
    re.VERBOSE,
)

_ORGANIC_AROMATIC = ("b", "c", "n", "o", "p", "s")

_BOND_CHARS = {"-": BOND_SINGLE, "=": BOND_DOUBLE, "#": BOND_TRIPLE, ":": BOND_AROMATIC}


def _parse_charge(text: str) -> int:
    if text[-1].isdigit():
        return int(text[1:]) * (1 if text[0] == "+" else -1)
    return len(text) * (1 if text[0] == "+" else -1)


def _parse_bracket_atom(token: str, warnings: list[str]) -> Atom:
    match = _BRACKET_RE.match(token)
    if match is None:
        raise SmilesSyntaxError(f"malformed bracket atom {token!r}")
    raw_element = match.group("element")
    aromatic = raw_element[0].islower()
    element = raw_element.capitalize()
    if element not in SUPPORTED_ELEMENTS:
        raise UnsupportedElementError(f"unsupported element {element!r}")
    if aromatic and element not in AROMATIC_ELEMENTS:
        raise SmilesSyntaxError(f"element {element!r} cannot be aromatic")
    if match.group("isotope"):
        warnings.append(f"isotope label discarded in {token!r}")
    if match.group("stereo"):
        warnings.append(f"stereo marker discarded in {token!r}")
    hcount_text = match.group("hcount")
    if hcount_text is None:
        hcount = 0
    elif hcount_text == "H":
        hcount = 1
    else:
        hcount = int(hcount_text[1:])
    charge_text = match.group("charge")
    charge = _parse_charge(charge_text) if charge_text else 0
    atom = Atom(element=element, aromatic=aromatic, formal_charge=charge, implicit_h=hcount)
    return atom


class _PendingRing:
    __slots__ = ("atom", "order", "position")

    def __init__(self, atom: int, order: int | None, position: int):
        self.atom = atom
        self.order = order
        self.position = position


def parse_smiles(text: str) -> Molecule:
    """Parse SMILES text into a valence-checked, ring/aromaticity-perceived graph.

    Raises :class:`SmilesSyntaxError` for grammar violations (including
    unclosed ring bonds and aromatic atoms that fail the aromaticity
    model), :class:`ValenceError` when explicit bonds exceed every allowed
    valence, and :class:`UnsupportedElementError` outside the element subset.
    """
    if not isinstance(text, str):
        raise SmilesSyntaxError("SMILES must be a string")
    text = text.strip()
    if not text:
        raise SmilesSyntaxError("empty SMILES")

    mol = Molecule(smiles_input=text)
    warnings: list[str] = []
    # (atom index, explicit hcount or None) per parsed atom; None means
    # organic-subset atom whose implicit H count is derived from valence.
    explicit_h: list[int | None] = []
    bond_pairs: set[tuple[int, int]] = set()

    prev_stack: list[int | None] = []
    prev: int | None = None
    pending_order: int | None = None
    open_rings: dict[int, _PendingRing] = {}
    fragment_break = False

    def add_atom(atom: Atom, hcount: int | None) -> int:
        mol.atoms.append(atom)
        explicit_h.append(hcount)
        return len(mol.atoms) - 1

    def check_leading_bond(position: int) -> None:
        if pending_order is not None and prev is None:
            raise SmilesSyntaxError(f"bond symbol with no preceding atom at position {position}")

    def add_bond(a: int, b: int, order: int | None, position: int) -> None:
        if a == b:
            raise SmilesSyntaxError(f"self-bond at position {position}")
        key = (min(a, b), max(a, b))
        if key in bond_pairs:
            raise SmilesSyntaxError(f"duplicate bond at position {position}")
        bond_pairs.add(key)
        if order is None:
            if mol.atoms[a].aromatic and mol.atoms[b].aromatic:
                order = BOND_AROMATIC
            else:
                order = BOND_SINGLE
        mol.bonds.append(Bond(a=a, b=b, order=order))

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "(":
            if prev is None:
                raise SmilesSyntaxError(f"branch with no preceding atom at position {i}")
            prev_stack.append(prev)
            i += 1
            continue
        if ch == ")":
            if not prev_stack:
                raise SmilesSyntaxError(f"unmatched ')' at position {i}")
            prev = prev_stack.pop()
            i += 1
            continue
        if ch in _BOND_CHARS:
            if pending_order is not None:
                raise SmilesSyntaxError(f"two bond symbols in a row at position {i}")
            pending_order = _BOND_CHARS[ch]
            i += 1
            continue
        if ch in "/\\":
            warnings.append(f"stereo bond marker at position {i} treated as single bond")
            pending_order = BOND_SINGLE
            i += 1
            continue
        if ch == ".":
            if pending_order is not None:
                raise SmilesSyntaxError(f"bond before '.' at position {i}")
            if prev is None:
                raise SmilesSyntaxError(f"fragment separator with no preceding atom at position {i}")
            prev = None
            fragment_break = True
            i += 1
            continue
        if ch.isdigit() or ch == "%":
            if prev is None:
                raise SmilesSyntaxError(f"ring closure with no preceding atom at position {i}")
            if ch == "%":
                if i + 2 >= n or not text[i + 1 : i + 3].isdigit():
                    raise SmilesSyntaxError(f"malformed %nn ring closure at position {i}")
                number = int(text[i + 1 : i + 3])
                i += 3
            else:
                number = int(ch)
                i += 1
            if number in open_rings:
                pend = open_rings.pop(number)
                order = pending_order
                if order is not None and pend.order is not None and order != pend.order:
                    raise SmilesSyntaxError(f"conflicting ring-bond orders for closure {number}")
                if order is None:
                    order = pend.order
                add_bond(pend.atom, prev, order, i)
            else:
                open_rings[number] = _PendingRing(prev, pending_order, i)
            pending_order = None
            continue
        if ch == "[":
            end = text.find("]", i)
            if end == -1:
                raise SmilesSyntaxError(f"unterminated bracket atom at position {i}")
            atom = _parse_bracket_atom(text[i : end + 1], warnings)
            check_leading_bond(i)
            idx = add_atom(atom, atom.implicit_h)
            if prev is not None:
                add_bond(prev, idx, pending_order, i)
            pending_order = None
            prev = idx
            i = end + 1
            continue
        matched = None
        for sym in ORGANIC_SUBSET:
            if text.startswith(sym, i):
                matched = sym
                break
        if matched is not None:
            check_leading_bond(i)
            idx = add_atom(Atom(element=matched), None)
            if prev is not None:
                add_bond(prev, idx, pending_order, i)
            pending_order = None
            prev = idx
            i += len(matched)
            continue
        if ch in _ORGANIC_AROMATIC:
            check_leading_bond(i)
            idx = add_atom(Atom(element=ch.upper(), aromatic=True), None)
            if prev is not None:
                add_bond(prev, idx, pending_order, i)
            pending_order = None
            prev = idx
            i += 1
            continue
        raise SmilesSyntaxError(f"unexpected character {ch!r} at position {i}")

    if pending_order is not None:
        raise SmilesSyntaxError("dangling bond symbol at end of input")
    if prev_stack:
        raise SmilesSyntaxError("unclosed branch '('")
    if open_rings:
        numbers = sorted(open_rings)
        raise SmilesSyntaxError(f"unclosed ring bond(s): {numbers}")
    if not mol.atoms:
        raise SmilesSyntaxError("no atoms in SMILES")

    mol.multifragment = fragment_break
    if fragment_break:
        warnings.append("multifragment input; descriptors run on the full graph")

    _fold_explicit_hydrogens(mol, explicit_h)
    _assign_implicit_hydrogens(mol, explicit_h)
    perceive_rings_and_aromaticity(mol)
    _recheck_aromatic_hydrogens(mol, explicit_h)
    for idx, atom in enumerate(mol.atoms):
        atom.degree = len(mol.neighbors(idx))
    mol.warnings = warnings
    return mol


def _fold_explicit_hydrogens(mol: Molecule, explicit_h: list[int | None]) -> None:
    """Merge explicit [H] atoms into their heavy neighbor's H count.

    Only the plain case is supported: a neutral, single-bonded hydrogen on
    a heavy atom.  Hydrogen-only graphs are rejected.
    """
    h_indices = [
        i
        for i, a in enumerate(mol.atoms)
        if a.element == "H" and a.formal_charge == 0
    ]
    if not h_indices:
        return
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(mol.atoms))}
    for bi, bond in enumerate(mol.bonds):
        adj[bond.a].append((bond.b, bi))
        adj[bond.b].append((bond.a, bi))
    drop_atoms: set[int] = set()
    drop_bonds: set[int] = set()
    for h in h_indices:
        links = adj[h]
        if len(links) != 1 or mol.bonds[links[0][1]].order != BOND_SINGLE:
            raise SmilesSyntaxError("unsupported explicit-hydrogen topology")
        heavy, bi = links[0]
        if mol.atoms[heavy].element == "H":
            raise SmilesSyntaxError("hydrogen-hydrogen bond unsupported")
        extra = 1 + (explicit_h[h] or 0)
        if explicit_h[heavy] is None:
            explicit_h[heavy] = extra  # becomes an explicit count below
            mol.atoms[heavy].implicit_h = extra
        else:
            explicit_h[heavy] = explicit_h[heavy] + extra
            mol.atoms[heavy].implicit_h += extra
        drop_atoms.add(h)
        drop_bonds.add(bi)
    if drop_atoms:
        keep = [i for i in range(len(mol.atoms)) if i not in drop_atoms]
        if not keep:
            raise SmilesSyntaxError("hydrogen-only molecules are unsupported")
        remap = {old: new for new, old in enumerate(keep)}
        # A heavy atom that only had explicit-H info keeps a derived count
        # when it was organic-subset: flag by moving its count into the
        # explicit list (handled above); now rebuild the lists.
        mol.atoms = [mol.atoms[i] for i in keep]
        new_explicit = [explicit_h[i] for i in keep]
        explicit_h.clear()
        explicit_h.extend(new_explicit)
        mol.bonds = [
            Bond(a=remap[b.a], b=remap[b.b], order=b.order)
            for bi, b in enumerate(mol.bonds)
            if bi not in drop_bonds
        ]
        mol._neighbors = None


def _sigma_and_order(mol: Molecule, idx: int) -> tuple[int, float, bool, bool]:
    """(bond count, summed bond order, has double/triple, has aromatic bond)."""
    count = 0
    order_sum = 0.0
    has_multiple = False
    has_aromatic = False
    for _, bi in mol.neighbors(idx):
        bond = mol.bonds[bi]
        count += 1
        order_sum += bond.value()
        if bond.order in (BOND_DOUBLE, BOND_TRIPLE):
            has_multiple = True
        if bond.order == BOND_AROMATIC:
            has_aromatic = True
    return count, order_sum, has_multiple, has_aromatic


def _assign_implicit_hydrogens(mol: Molecule, explicit_h: list[int | None]) -> None:
    for idx, atom in enumerate(mol.atoms):
        count, order_sum, has_multiple, _ = _sigma_and_order(mol, idx)
        valences = allowed_valences(atom.element, atom.formal_charge)
        if explicit_h[idx] is not None:
            # Bracket atom: H count is authoritative; just validate capacity.
            used = order_sum + explicit_h[idx]
            if atom.aromatic:
                used = _aromatic_adjusted(mol, idx) + explicit_h[idx]
            if used > max(valences) + 1e-9:
                raise ValenceError(
                    f"atom {idx} ({atom.element}{atom.formal_charge:+d}) exceeds valence "
                    f"{max(valences)} with {used:g} connections"
                )
            atom.implicit_h = explicit_h[idx]
            continue
        if atom.aromatic:
            # Lowercase organic-subset atom.  Aromatic bonds count one sigma
            # each; carbon (and pyridine-type N/P) also commits one electron
            # to a ring pi bond unless an explicit double bond already does.
            base = valences[0]
            sigma = count
            extra = int(round(_aromatic_adjusted(mol, idx) - count))
            pi = 0
            if atom.element == "C":
                pi = 0 if has_multiple else 1
            elif atom.element in ("N", "P"):
                pi = 1 if (not has_multiple and count <= 2) else 0
            hydrogens = base - sigma - extra - pi
            if hydrogens < 0:
                raise ValenceError(f"aromatic atom {idx} ({atom.element}) over valence")
            atom.implicit_h = hydrogens
            continue
        needed = order_sum
        chosen = None
        for v in valences:
            if v + 1e-9 >= needed:
                chosen = v
                break
        if chosen is None:
            raise ValenceError(
                f"atom {idx} ({atom.element}{atom.formal_charge:+d}) has bond order sum "
                f"{needed:g} exceeding allowed valences {valences}"
            )
        atom.implicit_h = int(round(chosen - needed))


def _aromatic_adjusted(mol: Molecule, idx: int) -> float:
    """Bond-order sum counting aromatic bonds as plain sigma bonds."""
    total = 0.0
    for _, bi in mol.neighbors(idx):
        bond = mol.bonds[bi]
        total += 1.0 if bond.order == BOND_AROMATIC else bond.value()
    return total


def _recheck_aromatic_hydrogens(mol: Molecule, explicit_h: list[int | None]) -> None:
    """Re-derive implicit H for atoms aromatized during perception.

    Parsing a kekulized ring assigns H counts from explicit bond orders;
    perception then rewrites those bonds to aromatic.  The counts must not
    change — this pass asserts consistency rather than adjusting, keeping
    perception idempotent.
    """
    for idx, atom in enumerate(mol.atoms):
        if not atom.aromatic or explicit_h[idx] is not None:
            continue
        if atom.implicit_h < 0:
            raise ValenceError(f"negative hydrogen count on atom {idx}")
