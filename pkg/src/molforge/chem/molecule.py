"""Molecular graph types and the errors the chemistry layer raises."""

from __future__ import annotations

from dataclasses import dataclass, field

from molforge.chem.elements import ATOMIC_WEIGHT

BOND_SINGLE = 1
BOND_DOUBLE = 2
BOND_TRIPLE = 3
BOND_AROMATIC = 4

_BOND_ORDER_VALUE = {BOND_SINGLE: 1.0, BOND_DOUBLE: 2.0, BOND_TRIPLE: 3.0, BOND_AROMATIC: 1.5}


class ChemError(ValueError):
    """Base class for chemistry-layer failures."""


class SmilesSyntaxError(ChemError):
    """The SMILES text violates the supported grammar."""


class ValenceError(ChemError):
    """An atom's explicit bonds exceed every allowed valence."""


class UnsupportedElementError(ChemError):
    """Element outside the supported periodic-table subset."""


@dataclass(slots=True)
class Atom:
    """One atom of a molecular graph.

    ``implicit_h`` is filled during parsing so that the total valence hits
    the smallest allowed value for (element, charge); ``degree`` counts
    explicit bonds only.
    """

    element: str
    aromatic: bool = False
    formal_charge: int = 0
    implicit_h: int = 0
    in_ring: bool = False
    degree: int = 0


@dataclass(slots=True)
class Bond:
    a: int
    b: int
    order: int = BOND_SINGLE
    in_ring: bool = False

    def value(self) -> float:
        return _BOND_ORDER_VALUE[self.order]

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a


@dataclass(slots=True)
class Molecule:
    """Parsed molecular graph with perceived rings and aromaticity.

    Instances are treated as immutable once returned by the parser; all
    downstream computation is pure.  ``canonical_smiles`` is filled lazily
    by :func:`molforge.chem.canon.canonicalize`.
    """

    atoms: list[Atom] = field(default_factory=list)
    bonds: list[Bond] = field(default_factory=list)
    smiles_input: str = ""
    canonical_smiles: str = ""
    multifragment: bool = False
    warnings: list[str] = field(default_factory=list)
    _neighbors: list[list[tuple[int, int]]] | None = None

    def neighbors(self, idx: int) -> list[tuple[int, int]]:
        """(neighbor atom index, bond index) pairs for one atom."""
        return self.adjacency()[idx]

    def adjacency(self) -> list[list[tuple[int, int]]]:
        if self._neighbors is None:
            adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
            for bi, bond in enumerate(self.bonds):
                adj[bond.a].append((bond.b, bi))
                adj[bond.b].append((bond.a, bi))
            self._neighbors = adj
        return self._neighbors

    def bond_between(self, a: int, b: int) -> Bond | None:
        for nb, bi in self.neighbors(a):
            if nb == b:
                return self.bonds[bi]
        return None

    def heavy_atom_count(self) -> int:
        return sum(1 for atom in self.atoms if atom.element != "H")

    def total_implicit_h(self) -> int:
        return sum(atom.implicit_h for atom in self.atoms)

    def molecular_weight(self) -> float:
        weight = 0.0
        for atom in self.atoms:
            weight += ATOMIC_WEIGHT[atom.element]
            weight += atom.implicit_h * ATOMIC_WEIGHT["H"]
        return weight

    def permuted(self, order: list[int]) -> "Molecule":
        """Rebuild the graph with atoms renumbered by ``order``.

        ``order[new_index] = old_index``; used by canonicalization tests to
        assert invariance under renumbering.
        """
        if sorted(order) != list(range(len(self.atoms))):
            raise ValueError("order must be a permutation of atom indices")
        old_to_new = {old: new for new, old in enumerate(order)}
        atoms = [
            Atom(
                element=self.atoms[old].element,
                aromatic=self.atoms[old].aromatic,
                formal_charge=self.atoms[old].formal_charge,
                implicit_h=self.atoms[old].implicit_h,
                in_ring=self.atoms[old].in_ring,
                degree=self.atoms[old].degree,
            )
            for old in order
        ]
        bonds = [
            Bond(a=old_to_new[b.a], b=old_to_new[b.b], order=b.order, in_ring=b.in_ring)
            for b in self.bonds
        ]
        return Molecule(
            atoms=atoms,
            bonds=bonds,
            smiles_input=self.smiles_input,
            multifragment=self.multifragment,
            warnings=list(self.warnings),
        )
