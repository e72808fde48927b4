"""Circular (Morgan-style) fingerprints and Tanimoto similarity.

Environment hashing uses blake2b, so bit assignments are stable across
platforms and Python processes but intentionally not compatible with any
external toolkit; similarity numbers are only meaningful within this
engine.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

from molforge.chem.molecule import Molecule

DEFAULT_WIDTH = 2048
DEFAULT_RADIUS = 2


_MASK64 = (1 << 64) - 1


def _stable_hash(*values: int) -> int:
    packed = struct.pack(f"<{len(values)}Q", *(v & _MASK64 for v in values))
    return int.from_bytes(hashlib.blake2b(packed, digest_size=8).digest(), "little")


@dataclass(frozen=True, slots=True)
class Fingerprint:
    """Fixed-width bitset with a cached popcount."""

    bits: int
    width: int = DEFAULT_WIDTH
    popcount: int = 0

    @classmethod
    def from_bitset(cls, bits: int, width: int = DEFAULT_WIDTH) -> "Fingerprint":
        return cls(bits=bits, width=width, popcount=bits.bit_count())

    def on_bits(self) -> list[int]:
        bits = self.bits
        out = []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out


def atom_environment_hashes(
    mol: Molecule, radius: int = DEFAULT_RADIUS
) -> dict[int, list[int]]:
    """Per-atom environment hash per radius 0..r.

    Radius-0 invariants are (element, charge, degree, implicit H, ring
    flag, aromatic flag); each round hashes the previous value with the
    sorted (bond order, neighbor hash) multiset.  Atoms without neighbors
    stop at radius 0 — a lone atom has exactly one distinct environment.
    """
    adj = mol.adjacency()
    current: list[int] = []
    for i, atom in enumerate(mol.atoms):
        current.append(
            _stable_hash(
                ord(atom.element[0]) * 256 + (ord(atom.element[1]) if len(atom.element) > 1 else 0),
                atom.formal_charge,
                len(adj[i]),
                atom.implicit_h,
                1 if atom.in_ring else 0,
                1 if atom.aromatic else 0,
            )
        )
    per_atom: dict[int, list[int]] = {i: [current[i]] for i in range(len(mol.atoms))}
    for _ in range(radius):
        nxt = list(current)
        for i in range(len(mol.atoms)):
            if not adj[i]:
                continue
            neigh = sorted((mol.bonds[bi].order, current[nb]) for nb, bi in adj[i])
            flat: list[int] = [current[i]]
            for order, h in neigh:
                flat.append(order)
                flat.append(h)
            nxt[i] = _stable_hash(*flat)
            per_atom[i].append(nxt[i])
        current = nxt
    return per_atom


def morgan_fingerprint(
    mol: Molecule, radius: int = DEFAULT_RADIUS, width: int = DEFAULT_WIDTH
) -> Fingerprint:
    """Fold all environment hashes into a fixed-width bitset."""
    bits = 0
    for hashes in atom_environment_hashes(mol, radius).values():
        for value in hashes:
            bits |= 1 << (value % width)
    return Fingerprint.from_bitset(bits, width)


def environment_counts(mol: Molecule, radius: int = DEFAULT_RADIUS) -> dict[int, int]:
    """Multiset of environment hashes (all radii), for SA-style scoring."""
    counts: dict[int, int] = {}
    for hashes in atom_environment_hashes(mol, radius).values():
        for value in hashes:
            counts[value] = counts.get(value, 0) + 1
    return counts


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a & b| / |a | b|; 1.0 when both fingerprints are empty."""
    if a.width != b.width:
        raise ValueError(f"fingerprint width mismatch: {a.width} != {b.width}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union
