"""Deterministic chemistry substrate: parsing, canonical forms, fingerprints,
descriptors and substructure search."""

from molforge.chem.canon import canonicalize
from molforge.chem.descriptors import DescriptorSet, compute_descriptors, lipinski_pass
from molforge.chem.fingerprint import Fingerprint, morgan_fingerprint, tanimoto
from molforge.chem.molecule import (
    Atom,
    Bond,
    ChemError,
    Molecule,
    SmilesSyntaxError,
    UnsupportedElementError,
    ValenceError,
)
from molforge.chem.parser import parse_smiles
from molforge.chem.pattern import (
    PatternError,
    QueryPattern,
    has_match,
    isomorphic,
    match_pattern,
    parse_pattern,
)

__all__ = [
    "Atom",
    "Bond",
    "ChemError",
    "DescriptorSet",
    "Fingerprint",
    "Molecule",
    "PatternError",
    "QueryPattern",
    "SmilesSyntaxError",
    "UnsupportedElementError",
    "ValenceError",
    "canonicalize",
    "canonical_smiles",
    "compute_descriptors",
    "has_match",
    "isomorphic",
    "lipinski_pass",
    "match_pattern",
    "morgan_fingerprint",
    "parse_pattern",
    "parse_smiles",
    "tanimoto",
]


def canonical_smiles(text: str) -> str:
    """Parse + canonicalize in one step."""
    return canonicalize(parse_smiles(text))
