"""Pattern language and subgraph matching."""

import pytest

from molforge.chem import has_match, match_pattern, parse_pattern, parse_smiles
from molforge.chem.pattern import PatternError


def test_benzene_in_toluene():
    matches = match_pattern(parse_smiles("Cc1ccccc1"), parse_pattern("c1ccccc1"))
    assert len(matches) >= 1


def test_benzene_not_in_cyclohexane():
    assert match_pattern(parse_smiles("C1CCCCC1"), parse_pattern("c1ccccc1")) == []


def test_nitro_alert_in_nitrobenzene():
    from molforge.chem.descriptors import count_alerts

    nitrobenzene = parse_smiles("O=[N+]([O-])c1ccccc1")
    pattern = parse_pattern("[N;+](=O)[O;-]")
    assert len(match_pattern(nitrobenzene, pattern)) >= 1
    assert count_alerts(nitrobenzene) >= 1
    assert count_alerts(parse_smiles("c1ccccc1")) == 0


def test_charge_and_hcount_primitives():
    pattern = parse_pattern("[N;H2]")
    assert has_match(parse_smiles("NCC"), pattern)
    assert not has_match(parse_smiles("CN(C)C"), pattern)


def test_degree_primitive():
    pattern = parse_pattern("[C;D4]")
    assert has_match(parse_smiles("CC(C)(C)C"), pattern)
    assert not has_match(parse_smiles("CCC"), pattern)


def test_ring_primitive():
    assert has_match(parse_smiles("C1CCCCC1"), parse_pattern("[C;R]"))
    assert not has_match(parse_smiles("CCC"), parse_pattern("[C;R]"))
    assert has_match(parse_smiles("CCC"), parse_pattern("[C;R0]"))


def test_or_alternatives():
    pattern = parse_pattern("[F,Cl,Br]")
    assert has_match(parse_smiles("CCCl"), pattern)
    assert has_match(parse_smiles("CCF"), pattern)
    assert not has_match(parse_smiles("CCO"), pattern)


def test_negation():
    pattern = parse_pattern("[!C]")
    assert has_match(parse_smiles("CCO"), pattern)
    assert not has_match(parse_smiles("CCC"), pattern)


def test_bond_predicates():
    assert has_match(parse_smiles("C=CC"), parse_pattern("C=C"))
    assert not has_match(parse_smiles("CCC"), parse_pattern("C=C"))
    assert has_match(parse_smiles("C#N"), parse_pattern("C#N"))
    # Default bond matches aromatic too.
    assert has_match(parse_smiles("c1ccccc1"), parse_pattern("cc"))
    # ~ matches anything.
    assert has_match(parse_smiles("C=CC"), parse_pattern("C~C"))


def test_disconnected_pattern_rejected():
    with pytest.raises(PatternError):
        parse_pattern("C.C")


def test_match_ordering_deterministic():
    mol = parse_smiles("Cc1ccccc1C")
    pattern = parse_pattern("c1ccccc1")
    first = match_pattern(mol, pattern)
    second = match_pattern(mol, pattern)
    assert first == second == sorted(first)


def test_embeddings_count_benzene_in_benzene():
    # 6 rotations x 2 orientations.
    matches = match_pattern(parse_smiles("c1ccccc1"), parse_pattern("c1ccccc1"))
    assert len(matches) == 12


def test_wildcard():
    assert has_match(parse_smiles("CCO"), parse_pattern("*O"))
