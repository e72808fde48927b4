"""Morgan fingerprints and Tanimoto similarity."""

import random

import pytest

from molforge.chem import morgan_fingerprint, parse_smiles, tanimoto
from molforge.chem.fingerprint import Fingerprint, atom_environment_hashes
from tests.corpus_util import load_corpus


def test_methane_single_environment():
    # Brute-force expectation: an isolated atom has exactly one distinct
    # environment; all radii collapse onto radius 0.
    envs = atom_environment_hashes(parse_smiles("C"), radius=2)
    all_hashes = {h for hashes in envs.values() for h in hashes}
    assert len(all_hashes) == 1
    assert morgan_fingerprint(parse_smiles("C")).popcount == 1


def test_renumbering_invariance_thousand_permutations():
    rng = random.Random(5)
    molecules = [parse_smiles(s) for s in load_corpus()[:40]]
    checked = 0
    for mol in molecules:
        reference = morgan_fingerprint(mol)
        for _ in range(25):
            order = list(range(len(mol.atoms)))
            rng.shuffle(order)
            assert morgan_fingerprint(mol.permuted(order)).bits == reference.bits
            checked += 1
    assert checked == 1000


def test_constitutional_isomers_differ():
    ethanol = morgan_fingerprint(parse_smiles("CCO"))
    dimethyl_ether = morgan_fingerprint(parse_smiles("COC"))
    assert ethanol.bits != dimethyl_ether.bits


def test_popcount_invariant():
    fp = morgan_fingerprint(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"))
    assert fp.popcount == bin(fp.bits).count("1")


def test_determinism_across_calls():
    a = morgan_fingerprint(parse_smiles("CN1CCCC1c1cccnc1"))
    b = morgan_fingerprint(parse_smiles("CN1CCCC1c1cccnc1"))
    assert a.bits == b.bits


def test_tanimoto_identity():
    fp = morgan_fingerprint(parse_smiles("CCO"))
    assert tanimoto(fp, fp) == 1.0


def test_tanimoto_disjoint_zero():
    a = Fingerprint.from_bitset(0b0011)
    b = Fingerprint.from_bitset(0b1100)
    assert tanimoto(a, b) == 0.0


def test_tanimoto_quarter():
    a = Fingerprint.from_bitset(0b0011)  # |a| = 2
    b = Fingerprint.from_bitset(0b0111 << 1 & 0b1110)  # bits {1,2,3}
    assert tanimoto(a, b) == pytest.approx(0.25)


def test_tanimoto_empty_convention():
    empty = Fingerprint.from_bitset(0)
    assert tanimoto(empty, empty) == 1.0


def test_tanimoto_width_mismatch():
    a = Fingerprint.from_bitset(1, width=2048)
    b = Fingerprint.from_bitset(1, width=1024)
    with pytest.raises(ValueError):
        tanimoto(a, b)


def test_tanimoto_symmetric_and_bounded():
    fps = [morgan_fingerprint(parse_smiles(s)) for s in load_corpus()[:15]]
    for i in range(len(fps)):
        for j in range(len(fps)):
            s = tanimoto(fps[i], fps[j])
            assert 0.0 <= s <= 1.0
            assert s == tanimoto(fps[j], fps[i])
