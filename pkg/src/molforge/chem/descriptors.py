"""Per-molecule descriptor set: weight, lipophilicity, polarity, drug-likeness.

Conventions (documented, oracle-aligned):

* HBD counts N/O atoms bearing at least one hydrogen.
* HBA counts N and O atoms, excluding pyrrole-type aromatic N (lone pair
  in the ring pi system) and amide N.
* Rotatable bonds are non-ring single bonds whose ends both have another
  heavy neighbor, excluding bonds adjacent to a triple bond.
* Aromatic ring count is over SSSR rings whose atoms are all aromatic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from molforge.chem.crippen import crippen_logp
from molforge.chem.molecule import (
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Molecule,
)
from molforge.chem.pattern import QueryPattern, has_match, parse_pattern
from molforge.chem.qed import qed_score
from molforge.chem.rings import aromatic_ring_count, find_sssr
from molforge.chem.sa import sa_score
from molforge.chem.tpsa import tpsa


@dataclass(slots=True, frozen=True)
class DescriptorSet:
    mol_weight: float
    logp: float
    hbd: int
    hba: int
    tpsa: float
    rot_bonds: int
    aromatic_rings: int
    alerts: int
    qed: float
    sa_score: float
    ro5_violations: int

    def as_dict(self) -> dict[str, float]:
        return {
            "mol_weight": self.mol_weight,
            "logp": self.logp,
            "hbd": self.hbd,
            "hba": self.hba,
            "tpsa": self.tpsa,
            "rot_bonds": self.rot_bonds,
            "aromatic_rings": self.aromatic_rings,
            "alerts": self.alerts,
            "qed": self.qed,
            "sa_score": self.sa_score,
            "ro5_violations": self.ro5_violations,
        }


@lru_cache(maxsize=1)
def alert_patterns() -> list[tuple[str, QueryPattern]]:
    text = resources.files("molforge.chem.data").joinpath("alerts.txt").read_text()
    patterns = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, _, pattern_text = line.partition("\t")
        patterns.append((name, parse_pattern(pattern_text.strip())))
    return patterns


def count_alerts(mol: Molecule) -> int:
    """Number of alert patterns with at least one embedding."""
    return sum(1 for _, pattern in alert_patterns() if has_match(mol, pattern))


def hydrogen_bond_donors(mol: Molecule) -> int:
    return sum(
        1
        for atom in mol.atoms
        if atom.element in ("N", "O") and atom.implicit_h >= 1
    )


def _is_amide_nitrogen(mol: Molecule, idx: int) -> bool:
    for nb, bi in mol.neighbors(idx):
        if mol.bonds[bi].order != BOND_SINGLE:
            continue
        carbon = mol.atoms[nb]
        if carbon.element != "C" or carbon.aromatic:
            continue
        for nb2, bi2 in mol.neighbors(nb):
            if mol.bonds[bi2].order == BOND_DOUBLE and mol.atoms[nb2].element in ("O", "S"):
                return True
    return False


def _is_pyrrole_type_nitrogen(mol: Molecule, idx: int) -> bool:
    atom = mol.atoms[idx]
    if not atom.aromatic:
        return False
    # Lone pair committed to the ring: N-H in ring or three sigma bonds.
    return atom.implicit_h >= 1 or len(mol.neighbors(idx)) >= 3


def hydrogen_bond_acceptors(mol: Molecule) -> int:
    count = 0
    for idx, atom in enumerate(mol.atoms):
        if atom.element == "O":
            count += 1
        elif atom.element == "N":
            if _is_pyrrole_type_nitrogen(mol, idx):
                continue
            if _is_amide_nitrogen(mol, idx):
                continue
            count += 1
    return count


def rotatable_bonds(mol: Molecule) -> int:
    adj = mol.adjacency()
    triple_atoms = {
        b.a for b in mol.bonds if b.order == BOND_TRIPLE
    } | {b.b for b in mol.bonds if b.order == BOND_TRIPLE}
    count = 0
    for bond in mol.bonds:
        if bond.order != BOND_SINGLE or bond.in_ring:
            continue
        if len(adj[bond.a]) < 2 or len(adj[bond.b]) < 2:
            continue
        if bond.a in triple_atoms or bond.b in triple_atoms:
            continue
        count += 1
    return count


def compute_descriptors(mol: Molecule) -> DescriptorSet:
    """Fill every descriptor field for a parsed molecule."""
    mw = mol.molecular_weight()
    logp = crippen_logp(mol)
    hbd = hydrogen_bond_donors(mol)
    hba = hydrogen_bond_acceptors(mol)
    psa = tpsa(mol)
    rotb = rotatable_bonds(mol)
    rings = find_sssr(mol)
    arom = aromatic_ring_count(mol, rings)
    alerts = count_alerts(mol)
    qed = qed_score(
        {
            "MW": mw,
            "ALOGP": logp,
            "HBA": hba,
            "HBD": hbd,
            "PSA": psa,
            "ROTB": rotb,
            "AROM": arom,
            "ALERTS": alerts,
        }
    )
    sa = sa_score(mol)
    violations = sum(
        (mw > 500.0, logp > 5.0, hbd > 5, hba > 10)
    )
    return DescriptorSet(
        mol_weight=mw,
        logp=logp,
        hbd=hbd,
        hba=hba,
        tpsa=psa,
        rot_bonds=rotb,
        aromatic_rings=arom,
        alerts=alerts,
        qed=qed,
        sa_score=sa,
        ro5_violations=violations,
    )


def lipinski_pass(descriptors: DescriptorSet) -> bool:
    """Oral-bioavailability heuristic: at most one rule-of-five violation."""
    return descriptors.ro5_violations <= 1
