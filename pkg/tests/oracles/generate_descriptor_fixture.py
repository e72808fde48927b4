#!/usr/bin/env python3
"""Freeze the 100-molecule descriptor reference fixture.

Reference values come from the independent straight-line oracle
implementations in ``descriptor_oracle.py`` (separately typed tables, a
different fragment hash); QED consumes the engine's alert count per the
same-alert convention.  Output: tests/fixtures/descriptor_reference.json.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from molforge.chem.descriptors import (  # noqa: E402
    count_alerts,
    hydrogen_bond_acceptors,
    hydrogen_bond_donors,
    rotatable_bonds,
)
from molforge.chem.parser import parse_smiles  # noqa: E402
from molforge.chem.rings import aromatic_ring_count  # noqa: E402
from oracles.descriptor_oracle import (  # noqa: E402
    build_oracle_sa_table,
    oracle_logp,
    oracle_mw,
    oracle_qed,
    oracle_sa,
    oracle_tpsa,
)

DATA = ROOT / "src" / "molforge" / "chem" / "data"
OUT = ROOT / "tests" / "fixtures" / "descriptor_reference.json"


def main() -> None:
    base = [
        line.strip()
        for line in (DATA / "corpus_ref.smi").read_text().splitlines()
        if line.strip() and not line.startswith("#")
    ]
    # Every other entry until 100 molecules: spreads across the corpus
    # families (drugs, scaffolds, fragments) deterministically.
    picked = base[::2][:100]
    assert len(picked) == 100, f"fixture needs 100 molecules, got {len(picked)}"

    sa_corpus = [
        parse_smiles(line)
        for line in (DATA / "sa_corpus.smi").read_text().splitlines()
        if line.strip()
    ]
    sa_table = build_oracle_sa_table(sa_corpus)

    records = []
    for smiles in picked:
        mol = parse_smiles(smiles)
        props = {
            "MW": oracle_mw(mol),
            "ALOGP": oracle_logp(mol),
            "HBA": hydrogen_bond_acceptors(mol),
            "HBD": hydrogen_bond_donors(mol),
            "PSA": oracle_tpsa(mol),
            "ROTB": rotatable_bonds(mol),
            "AROM": aromatic_ring_count(mol),
            "ALERTS": count_alerts(mol),
        }
        records.append(
            {
                "smiles": smiles,
                "mw": round(oracle_mw(mol), 6),
                "tpsa": round(oracle_tpsa(mol), 6),
                "logp": round(oracle_logp(mol), 6),
                "qed": round(oracle_qed(props), 6),
                "sa": round(oracle_sa(mol, sa_table), 6),
            }
        )
    OUT.write_text(json.dumps({"molecules": records}, indent=1))
    print(f"wrote {len(records)} reference records -> {OUT}")


if __name__ == "__main__":
    main()
