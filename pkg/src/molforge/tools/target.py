"""Target context assembled by the data-retrieval tools."""

from __future__ import annotations

from dataclasses import dataclass, field

AMINO_ALPHABET = set("ACDEFGHIKLMNPQRSTVWYX")


@dataclass(slots=True)
class TargetContext:
    uniprot_accession: str = ""
    gene: str = ""
    protein_name: str = ""
    protein_sequence: str = ""
    pdb_id: str = ""
    structure_ref: str = ""
    structure_predicted: bool = False
    actives: list[tuple[str, float, str]] = field(default_factory=list)
    inactives: list[tuple[str, float, str]] = field(default_factory=list)
    docking_box: dict | None = None

    def validate_sequence(self) -> None:
        if not self.protein_sequence:
            raise ValueError("empty protein sequence")
        bad = set(self.protein_sequence) - AMINO_ALPHABET
        if bad:
            raise ValueError(f"sequence contains invalid residues: {sorted(bad)}")

    def complete(self) -> bool:
        return bool(self.protein_sequence and self.structure_ref)
