#!/usr/bin/env python3
"""Regenerate the synthetic-accessibility fragment-score table.

Expands the curated base corpus with deterministic valence-safe mutations
to roughly five thousand structures, counts radius-2 atom environments
with the engine's own hashes, and writes log-relative-frequency scores:

    score(env) = log10(count(env) / median_count), clamped to [-4, 4]

Run from the repository root:

    python scripts/generate_sa_table.py
"""

from __future__ import annotations

import json

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from molforge.chem.fingerprint import environment_counts  # noqa: E402
from molforge.chem.molecule import ChemError  # noqa: E402
from molforge.chem.mutate import mutate  # noqa: E402
from molforge.chem.parser import parse_smiles  # noqa: E402

DATA = ROOT / "src" / "molforge" / "chem" / "data"
VARIANTS_PER_BASE = 31


def load_base() -> list[str]:
    out = []
    for line in (DATA / "corpus_ref.smi").read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def build_corpus(base: list[str]) -> list[str]:
    corpus: list[str] = []
    seen: set[str] = set()
    for smiles in base:
        if smiles not in seen:
            seen.add(smiles)
            corpus.append(smiles)
        for k in range(VARIANTS_PER_BASE):
            variant = mutate(smiles, seed=k, round_index=0)
            if k % 3 == 2:  # a second edit on every third variant
                variant = mutate(variant, seed=k, round_index=1)
            if variant in seen:
                continue
            try:
                parse_smiles(variant)
            except ChemError:
                continue
            seen.add(variant)
            corpus.append(variant)
    return corpus


def main() -> None:
    base = load_base()
    corpus = build_corpus(base)
    print(f"corpus size: {len(corpus)} (from {len(base)} base structures)")

    totals: dict[int, int] = {}
    for smiles in corpus:
        mol = parse_smiles(smiles)
        for env, count in environment_counts(mol, radius=2).items():
            totals[env] = totals.get(env, 0) + count

    import math

    # Anchor on the mean instance count so common drug-like environments
    # score positive and singletons negative, landing typical drug-like
    # molecules near the published 2-3.5 band after the scale transform.
    grand_total = sum(totals.values())
    mean_count = grand_total / len(totals)
    scores = {
        str(env): round(max(-4.0, min(4.0, math.log10(count / mean_count))), 4)
        for env, count in totals.items()
    }
    payload = {
        "comment": "fragment scores: log10(count/mean) over the bundled corpus, engine hashes, radius 2",
        "corpus_size": len(corpus),
        "mean_count": round(mean_count, 4),
        "scores": scores,
    }
    (DATA / "sa_corpus.smi").write_text("\n".join(corpus) + "\n")
    (DATA / "sa_fragments.json").write_text(json.dumps(payload, sort_keys=True))
    print(f"environments: {len(scores)}, mean count: {round(mean_count, 2)}")


if __name__ == "__main__":
    main()
