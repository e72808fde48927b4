"""Sequence-to-molecule stub generator.

Deterministically samples scaffolds from the bundled corpus and applies
the valence-safe token edits, keyed by (sequence digest, seed, index) —
the same draws the engine's offline mock makes.  This is the first of
the two functions a real deployment replaces (see README).
"""

from __future__ import annotations

import hashlib
from functools import lru_cache
from importlib import resources

from toolserver.mutation import draw_index, mutate, tokenize

MIN_ATOM_TOKENS = 12
MAX_ATOM_TOKENS = 45
MAX_BATCH = 256

AMINO_ALPHABET = set("ACDEFGHIKLMNPQRSTVWYX")


@lru_cache(maxsize=1)
def scaffolds() -> list[str]:
    text = resources.files("toolserver.data").joinpath("scaffolds.smi").read_text()
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        atom_tokens = sum(
            1 for token in tokenize(line) if token[0] == "[" or token[0].isalpha()
        )
        if MIN_ATOM_TOKENS <= atom_tokens <= MAX_ATOM_TOKENS:
            out.append(line)
    return out


def generate(sequence: str, n: int, seed: int) -> list[str]:
    """Deterministic batch of parseable SMILES; length = min(n, MAX_BATCH)."""
    pool = scaffolds()
    digest = hashlib.sha256(sequence.encode()).hexdigest()[:12]
    out = []
    for i in range(min(n, MAX_BATCH)):
        scaffold = pool[draw_index(len(pool), "scaffold", seed, i, digest)]
        candidate = mutate(scaffold, seed=seed * 1000 + i, round_index=0)
        if draw_index(2, "second-edit", seed, i, digest) == 1:
            candidate = mutate(candidate, seed=seed * 1000 + i, round_index=1)
        out.append(candidate)
    return out
