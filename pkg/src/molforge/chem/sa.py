"""Synthetic-accessibility estimate from fragment frequencies plus
complexity penalties.

The fragment-score table is regenerated offline from the bundled
reference corpus using this engine's own environment hashes (see
``scripts/generate_sa_table.py``); published tables are keyed to other
toolkits' hashes and do not transfer.  The stereo penalty term is zero by
construction because stereochemistry is discarded at parse time.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources

from molforge.chem.fingerprint import environment_counts
from molforge.chem.molecule import Molecule
from molforge.chem.rings import find_sssr

UNKNOWN_FRAGMENT_SCORE = -4.0
_SCALE_MIN = -4.0
_SCALE_MAX = 2.5


@lru_cache(maxsize=1)
def _fragment_scores() -> dict[int, float]:
    text = resources.files("molforge.chem.data").joinpath("sa_fragments.json").read_text()
    raw = json.loads(text)
    return {int(k): v for k, v in raw["scores"].items()}


def ring_complexity(mol: Molecule) -> tuple[int, int, bool]:
    """(spiro atoms, bridgehead atoms, has macrocycle) from SSSR rings."""
    rings = [set(r) for r in find_sssr(mol)]
    spiro: set[int] = set()
    bridge: set[int] = set()
    for i in range(len(rings)):
        for j in range(i + 1, len(rings)):
            shared = rings[i] & rings[j]
            if len(shared) == 1:
                spiro.update(shared)
            elif len(shared) > 2:
                # Rings sharing more than one bond: shared atoms with ring
                # degree three are bridgeheads.
                for idx in shared:
                    in_ring_bonds = sum(
                        1 for _, bi in mol.neighbors(idx) if mol.bonds[bi].in_ring
                    )
                    if in_ring_bonds >= 3:
                        bridge.add(idx)
    macro = any(len(r) > 8 for r in rings)
    return len(spiro), len(bridge), macro


def sa_score(mol: Molecule) -> float:
    """Synthetic accessibility on the published 1 (easy) .. 10 (hard) scale."""
    scores = _fragment_scores()
    counts = environment_counts(mol, radius=2)
    total = 0
    frag = 0.0
    for env, count in counts.items():
        frag += scores.get(env, UNKNOWN_FRAGMENT_SCORE) * count
        total += count
    score1 = frag / total if total else 0.0

    n_atoms = len(mol.atoms)
    n_spiro, n_bridge, macro = ring_complexity(mol)
    size_penalty = n_atoms**1.005 - n_atoms
    stereo_penalty = 0.0  # stereochemistry discarded at parse time
    spiro_penalty = math.log10(n_spiro + 1)
    bridge_penalty = math.log10(n_bridge + 1)
    macro_penalty = math.log10(2) if macro else 0.0
    score2 = -size_penalty - stereo_penalty - spiro_penalty - bridge_penalty - macro_penalty

    score3 = 0.0
    if n_atoms > len(counts):
        score3 = math.log(n_atoms / len(counts)) * 0.5

    raw = score1 + score2 + score3
    sa = 11.0 - (raw - _SCALE_MIN + 1.0) / (_SCALE_MAX - _SCALE_MIN) * 9.0
    if sa > 8.0:
        sa = 8.0 + math.log(sa + 1.0 - 9.0)
    return min(max(sa, 1.0), 10.0)
