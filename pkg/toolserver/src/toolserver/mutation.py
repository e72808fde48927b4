"""Valence-safe token-level SMILES edits (standalone reimplementation).

Deliberately mirrors the engine's mutation algorithm without importing
it, so the stub's /generate endpoint is byte-equivalent to the engine's
mock generator while remaining an independent deployable.  Edits only
touch plain uppercase organic-subset atoms outside brackets and ring
closures, where validity reduces to local valence arithmetic.
"""

from __future__ import annotations

import hashlib
import re

MAX_VALENCE = {"B": 3, "C": 4, "N": 3, "O": 2, "F": 1, "P": 3, "S": 2, "Cl": 1, "Br": 1, "I": 1}

TOKEN = re.compile(r"(\[[^\]]*\]|Cl|Br|%\d\d|[BCNOPSFI]|[bcnops]|[-=#:/\\().]|\d)")

SWAPS = {"C": ("N", "O"), "N": ("C", "O"), "O": ("C", "N")}
HALOGEN_SWAPS = {"F": ("Cl",), "Cl": ("F", "Br"), "Br": ("Cl", "F")}
APPENDS = ("C", "O", "N", "CC", "CO", "CN", "F", "Cl")
BRANCHES = ("(C)", "(O)", "(N)", "(F)", "(Cl)", "(CO)", "(CN)")

_BOND_ORDER = {"-": 1.0, "/": 1.0, "\\": 1.0, "=": 2.0, "#": 3.0, ":": 1.5}


def tokenize(smiles: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    while pos < len(smiles):
        match = TOKEN.match(smiles, pos)
        if match is None:
            return []
        tokens.append(match.group(0))
        pos = match.end()
    return tokens


def _scan(tokens: list[str]):
    """Walk the token stream tracking sigma usage of mutable atoms.

    Returns (per-token usage entries or None, index of the atom a suffix
    append would bond to).
    """
    usage: dict[int, float] = {}
    mutable: dict[int, bool] = {}
    prev: int | None = None
    stack: list[int | None] = []
    rings: dict[int, tuple[int, float]] = {}
    pending = 1.0
    for ti, token in enumerate(tokens):
        if token == "(":
            stack.append(prev)
        elif token == ")":
            prev = stack.pop() if stack else None
        elif token in _BOND_ORDER:
            pending = _BOND_ORDER[token]
        elif token == ".":
            prev = None
        elif token.isdigit() or token.startswith("%"):
            number = int(token[1:]) if token.startswith("%") else int(token)
            if prev is not None:
                if number in rings:
                    other, order = rings.pop(number)
                    bond = max(order, pending)
                    usage[other] = usage.get(other, 0.0) + bond
                    usage[prev] = usage.get(prev, 0.0) + bond
                else:
                    rings[number] = (prev, pending)
                mutable[prev] = False
            pending = 1.0
        else:  # atom token
            if prev is not None:
                usage[prev] = usage.get(prev, 0.0) + pending
                usage[ti] = usage.get(ti, 0.0) + pending
            else:
                usage.setdefault(ti, 0.0)
            mutable[ti] = token in MAX_VALENCE
            pending = 1.0
            prev = ti
    if rings:
        return [None] * (len(tokens) + 1), None
    entries: list[tuple[int, float] | None] = [None] * (len(tokens) + 1)
    for ti in range(len(tokens)):
        if mutable.get(ti):
            entries[ti] = (ti, usage.get(ti, 0.0))
    return entries, prev


def mutation_candidates(smiles: str) -> list[str]:
    tokens = tokenize(smiles)
    if not tokens or "".join(tokens) != smiles:
        return []
    entries, final_atom = _scan(tokens)
    out: list[str] = []
    for ti, entry in enumerate(entries):
        if entry is None:
            continue
        _, used = entry
        element = tokens[ti]
        for target in SWAPS.get(element, ()):
            if used <= MAX_VALENCE[target]:
                out.append("".join(tokens[:ti] + [target] + tokens[ti + 1 :]))
        for target in HALOGEN_SWAPS.get(element, ()):
            out.append("".join(tokens[:ti] + [target] + tokens[ti + 1 :]))
        free = MAX_VALENCE[element] - used
        for fragment in BRANCHES:
            if free >= 1:
                out.append("".join(tokens[: ti + 1] + [fragment] + tokens[ti + 1 :]))
    if final_atom is not None and entries[final_atom] is not None:
        _, used = entries[final_atom]
        if MAX_VALENCE[tokens[final_atom]] - used >= 1:
            for fragment in APPENDS:
                out.append(smiles + fragment)
    # Single-atom branch deletion needs a mutable parent atom: detaching a
    # substituent from an aromatic heteroatom can flip its ring state.
    for ti in range(1, len(tokens) - 2):
        if (
            tokens[ti] == "("
            and tokens[ti + 2] == ")"
            and entries[ti + 1] is not None
            and entries[ti - 1] is not None
            and len(tokens) > 4
        ):
            out.append("".join(tokens[:ti] + tokens[ti + 3 :]))
    unique: list[str] = []
    seen: set[str] = set()
    for candidate in out:
        if candidate != smiles and candidate not in seen:
            seen.add(candidate)
            unique.append(candidate)
    return unique


def draw_index(count: int, *key_parts: object) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in key_parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") % max(count, 1)


def mutate(smiles: str, seed: int, round_index: int = 0) -> str:
    candidates = mutation_candidates(smiles)
    if not candidates:
        return smiles
    return candidates[draw_index(len(candidates), "mutate", seed, round_index, smiles)]
