"""Valence-safe, token-level SMILES edits.

Mutations operate on the SMILES string itself and are restricted to
contexts where validity is decidable by local valence accounting: plain
uppercase organic-subset atoms outside brackets and ring closures.  Every
candidate this module emits parses successfully, which keeps the mock
molecule generator a pure, replicable function of (scaffold, seed) — the
HTTP tool-server stub reimplements the same algorithm.

Edit kinds: element swap, halogen swap, terminal substituent append,
branch insertion, single-atom branch deletion.
"""

from __future__ import annotations

import hashlib
import re

_ATOM_MAX_VALENCE = {"B": 3, "C": 4, "N": 3, "O": 2, "F": 1, "P": 3, "S": 2, "Cl": 1, "Br": 1, "I": 1}

_TOKEN_RE = re.compile(
    r"(\[[^\]]*\]|Cl|Br|%\d\d|[BCNOPSFI]|[bcnops]|[-=#:/\\().]|\d)"
)

_SWAP_TARGETS = {"C": ("N", "O"), "N": ("C", "O"), "O": ("C", "N")}
_HALOGEN_SWAP = {"F": ("Cl",), "Cl": ("F", "Br"), "Br": ("Cl", "F")}
_APPEND_FRAGMENTS = ("C", "O", "N", "CC", "CO", "CN", "F", "Cl")
_BRANCH_FRAGMENTS = ("(C)", "(O)", "(N)", "(F)", "(Cl)", "(CO)", "(CN)")
_BRANCH_NEED = {"(C)": 1, "(O)": 1, "(N)": 1, "(F)": 1, "(Cl)": 1, "(CO)": 1, "(CN)": 1}


def tokenize(smiles: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(smiles):
        m = _TOKEN_RE.match(smiles, pos)
        if m is None:
            return []  # unsupported text; caller treats as immutable
        tokens.append(m.group(0))
        pos = m.end()
    return tokens


def _sigma_per_atom(tokens: list[str]):
    """Token-aligned sigma-bond usage for plain uppercase atoms.

    Returns (entries, final_atom_index): entries hold (token index, total
    bond order used) for mutable atom tokens and None for everything else;
    aromatic or bracket atoms and atoms with ring closures stay immutable
    so validity remains a local, arithmetic question.  The final atom
    index is the token an appended fragment would bond to.
    """
    usage: dict[int, float] = {}
    mutable: dict[int, bool] = {}
    prev: int | None = None
    stack: list[int | None] = []
    ring_open: dict[int, tuple[int, float]] = {}
    pending = 1.0
    result: list[tuple[int, float] | None] = [None] * (len(tokens) + 1)

    for ti, tok in enumerate(tokens):
        if tok == "(":
            stack.append(prev)
            continue
        if tok == ")":
            prev = stack.pop() if stack else None
            continue
        if tok in ("-", "/", "\\"):
            pending = 1.0
            continue
        if tok == "=":
            pending = 2.0
            continue
        if tok == "#":
            pending = 3.0
            continue
        if tok == ":":
            pending = 1.5
            continue
        if tok == ".":
            prev = None
            continue
        if tok.isdigit() or tok.startswith("%"):
            number = int(tok[1:]) if tok.startswith("%") else int(tok)
            if prev is not None:
                if number in ring_open:
                    other, order = ring_open.pop(number)
                    usage[other] = usage.get(other, 0.0) + max(order, pending)
                    usage[prev] = usage.get(prev, 0.0) + max(order, pending)
                else:
                    ring_open[number] = (prev, pending)
                mutable[prev] = False  # ring atoms stay untouched
            pending = 1.0
            continue
        # Atom token.
        upper_plain = tok in _ATOM_MAX_VALENCE
        idx = ti
        if prev is not None:
            usage[prev] = usage.get(prev, 0.0) + pending
            usage[idx] = usage.get(idx, 0.0) + pending
        else:
            usage.setdefault(idx, 0.0)
        mutable[idx] = upper_plain
        pending = 1.0
        prev = idx

    # Ring-open without close: malformed; mark all immutable.
    if ring_open:
        return [None] * (len(tokens) + 1), None
    for ti, tok in enumerate(tokens):
        if mutable.get(ti):
            result[ti] = (ti, usage.get(ti, 0.0))
    return result, prev


def mutation_candidates(smiles: str) -> list[str]:
    """All provably valid single-edit variants, deterministically ordered."""
    tokens = tokenize(smiles)
    if not tokens or "".join(tokens) != smiles:
        return []
    sigma, final_atom_ti = _sigma_per_atom(tokens)
    out: list[str] = []

    for ti, info in enumerate(sigma):
        if info is None:
            continue
        _, used = info
        element = tokens[ti]
        for target in _SWAP_TARGETS.get(element, ()):
            if used <= _ATOM_MAX_VALENCE[target]:
                out.append("".join(tokens[:ti] + [target] + tokens[ti + 1 :]))
        for target in _HALOGEN_SWAP.get(element, ()):
            out.append("".join(tokens[:ti] + [target] + tokens[ti + 1 :]))
        # Branch insertion directly after this atom (never before a ring
        # digit, which tokenization guarantees here because ring atoms are
        # immutable).
        free = _ATOM_MAX_VALENCE[element] - used
        for frag, need in _BRANCH_NEED.items():
            if free >= need:
                out.append("".join(tokens[: ti + 1] + [frag] + tokens[ti + 1 :]))

    # Terminal append: an appended fragment bonds to whichever atom is
    # "previous" at end of string, so that atom must be mutable with room.
    if final_atom_ti is not None and sigma[final_atom_ti] is not None:
        _, used = sigma[final_atom_ti]
        free = _ATOM_MAX_VALENCE[tokens[final_atom_ti]] - used
        if free >= 1:
            for frag in _APPEND_FRAGMENTS:
                out.append(smiles + frag)

    # Deletion of a single-atom branch like (C) or (Cl); the parent atom
    # must itself be mutable, since detaching a substituent from an
    # aromatic heteroatom can flip its ring contribution.
    for ti in range(1, len(tokens) - 2):
        if (
            tokens[ti] == "("
            and tokens[ti + 2] == ")"
            and sigma[ti + 1] is not None
            and sigma[ti - 1] is not None
            and len(tokens) > 4
        ):
            out.append("".join(tokens[:ti] + tokens[ti + 3 :]))

    seen: set[str] = set()
    unique = []
    for cand in out:
        if cand not in seen and cand != smiles:
            seen.add(cand)
            unique.append(cand)
    return unique


def draw_index(count: int, *key_parts: object) -> int:
    """Stable hash-based draw in [0, count); shared with the stub."""
    digest = hashlib.sha256("|".join(str(p) for p in key_parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") % max(count, 1)


def mutate(smiles: str, seed: int, round_index: int = 0) -> str:
    """One deterministic valence-safe edit; unchanged input when no edit fits."""
    candidates = mutation_candidates(smiles)
    if not candidates:
        return smiles
    return candidates[draw_index(len(candidates), "mutate", seed, round_index, smiles)]
