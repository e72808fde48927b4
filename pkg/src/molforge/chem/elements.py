"""Periodic-table subset: weights, valences and parsing metadata.

The engine supports the organic subset plus boron and explicit hydrogen:
H, B, C, N, O, F, P, S, Cl, Br, I.  Everything else is rejected at parse
time with an ``UnsupportedElementError``.
"""

from __future__ import annotations

SUPPORTED_ELEMENTS = ("H", "B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I")

# IUPAC 2021 standard atomic weights, abridged to published precision.
ATOMIC_WEIGHT = {
    "H": 1.008,
    "B": 10.811,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998403163,
    "P": 30.973761998,
    "S": 32.06,
    "Cl": 35.45,
    "Br": 79.904,
    "I": 126.90447,
}

# Allowed total valences for the neutral element, lowest first.  Implicit
# hydrogens fill up to the smallest valence that covers the explicit bonds.
DEFAULT_VALENCES: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "F": (1,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

# Elements that may be written lowercase (aromatic) in the supported dialect.
AROMATIC_ELEMENTS = frozenset({"B", "C", "N", "O", "P", "S"})

# Organic-subset symbols usable outside brackets (two-character first).
ORGANIC_SUBSET = ("Cl", "Br", "B", "C", "N", "O", "F", "P", "S", "I")


def allowed_valences(element: str, charge: int) -> tuple[int, ...]:
    """Valence alternatives for an element at a given formal charge.

    Charge shifts the bonding capacity the way isoelectronic reasoning
    does for the common organic cases: N+ bonds like carbon, O- like
    fluorine, and so on.  Unusual combinations fall back to shifting the
    neutral valences and dropping anything non-positive.
    """
    base = DEFAULT_VALENCES[element]
    if charge == 0:
        return base
    if element == "N" and charge == 1:
        return (4,)
    if element == "N" and charge == -1:
        return (2,)
    if element == "O" and charge == 1:
        return (3,)
    if element == "O" and charge == -1:
        return (1,)
    if element == "C" and charge in (1, -1):
        return (3,)
    if element == "S" and charge == 1:
        return (3, 5)
    if element == "S" and charge == -1:
        return (1,)
    if element == "B" and charge == -1:
        return (4,)
    if element == "P" and charge == 1:
        return (4,)
    shifted = tuple(v + charge for v in base if v + charge > 0)
    return shifted if shifted else (abs(charge),)
