"""Weighted-desirability drug-likeness score over eight properties.

Uses the published asymmetric-double-sigmoid parameter table and the
weights-mean weight set (bundled in ``data/qed_ads.json``); property
inputs follow this engine's documented HBD/HBA/ROTB/AROM conventions.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def _params() -> dict:
    text = resources.files("molforge.chem.data").joinpath("qed_ads.json").read_text()
    return json.loads(text)


def ads(x: float, a: float, b: float, c: float, d: float, e: float, f: float, dmax: float) -> float:
    """Asymmetric double sigmoid, normalized to its maximum."""
    value = a + b / (1.0 + math.exp(-(x - c + d / 2.0) / e)) * (
        1.0 - 1.0 / (1.0 + math.exp(-(x - c - d / 2.0) / f))
    )
    return value / dmax


PROPERTY_ORDER = ("MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS")


def qed_score(properties: dict[str, float]) -> float:
    """QED in [0, 1] from the eight raw property values."""
    params = _params()
    weights = params["weights_mean"]
    total_w = 0.0
    acc = 0.0
    for name in PROPERTY_ORDER:
        d = ads(properties[name], *params["ads"][name])
        d = min(max(d, 1e-12), 1.0)
        w = weights[name]
        acc += w * math.log(d)
        total_w += w
    return math.exp(acc / total_w)
