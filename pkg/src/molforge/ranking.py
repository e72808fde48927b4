"""Multi-parameter desirability ranking and finalist selection.

Each component is min-max normalized over the candidate pool; docking and
synthetic accessibility are negated first so "lower is better" maps to
higher desirability.  The composite is a weighted arithmetic mean (a
geometric mean would be annihilated by any zero-valued component).  A
degenerate component (all values equal) maps to 1.0 for every candidate.
"""

from __future__ import annotations

from dataclasses import dataclass


class RankingError(ValueError):
    pass


@dataclass(slots=True, frozen=True)
class DesirabilityWeights:
    docking: float = 0.5
    qed: float = 0.3
    sa: float = 0.2

    def normalized(self) -> "DesirabilityWeights":
        total = self.docking + self.qed + self.sa
        if total <= 0 or min(self.docking, self.qed, self.sa) < 0:
            raise RankingError("weights must be non-negative with a positive sum")
        return DesirabilityWeights(
            docking=self.docking / total, qed=self.qed / total, sa=self.sa / total
        )


@dataclass(slots=True)
class RankedCandidate:
    node_id: str
    composite: float
    components: dict[str, float]
    rank: int = 0


def _minmax(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi - lo < 1e-12:
        return [1.0] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def desirability_rank(
    candidates: list[dict],
    weights: DesirabilityWeights | None = None,
) -> tuple[list[RankedCandidate], list[str]]:
    """Rank candidates by the weighted desirability index.

    Each candidate dict needs ``id``, ``docking``, ``qed`` and ``sa``.
    Candidates missing a component are excluded with a diagnostic (second
    return value).  Ties break deterministically by (docking ascending,
    id lexicographic).
    """
    weights = (weights or DesirabilityWeights()).normalized()
    usable = []
    diagnostics = []
    for cand in candidates:
        if any(cand.get(key) is None for key in ("docking", "qed", "sa")):
            diagnostics.append(f"excluded {cand.get('id')}: missing component value")
            continue
        usable.append(cand)
    if not usable:
        raise RankingError("empty candidate pool after exclusions")

    docking_scores = _minmax([-float(c["docking"]) for c in usable])
    qed_scores = _minmax([float(c["qed"]) for c in usable])
    sa_scores = _minmax([-float(c["sa"]) for c in usable])

    ranked = []
    for pos, cand in enumerate(usable):
        composite = (
            weights.docking * docking_scores[pos]
            + weights.qed * qed_scores[pos]
            + weights.sa * sa_scores[pos]
        )
        ranked.append(
            RankedCandidate(
                node_id=str(cand["id"]),
                composite=composite,
                components={
                    "docking": docking_scores[pos],
                    "qed": qed_scores[pos],
                    "sa": sa_scores[pos],
                },
            )
        )
    order = sorted(
        range(len(ranked)),
        key=lambda i: (
            -ranked[i].composite,
            float(usable[i]["docking"]),
            ranked[i].node_id,
        ),
    )
    out = []
    for rank, idx in enumerate(order, start=1):
        ranked[idx].rank = rank
        out.append(ranked[idx])
    return out, diagnostics


@dataclass(slots=True)
class Finalists:
    entries: list[RankedCandidate]
    padded: bool = False


def top_k(ranked: list[RankedCandidate], k: int = 10) -> Finalists:
    """First min(k, n) entries; flags ``padded`` when fewer than k exist."""
    if k < 0:
        raise RankingError("k must be non-negative")
    return Finalists(entries=ranked[: min(k, len(ranked))], padded=len(ranked) < k)
