"""Cohort-level generation metrics and the three-section report.

A cohort is the full set of candidate SMILES a campaign evaluated
(including invalid attempts), optionally scored by docking, compared
against a reference actives set.  Fractions are computed over valid
molecules only, except validity itself; invalid entries depress validity
and are excluded from everything else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from molforge.chem import (
    ChemError,
    canonicalize,
    compute_descriptors,
    lipinski_pass,
    morgan_fingerprint,
    parse_smiles,
    tanimoto,
)
from molforge.frechet import descriptor_vector, frechet_descriptor_distance

HIT_THRESHOLD = -9.0
NOT_COMPUTABLE = None


class MetricError(ValueError):
    """A metric's precondition is unsatisfiable for this cohort."""


@dataclass(slots=True)
class CohortEntry:
    smiles: str
    docking: float | None = None
    tag: str = ""


@dataclass(slots=True)
class Cohort:
    """Raw cohort entries plus the canonical reference actives."""

    entries: list[CohortEntry]
    reference_actives: list[str] = field(default_factory=list)
    _prepared: list | None = field(default=None, repr=False, compare=False)
    _active_fps: list | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_rows(
        cls,
        rows: list[tuple[str, float | None, str]] | list[str],
        reference_actives: list[str] | None = None,
    ) -> "Cohort":
        entries = []
        for row in rows:
            if isinstance(row, str):
                entries.append(CohortEntry(smiles=row))
            else:
                smiles, score, tag = (list(row) + [None, ""])[:3]
                entries.append(CohortEntry(smiles=smiles, docking=score, tag=tag or ""))
        actives = []
        for smiles in reference_actives or []:
            actives.append(canonicalize(parse_smiles(smiles)))
        return cls(entries=entries, reference_actives=actives)

    @classmethod
    def from_smiles_file(cls, path, actives_path=None) -> "Cohort":
        rows: list[tuple[str, float | None, str]] = []
        with open(path) as handle:
            for line in handle:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                smiles = parts[0]
                score = float(parts[1]) if len(parts) > 1 and parts[1] else None
                tag = parts[2] if len(parts) > 2 else ""
                rows.append((smiles, score, tag))
        actives = []
        if actives_path is not None:
            with open(actives_path) as handle:
                for line in handle:
                    line = line.strip()
                    if line and not line.startswith("#"):
                        actives.append(line)
        return cls.from_rows(rows, actives)


@dataclass(slots=True)
class _ValidEntry:
    entry: CohortEntry
    canonical: str
    mol: object
    descriptors: object


def _prepare(cohort: Cohort) -> list[_ValidEntry]:
    if cohort._prepared is not None:
        return cohort._prepared
    out = []
    for entry in cohort.entries:
        try:
            mol = parse_smiles(entry.smiles)
            canonical = canonicalize(mol)
        except ChemError:
            continue
        out.append(_ValidEntry(entry, canonical, mol, compute_descriptors(mol)))
    cohort._prepared = out
    return out


def _active_fingerprints(cohort: Cohort) -> list:
    if cohort._active_fps is None:
        cohort._active_fps = [
            morgan_fingerprint(parse_smiles(smiles)) for smiles in cohort.reference_actives
        ]
    return cohort._active_fps


def validity_rate(cohort: Cohort) -> float:
    if not cohort.entries:
        raise MetricError("empty cohort")
    return len(_prepare(cohort)) / len(cohort.entries)


def uniqueness(cohort: Cohort) -> float:
    valid = _prepare(cohort)
    if not valid:
        raise MetricError("no valid molecules")
    return len({v.canonical for v in valid}) / len(valid)


def novelty(cohort: Cohort) -> float:
    if not cohort.reference_actives:
        raise MetricError("novelty undefined without a reference set")
    valid = _prepare(cohort)
    if not valid:
        raise MetricError("no valid molecules")
    actives = set(cohort.reference_actives)
    return sum(1 for v in valid if v.canonical not in actives) / len(valid)


def internal_diversity(cohort: Cohort) -> tuple[float, float]:
    """Mean and population sd of pairwise (1 - Tanimoto) over valid molecules."""
    valid = _prepare(cohort)
    if len(valid) < 2:
        raise MetricError("need at least two valid molecules")
    fps = [morgan_fingerprint(v.mol) for v in valid]
    values = []
    for i in range(len(fps)):
        for j in range(i + 1, len(fps)):
            values.append(1.0 - tanimoto(fps[i], fps[j]))
    arr = np.array(values)
    return float(arr.mean()), float(arr.std())


def mean_max_similarity(cohort: Cohort) -> tuple[float, float]:
    """Per-molecule max Tanimoto against the actives; mean and sd across molecules."""
    if not cohort.reference_actives:
        raise MetricError("empty reference set")
    valid = _prepare(cohort)
    if not valid:
        raise MetricError("no valid molecules")
    active_fps = _active_fingerprints(cohort)
    best = [
        max(tanimoto(morgan_fingerprint(v.mol), fp) for fp in active_fps) for v in valid
    ]
    arr = np.array(best)
    return float(arr.mean()), float(arr.std())


def frechet_distance_to_actives(cohort: Cohort) -> float:
    valid = _prepare(cohort)
    if len(valid) < 2 or len(cohort.reference_actives) < 2:
        raise MetricError("need at least two valid molecules on both sides")
    gen = np.vstack([descriptor_vector(v.mol, v.descriptors) for v in valid])
    ref_rows = []
    for smiles in cohort.reference_actives:
        mol = parse_smiles(smiles)
        ref_rows.append(descriptor_vector(mol, compute_descriptors(mol)))
    return frechet_descriptor_distance(gen, np.vstack(ref_rows))


def hit_rate(cohort: Cohort, threshold: float = HIT_THRESHOLD) -> float:
    """Percentage of scored molecules strictly below the threshold.

    Ties at the threshold are non-hits.
    """
    scored = [e.docking for e in cohort.entries if e.docking is not None]
    if not scored:
        raise MetricError("no docking scores present")
    hits = sum(1 for s in scored if s < threshold)
    return 100.0 * hits / len(scored)


def _mean_sd(values) -> tuple[float, float]:
    arr = np.array(list(values), dtype=float)
    return float(arr.mean()), float(arr.std())


def build_report(cohort: Cohort, threshold: float = HIT_THRESHOLD) -> dict:
    """Every metric, with unsatisfiable ones marked null rather than fatal.

    Standard deviations use the population formula (n divisor) so small
    fixtures stay deterministic; noted in the report header.
    """
    if not cohort.entries:
        raise MetricError("empty cohort")
    valid = _prepare(cohort)

    def attempt(fn, *args):
        try:
            return fn(cohort, *args)
        except MetricError:
            return NOT_COMPUTABLE

    report: dict = {
        "schema": "cohort-report/1",
        "sd_convention": "population (n divisor); similarity sd is across molecules",
        "generation_quality": {
            "attempted": len(cohort.entries),
            "validity": attempt(validity_rate),
            "uniqueness": attempt(uniqueness),
            "novelty": attempt(novelty),
            "internal_diversity": attempt(internal_diversity),
            "mean_max_similarity": attempt(mean_max_similarity),
            "frechet_descriptor_distance": attempt(frechet_distance_to_actives),
        },
    }
    if valid:
        qed = _mean_sd(v.descriptors.qed for v in valid)
        sa = _mean_sd(v.descriptors.sa_score for v in valid)
        logp = _mean_sd(v.descriptors.logp for v in valid)
        ro5 = 100.0 * sum(1 for v in valid if lipinski_pass(v.descriptors)) / len(valid)
        report["drug_likeness"] = {
            "qed_mean_sd": list(qed),
            "ro5_pass_pct": ro5,
            "sa_mean_sd": list(sa),
            "logp_mean_sd": list(logp),
        }
    else:
        report["drug_likeness"] = {
            "qed_mean_sd": NOT_COMPUTABLE,
            "ro5_pass_pct": NOT_COMPUTABLE,
            "sa_mean_sd": NOT_COMPUTABLE,
            "logp_mean_sd": NOT_COMPUTABLE,
        }
    scored = [e.docking for e in cohort.entries if e.docking is not None]
    if scored:
        report["target_specific"] = {
            "docking_mean_sd": list(_mean_sd(scored)),
            "hit_rate_pct": hit_rate(cohort, threshold),
            "hit_threshold": threshold,
        }
    else:
        report["target_specific"] = {
            "docking_mean_sd": NOT_COMPUTABLE,
            "hit_rate_pct": NOT_COMPUTABLE,
            "hit_threshold": threshold,
        }
    return report


_SECTION_TITLES = [
    ("generation_quality", "Generation Quality"),
    ("drug_likeness", "Drug-Likeness & Properties"),
    ("target_specific", "Target-Specific Performance"),
]

_ROW_ORDER = {
    "generation_quality": (
        "attempted",
        "validity",
        "uniqueness",
        "novelty",
        "internal_diversity",
        "mean_max_similarity",
        "frechet_descriptor_distance",
    ),
    "drug_likeness": ("qed_mean_sd", "ro5_pass_pct", "sa_mean_sd", "logp_mean_sd"),
    "target_specific": ("docking_mean_sd", "hit_rate_pct", "hit_threshold"),
}

_ROW_LABELS = {
    "attempted": "Molecules Attempted (N)",
    "validity": "Validity (%)",
    "uniqueness": "Uniqueness (% of Valid)",
    "novelty": "Novelty (% vs. Actives)",
    "internal_diversity": "Internal Diversity",
    "mean_max_similarity": "Similarity to known inhibitors",
    "frechet_descriptor_distance": "Frechet Descriptor Distance",
    "qed_mean_sd": "QED (Mean +/- SD)",
    "ro5_pass_pct": "Lipinski Ro5 Pass (%)",
    "sa_mean_sd": "SA Score (Mean +/- SD)",
    "logp_mean_sd": "LogP (Mean +/- SD)",
    "docking_mean_sd": "Docking Score (Mean +/- SD)",
    "hit_rate_pct": "Hits (%)",
    "hit_threshold": "Hit Threshold (kcal/mol)",
}


def _format_value(key: str, value) -> str:
    if value is NOT_COMPUTABLE:
        return "not-computable"
    if key == "attempted":
        return str(value)
    if key == "hit_threshold":
        return f"{value:.1f}"
    if isinstance(value, (list, tuple)):
        return f"{value[0]:.3f} +/- {value[1]:.3f}"
    if key in ("ro5_pass_pct", "hit_rate_pct"):
        return f"{value:.2f}"
    return f"{value:.3f}"


def render_report_text(report: dict) -> str:
    lines = [
        "Cohort Report",
        f"(sd convention: {report['sd_convention']})",
    ]
    for section_key, title in _SECTION_TITLES:
        lines.append("")
        lines.append(title)
        lines.append("-" * len(title))
        section = report[section_key]
        width = max(len(label) for label in _ROW_LABELS.values()) + 2
        for key in _ROW_ORDER[section_key]:
            if key not in section:
                continue
            label = _ROW_LABELS.get(key, key)
            lines.append(f"{label:<{width}}{_format_value(key, value=section[key])}")
    return "\n".join(lines) + "\n"


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True)
