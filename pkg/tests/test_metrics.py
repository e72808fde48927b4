"""Cohort metrics against brute-force and straight-line oracles."""

import itertools
import random

import numpy as np
import pytest

from molforge.chem import morgan_fingerprint, parse_smiles, tanimoto
from molforge.frechet import frechet_gaussian
from molforge.metrics import (
    Cohort,
    MetricError,
    build_report,
    frechet_distance_to_actives,
    hit_rate,
    internal_diversity,
    mean_max_similarity,
    novelty,
    render_report_text,
    uniqueness,
    validity_rate,
)
from tests.corpus_util import load_corpus
from tests.oracles.frechet_oracle import oracle_frechet, oracle_frechet_raw

ACTIVES = ["CCO", "CCN", "c1ccccc1O"]


def test_validity_half():
    cohort = Cohort.from_rows(["CCO", "C1CC"])
    assert validity_rate(cohort) == 0.5


def test_validity_all_valid():
    cohort = Cohort.from_rows(["CCO", "CCC", "c1ccccc1"])
    assert validity_rate(cohort) == 1.0


def test_validity_empty_cohort_error():
    with pytest.raises(MetricError):
        validity_rate(Cohort.from_rows([]))


def test_uniqueness_same_molecule_two_spellings():
    assert uniqueness(Cohort.from_rows(["CCO", "OCC"])) == 0.5


def test_uniqueness_two_thirds():
    assert uniqueness(Cohort.from_rows(["CCO", "OCC", "CCN"])) == pytest.approx(2 / 3)


def test_uniqueness_all_distinct():
    assert uniqueness(Cohort.from_rows(["CCO", "CCN", "CCC"])) == 1.0


def test_novelty_subset_of_actives_is_zero():
    cohort = Cohort.from_rows(["CCO", "OCC"], reference_actives=ACTIVES)
    assert novelty(cohort) == 0.0


def test_novelty_disjoint_is_one():
    cohort = Cohort.from_rows(["CCCC", "CCCCC"], reference_actives=ACTIVES)
    assert novelty(cohort) == 1.0


def test_novelty_half():
    cohort = Cohort.from_rows(["CCO", "CCCC"], reference_actives=ACTIVES)
    assert novelty(cohort) == 0.5


def test_novelty_requires_reference():
    with pytest.raises(MetricError):
        novelty(Cohort.from_rows(["CCO"]))


def test_internal_diversity_identical_pair_zero():
    mean, sd = internal_diversity(Cohort.from_rows(["CCO", "OCC"]))
    assert mean == 0.0
    assert sd == 0.0


def test_internal_diversity_matches_bruteforce():
    smiles = load_corpus()[:12]
    cohort = Cohort.from_rows(smiles)
    mean, sd = internal_diversity(cohort)
    fps = [morgan_fingerprint(parse_smiles(s)) for s in smiles]
    values = [
        1.0 - tanimoto(a, b) for a, b in itertools.combinations(fps, 2)
    ]
    assert mean == pytest.approx(np.mean(values), abs=1e-12)
    assert sd == pytest.approx(np.std(values), abs=1e-12)


def test_internal_diversity_needs_two():
    with pytest.raises(MetricError):
        internal_diversity(Cohort.from_rows(["CCO"]))


def test_mean_max_similarity_self_cohort_is_one():
    cohort = Cohort.from_rows(list(ACTIVES), reference_actives=ACTIVES)
    mean, sd = mean_max_similarity(cohort)
    assert mean == 1.0
    assert sd == 0.0


def test_mean_max_similarity_matches_bruteforce():
    gen = load_corpus()[5:10]
    ref = load_corpus()[20:25]
    cohort = Cohort.from_rows(gen, reference_actives=ref)
    mean, sd = mean_max_similarity(cohort)
    ref_fps = [morgan_fingerprint(parse_smiles(s)) for s in cohort.reference_actives]
    best = [
        max(tanimoto(morgan_fingerprint(parse_smiles(s)), fp) for fp in ref_fps)
        for s in gen
    ]
    assert mean == pytest.approx(np.mean(best), abs=1e-12)
    assert sd == pytest.approx(np.std(best), abs=1e-12)


def test_metric_reordering_invariance():
    rows = load_corpus()[:10]
    shuffled = list(rows)
    random.Random(3).shuffle(shuffled)
    a = Cohort.from_rows(rows, reference_actives=ACTIVES)
    b = Cohort.from_rows(shuffled, reference_actives=ACTIVES)
    assert validity_rate(a) == validity_rate(b)
    assert uniqueness(a) == uniqueness(b)
    assert novelty(a) == novelty(b)
    assert internal_diversity(a)[0] == pytest.approx(internal_diversity(b)[0], abs=1e-12)


# ----------------------------------------------------------------------------
# Frechet substitute
# ----------------------------------------------------------------------------


def test_frechet_identical_sets_zero():
    rng = np.random.default_rng(0)
    rows = rng.normal(size=(10, 8))
    from molforge.frechet import frechet_descriptor_distance

    assert frechet_descriptor_distance(rows, rows) < 1e-6


def test_frechet_symmetry():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(10, 8))
    b = rng.normal(loc=0.5, size=(12, 8))
    from molforge.frechet import frechet_descriptor_distance

    d_ab = frechet_descriptor_distance(a, b)
    d_ba = frechet_descriptor_distance(b, a)
    assert abs(d_ab - d_ba) < 1e-9


def test_frechet_degenerate_one_dim_reduces_to_mean_gap():
    # Zero-variance 1-D sets with means 0 and 1: the raw formula reduces to
    # |delta mu|^2 = 1 (the epsilon regularizer cancels in the trace term).
    mean_a, cov_a = np.array([0.0]), np.array([[0.0]])
    mean_b, cov_b = np.array([1.0]), np.array([[0.0]])
    assert frechet_gaussian(mean_a, cov_a, mean_b, cov_b) == pytest.approx(1.0, abs=1e-9)


def test_frechet_matches_straightline_oracle_ten_vs_ten():
    rng = np.random.default_rng(42)
    a = rng.normal(size=(10, 8)) * rng.uniform(0.5, 2.0, size=8)
    b = rng.normal(loc=0.3, size=(10, 8))
    from molforge.frechet import frechet_descriptor_distance

    engine = frechet_descriptor_distance(a, b)
    oracle = oracle_frechet(a, b)
    assert engine == pytest.approx(oracle, abs=1e-9)


def test_frechet_raw_matches_oracle():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(30, 4))
    y = rng.normal(size=(25, 4)) @ np.diag([1.0, 2.0, 0.5, 1.5])
    mean_a, cov_a = x.mean(axis=0), np.cov(x, rowvar=False, bias=True)
    mean_b, cov_b = y.mean(axis=0), np.cov(y, rowvar=False, bias=True)
    engine = frechet_gaussian(mean_a, cov_a, mean_b, cov_b)
    oracle = oracle_frechet_raw(mean_a, cov_a, mean_b, cov_b)
    assert engine == pytest.approx(oracle, abs=1e-9)


def test_frechet_cohort_level_zero_on_self():
    rows = load_corpus()[:6]
    cohort = Cohort.from_rows(rows, reference_actives=rows)
    assert frechet_distance_to_actives(cohort) < 1e-6


# ----------------------------------------------------------------------------
# Hit rate
# ----------------------------------------------------------------------------


def test_hit_rate_two_thirds():
    cohort = Cohort.from_rows(
        [("CCO", -9.5, ""), ("CCN", -8.9, ""), ("CCC", -10.1, "")]
    )
    assert hit_rate(cohort) == pytest.approx(100 * 2 / 3)


def test_hit_rate_all_hits():
    cohort = Cohort.from_rows([("CCO", -10.0, ""), ("CCN", -10.0, "")])
    assert hit_rate(cohort) == 100.0


def test_hit_rate_boundary_is_not_a_hit():
    cohort = Cohort.from_rows([("CCO", -9.0, "")])
    assert hit_rate(cohort) == 0.0


def test_hit_rate_monotone_in_threshold():
    scores = [-10.5, -9.7, -9.0, -8.2, -7.0]
    cohort = Cohort.from_rows([("CCO", s, "") for s in scores])
    rates = [hit_rate(cohort, threshold=t) for t in (-8.0, -9.0, -10.0, -11.0)]
    assert rates == sorted(rates, reverse=True)


def test_hit_rate_requires_scores():
    with pytest.raises(MetricError):
        hit_rate(Cohort.from_rows(["CCO"]))


# ----------------------------------------------------------------------------
# Report assembly
# ----------------------------------------------------------------------------


def test_report_counts_invalid_in_attempted():
    cohort = Cohort.from_rows(
        [("CCO", -9.5, ""), ("C1CC", None, ""), ("CCN", -8.0, "")],
        reference_actives=ACTIVES,
    )
    report = build_report(cohort)
    assert report["generation_quality"]["attempted"] == 3
    assert report["generation_quality"]["validity"] == pytest.approx(2 / 3)


def test_report_single_molecule_marks_diversity_not_computable():
    report = build_report(Cohort.from_rows(["CCO"], reference_actives=ACTIVES))
    assert report["generation_quality"]["internal_diversity"] is None
    assert report["generation_quality"]["validity"] == 1.0


def test_report_no_docking_marks_target_block_not_computable():
    report = build_report(Cohort.from_rows(["CCO", "CCN"], reference_actives=ACTIVES))
    assert report["target_specific"]["docking_mean_sd"] is None
    assert report["target_specific"]["hit_rate_pct"] is None


def test_report_text_has_three_sections():
    cohort = Cohort.from_rows(
        [("CCO", -9.5, ""), ("CCN", -8.0, "")], reference_actives=ACTIVES
    )
    text = render_report_text(build_report(cohort))
    for title in ("Generation Quality", "Drug-Likeness & Properties", "Target-Specific Performance"):
        assert title in text
    assert "Frechet Descriptor Distance" in text
