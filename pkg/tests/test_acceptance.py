"""Acceptance gate: every primary criterion at its stated tolerance.

Runs fully offline (deterministic policy backend + mock tools).  Each
test prints one ``ACCEPTANCE n PASS`` line on success; pytest reports the
failures.  Campaigns are shared through module-scoped caches so the whole
gate stays within a desk-scale time budget.
"""

from __future__ import annotations

import itertools
import json
import random
import time

import numpy as np
import pytest

from molforge.chem import canonicalize, morgan_fingerprint, parse_smiles, tanimoto
from molforge.chem.descriptors import compute_descriptors
from molforge.frechet import frechet_descriptor_distance, frechet_gaussian
from molforge.metrics import Cohort, hit_rate, internal_diversity, mean_max_similarity
from molforge.orchestrator.engine import CampaignConfig, run_architecture, run_campaign
from molforge.orchestrator.policy import PolicyBackend, c1_sentinel
from molforge.provenance import ProvenanceStore
from molforge.ranking import DesirabilityWeights, desirability_rank
from molforge.runner import RunnerConfig, iteration_report, render_iteration_report, run_best_of_n
from molforge.tools.errors import ToolPermissionError
from molforge.tools.mock import MockToolBackend
from molforge.tools.records import RAW_SENTINEL
from molforge.tools.registry import (
    ALL_TOOLS,
    HEADLINE_TOOLS,
    ToolRegistry,
    mas_permission_matrix,
)
from tests.corpus_util import load_descriptor_reference

CAMPAIGN_SEEDS = list(range(300, 350))  # 50 randomized scripted campaigns
_campaign_cache: dict[int, object] = {}


def campaign(seed: int):
    if seed not in _campaign_cache:
        _campaign_cache[seed] = run_campaign(
            CampaignConfig(mode="mas", seed=seed), PolicyBackend(seed=seed)
        )
    return _campaign_cache[seed]


def _ok(n: int, text: str) -> None:
    print(f"\nACCEPTANCE {n} PASS: {text}")


# ---------------------------------------------------------------------------


def test_criterion_01_chemistry_oracle_agreement():
    started = time.monotonic()
    reference = load_descriptor_reference()
    assert len(reference) == 100
    engine_sa, oracle_sa = [], []
    for rec in reference:
        d = compute_descriptors(parse_smiles(rec["smiles"]))
        assert abs(d.mol_weight - rec["mw"]) <= 0.01, rec["smiles"]
        assert abs(d.tpsa - rec["tpsa"]) <= 0.1, rec["smiles"]
        assert abs(d.logp - rec["logp"]) <= 0.05, rec["smiles"]
        assert abs(d.qed - rec["qed"]) <= 0.02, rec["smiles"]
        engine_sa.append(d.sa_score)
        oracle_sa.append(rec["sa"])
    rho = _spearman(engine_sa, oracle_sa)
    assert rho >= 0.9, f"SA Spearman rho {rho:.4f} < 0.9"
    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"oracle agreement took {elapsed:.2f}s (budget 5s)"
    _ok(1, f"MW/TPSA/LogP/QED within tolerance on 100 molecules; SA rho={rho:.3f}; {elapsed:.2f}s")


def _spearman(xs, ys) -> float:
    def rank(values):
        order = sorted(range(len(values)), key=lambda i: values[i])
        ranks = [0.0] * len(values)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
                j += 1
            avg = (i + j) / 2 + 1
            for k in range(i, j + 1):
                ranks[order[k]] = avg
            i = j + 1
        return ranks

    rx, ry = np.array(rank(xs)), np.array(rank(ys))
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def test_criterion_02_parser_canonicalizer_property_suite():
    from molforge.chem.pattern import isomorphic

    started = time.monotonic()
    rng = random.Random(20_24)
    failures = 0
    for rec in load_descriptor_reference():
        mol = parse_smiles(rec["smiles"])
        reference = canonicalize(mol)
        # Round-trip isomorphism checked by the independent VF2 oracle.
        assert isomorphic(mol, parse_smiles(reference)), rec["smiles"]
        n = len(mol.atoms)
        for _ in range(1000):
            order = list(range(n))
            rng.shuffle(order)
            if canonicalize(mol.permuted(order)) != reference:
                failures += 1
                break
    elapsed = time.monotonic() - started
    assert failures == 0
    assert elapsed < 60.0, f"property suite took {elapsed:.1f}s (budget 60s)"
    _ok(2, f"100 molecules x 1000 permutations, zero failures, {elapsed:.1f}s")


def test_criterion_03_metric_bruteforce_equivalence():
    corpus = [rec["smiles"] for rec in load_descriptor_reference()]
    rng = random.Random(99)
    for size in (2, 5, 11, 20):
        rows = rng.sample(corpus, size)
        refs = rng.sample(corpus, min(size, 8))
        cohort = Cohort.from_rows(rows, reference_actives=refs)
        mean, sd = internal_diversity(cohort)
        fps = [morgan_fingerprint(parse_smiles(s)) for s in rows]
        brute = [1.0 - tanimoto(a, b) for a, b in itertools.combinations(fps, 2)]
        assert mean == pytest.approx(np.mean(brute), abs=1e-12)
        assert sd == pytest.approx(np.std(brute), abs=1e-12)

        mm_mean, mm_sd = mean_max_similarity(cohort)
        ref_fps = [morgan_fingerprint(parse_smiles(s)) for s in cohort.reference_actives]
        brute_mm = [max(tanimoto(fp, rf) for rf in ref_fps) for fp in fps]
        assert mm_mean == pytest.approx(np.mean(brute_mm), abs=1e-12)
        assert mm_sd == pytest.approx(np.std(brute_mm), abs=1e-12)

        pool = [
            {"id": f"c{i}", "docking": -6 - rng.random() * 7, "qed": rng.random(),
             "sa": 1 + rng.random() * 9}
            for i in range(size)
        ]
        ranked, _ = desirability_rank(pool, DesirabilityWeights(0.5, 0.3, 0.2))
        assert [r.node_id for r in ranked] == _bruteforce_rank(pool)
    _ok(3, "diversity, max-similarity and ranking match brute force on sizes 2..20")


def _bruteforce_rank(pool):
    def norm(values):
        lo, hi = min(values), max(values)
        if hi - lo < 1e-12:
            return [1.0] * len(values)
        return [(v - lo) / (hi - lo) for v in values]

    d = norm([-c["docking"] for c in pool])
    q = norm([c["qed"] for c in pool])
    s = norm([-c["sa"] for c in pool])
    scored = [
        (0.5 * d[i] + 0.3 * q[i] + 0.2 * s[i], pool[i]["docking"], pool[i]["id"])
        for i in range(len(pool))
    ]
    return [row[2] for row in sorted(scored, key=lambda r: (-r[0], r[1], r[2]))]


def test_criterion_04_frechet_substitute():
    from tests.oracles.frechet_oracle import oracle_frechet

    rng = np.random.default_rng(17)
    a = rng.normal(size=(10, 8)) * rng.uniform(0.5, 3.0, size=8)
    b = rng.normal(loc=0.4, size=(10, 8))
    assert frechet_descriptor_distance(a, a) < 1e-6
    assert abs(frechet_descriptor_distance(a, b) - frechet_descriptor_distance(b, a)) < 1e-9
    assert frechet_descriptor_distance(a, b) == pytest.approx(oracle_frechet(a, b), abs=1e-9)
    # Degenerate 1-D case reduces to the squared mean gap.
    assert frechet_gaussian(
        np.array([0.0]), np.array([[0.0]]), np.array([1.0]), np.array([[0.0]])
    ) == pytest.approx(1.0, abs=1e-9)
    _ok(4, "self-distance < 1e-6, symmetric < 1e-9, matches straight-line oracle on 10v10")


def test_criterion_05_schedule_conformance():
    result = campaign(CAMPAIGN_SEEDS[0])
    expected = {
        1: ["PrincipalResearcher", "Database", "AIExpert", "MedicinalChemist", "Ranking", "ScientificCritic"],
        2: ["PrincipalResearcher", "MedicinalChemist", "Ranking", "ScientificCritic"],
        3: ["PrincipalResearcher", "MedicinalChemist", "Ranking"],
    }
    cycles = sorted({m.cycle for m in result.transcript.messages})
    assert cycles == [1, 2, 3]
    for cycle, roles in expected.items():
        assert result.transcript.speaker_sequence(cycle) == roles + ["PrincipalResearcher"], cycle
    assert "ScientificCritic" not in result.transcript.speaker_sequence(3)
    assert len(result.finalists) == 10
    _ok(5, "speaker sequences match the schedule; 3 cycles; exactly 10 finalists")


def test_criterion_06_context_discipline():
    leaks = 0
    oversize = 0
    for seed in CAMPAIGN_SEEDS:
        result = campaign(seed)
        shared = result.transcript.shared_text()
        if RAW_SENTINEL in shared:
            leaks += 1
        markers = [c1_sentinel(seed, tag) for tag in ("PR", "DB", "AI", "MC", "RK", "SC", "SOLO")]
        for package in result.state.context_packages:
            blob = package.serialize()
            if RAW_SENTINEL in blob or any(m in blob for m in markers):
                leaks += 1
            if len(blob.encode()) > 8192:
                oversize += 1
        for entry in result.state.request_log:
            if entry["cycle"] >= 2 and any(m in entry["request_text"] for m in markers):
                leaks += 1
            if RAW_SENTINEL in entry["request_text"] and entry["round"] == 0:
                # Raw payloads may appear only as same-turn observations
                # (round > 0); a round-0 request has no tool context yet.
                leaks += 1
    assert leaks == 0, f"{leaks} sentinel leaks"
    assert oversize == 0, f"{oversize} oversized context packages"
    _ok(6, f"zero leaks and all context packages within budget over {len(CAMPAIGN_SEEDS)} campaigns")


def test_criterion_07_provenance_integrity():
    for seed in CAMPAIGN_SEEDS:
        result = campaign(seed)
        assert result.provenance.validate() == [], seed
        store = result.provenance
        for row in result.finalists:
            chain = store.lineage(row["node_id"])
            root = chain[-1] if chain else row["node_id"]
            kind = store.edges[store.nodes[root].created_by].kind
            assert kind in ("seed", "database-import"), (seed, row["node_id"])
    # Lossless round-trip on 100-edge random stores.
    from tests.test_provenance import random_store

    for seed in (5, 23):
        store, _ = random_store(seed=seed, edges=100)
        clone = ProvenanceStore.import_json(store.export_json())
        assert store.structurally_equal(clone)
    _ok(7, "zero violations, rooted lineages, lossless 100-edge round-trips")


def test_criterion_08_tool_gating():
    backend = MockToolBackend(seed=1)
    target = backend.assemble_target("AKT1")
    matrix = mas_permission_matrix()
    registry = ToolRegistry(backend, matrix=matrix, target_provider=lambda: target)
    denied = 0
    for agent, tool, cycle in itertools.product(matrix, ALL_TOOLS, (1, 2, 3)):
        if cycle in matrix.get(agent, {}).get(tool, frozenset()):
            continue
        with pytest.raises(ToolPermissionError):
            registry.call(agent, tool, cycle, {})
        denied += 1
    assert registry.records == []
    assert denied > 0
    _ok(8, f"{denied} out-of-matrix (agent, tool, cycle) combinations all rejected")


def test_criterion_09_greedy_improvement_and_trajectory(tmp_path):
    for seed in CAMPAIGN_SEEDS[:20]:
        result = campaign(seed)
        store = result.provenance
        best = float("inf")
        per_cycle: dict[int, float] = {}
        for edge_id in store.temporal_chain:
            edge = store.edges[edge_id]
            for node_id in edge.outputs:
                docking = store.nodes[node_id].properties.get("docking")
                if docking is not None:
                    best = min(best, docking)
            if best < float("inf"):
                per_cycle[edge.cycle] = best
        values = [per_cycle[c] for c in sorted(per_cycle)]
        assert all(values[i + 1] <= values[i] for i in range(len(values) - 1)), seed

    # Planted-score fixture: baseline mean -10.05, final mean 31.5% lower.
    store = ProvenanceStore()
    seeds = []
    for _ in range(2):
        _, [node] = store.record(
            "AIExpert", "seed", [], ["CCOc1ccccc1"],
            properties=[{"docking": -10.05, "qed": 0.6, "sa": 2.5}], cycle=1,
        )
        seeds.append(node)
    planted = {1: -11.0, 2: -12.4, 3: -13.21575}
    for cycle, score in planted.items():
        for parent in seeds:
            store.record(
                "MedicinalChemist", "modification", [parent], ["CCOc1ccccc1C"],
                properties=[{"docking": score, "qed": 0.5, "sa": 2.7}], cycle=cycle,
            )
    run_dir = tmp_path / "planted"
    run_dir.mkdir()
    (run_dir / "provenance.json").write_text(store.export_json())
    report = iteration_report([run_dir])
    change = report["percent_change_vs_baseline"]["docking"]
    assert change == {"percent": 31.5, "direction": "improvement"}
    assert "31.5% improvement" in render_iteration_report(report)
    _ok(9, "greedy best-so-far non-increasing over 20 campaigns; planted fixture prints 31.5%")


def test_criterion_10_hit_rule():
    cohort = Cohort.from_rows(
        [("CCO", -9.5, ""), ("CCN", -8.9, ""), ("CCC", -10.1, ""), ("CCCC", -9.0, "")]
    )
    assert hit_rate(cohort) == pytest.approx(100 * 2 / 4)
    boundary = Cohort.from_rows([("CCO", -9.0, "")])
    assert hit_rate(boundary) == 0.0
    below = Cohort.from_rows([("CCO", -9.000001, "")])
    assert below.entries[0].docking < -9.0
    assert hit_rate(below) == 100.0
    _ok(10, "strict < -9.0 threshold; exact -9.0 is a non-hit")


def test_criterion_11_determinism_and_best_of_n(tmp_path):
    started = time.monotonic()
    config = RunnerConfig(campaign=CampaignConfig(mode="mas", seed=900), parallel_n=20)
    first = tmp_path / "first"
    second = tmp_path / "second"
    run_best_of_n(config, first)
    elapsed_twenty = time.monotonic() - started
    run_best_of_n(
        RunnerConfig(campaign=CampaignConfig(mode="mas", seed=900), parallel_n=20), second
    )
    a = (first / "aggregate.json").read_text()
    b = (second / "aggregate.json").read_text()
    assert a == b, "aggregate.json not byte-identical for identical config+seed"
    aggregate = json.loads(a)
    bests = [r["best_docking"] for r in aggregate["runs"] if r["status"] == "ok"]
    assert len(bests) == 20
    assert aggregate["best_of_n"][0]["docking"] == min(bests)
    assert elapsed_twenty < 120.0, f"20 scripted runs took {elapsed_twenty:.1f}s (budget 120s)"

    # Single-run failure isolation.
    import unittest.mock

    import molforge.runner as runner_module

    original = runner_module.run_campaign

    def flaky(cfg, backend, tool_backend=None):
        if cfg.seed == 951:
            raise RuntimeError("injected")
        return original(cfg, backend, tool_backend)

    with unittest.mock.patch.object(runner_module, "run_campaign", flaky):
        aggregate_flaky = run_best_of_n(
            RunnerConfig(campaign=CampaignConfig(mode="mas", seed=950), parallel_n=3, jobs=1),
            tmp_path / "flaky",
        )
    statuses = [r["status"] for r in aggregate_flaky["runs"]]
    assert statuses == ["ok", "failed", "ok"]
    _ok(11, f"byte-identical aggregates; dominance holds; 20 runs in {elapsed_twenty:.1f}s")


def test_criterion_12_three_architecture_harness():
    results = {
        mode: run_architecture(CampaignConfig(mode=mode, seed=777), PolicyBackend(seed=777))
        for mode in ("baseline", "single-agent", "mas")
    }
    assert results["baseline"].registry.records == []
    solo_tools = results["single-agent"].registry.exposed_tools("Solo")
    assert set(HEADLINE_TOOLS) <= solo_tools

    def schema(report):
        return {
            section: tuple(sorted(report[section]))
            for section in ("generation_quality", "drug_likeness", "target_specific")
        }

    schemas = {mode: schema(r.report) for mode, r in results.items()}
    assert schemas["baseline"] == schemas["single-agent"] == schemas["mas"]
    _ok(12, "baseline zero tool calls; solo agent holds the five tools; identical report schemas")
