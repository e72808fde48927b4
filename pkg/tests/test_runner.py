"""Best-of-N runner, aggregation, iteration reports, CLI surface."""

import json
from pathlib import Path

import pytest

from molforge.cli import main as cli_main
from molforge.orchestrator.engine import CampaignConfig
from molforge.provenance import ProvenanceStore
from molforge.runner import (
    RunnerConfig,
    iteration_report,
    render_iteration_report,
    run_best_of_n,
    select_best_of_n,
)


def runner(seed=50, n=3, mode="mas", **kw):
    return RunnerConfig(campaign=CampaignConfig(mode=mode, seed=seed, **kw), parallel_n=n, jobs=1)


def test_parallel_runs_and_aggregate(tmp_path):
    aggregate = run_best_of_n(runner(n=3), tmp_path)
    assert [r["status"] for r in aggregate["runs"]] == ["ok", "ok", "ok"]
    assert (tmp_path / "aggregate.json").exists()
    for i in range(3):
        run_dir = tmp_path / f"run-{i:03d}"
        for name in ("transcript.jsonl", "provenance.json", "toolcalls.jsonl",
                     "finalists.json", "report.json", "report.txt"):
            assert (run_dir / name).exists(), name


def test_seed_derivation(tmp_path):
    aggregate = run_best_of_n(runner(seed=70, n=3), tmp_path)
    assert [r["seed"] for r in aggregate["runs"]] == [70, 71, 72]


def test_single_run_aggregate_equals_run_finalists(tmp_path):
    aggregate = run_best_of_n(runner(n=1), tmp_path)
    finalists = json.loads((tmp_path / "run-000" / "finalists.json").read_text())
    pooled_ids = {f["node_id"] for f in aggregate["pooled_finalists"]}
    assert pooled_ids == {f["node_id"] for f in finalists["finalists"]}


def test_best_of_n_dominance(tmp_path):
    aggregate = run_best_of_n(runner(seed=90, n=4), tmp_path)
    bests = [r["best_docking"] for r in aggregate["runs"] if r["status"] == "ok"]
    assert aggregate["best_of_n"][0]["docking"] == min(bests)
    assert len(aggregate["best_of_n"]) <= 10


def test_best_of_n_selection_subset_of_pool():
    pooled = [
        {"node_id": f"n{i}", "run_id": "run-000", "docking": -8 - i * 0.25, "qed": 0.5, "sa": 3}
        for i in range(15)
    ]
    chosen = select_best_of_n(pooled, 10)
    assert len(chosen) == 10
    assert all(c in pooled for c in chosen)
    scores = [c["docking"] for c in chosen]
    assert scores == sorted(scores)


def test_reproducible_aggregate_bytes(tmp_path):
    a_dir = tmp_path / "a"
    b_dir = tmp_path / "b"
    run_best_of_n(runner(seed=60, n=2), a_dir)
    run_best_of_n(runner(seed=60, n=2), b_dir)
    assert (a_dir / "aggregate.json").read_text() == (b_dir / "aggregate.json").read_text()


def test_injected_failure_does_not_abort_siblings(tmp_path, monkeypatch):
    import molforge.runner as runner_module

    original = runner_module.run_campaign

    def flaky(config, backend, tool_backend=None):
        if config.seed == 81:  # second run fails
            raise RuntimeError("injected failure")
        return original(config, backend, tool_backend)

    monkeypatch.setattr(runner_module, "run_campaign", flaky)
    aggregate = run_best_of_n(runner(seed=80, n=3), tmp_path)
    statuses = [r["status"] for r in aggregate["runs"]]
    assert statuses == ["ok", "failed", "ok"]
    assert "injected failure" in aggregate["runs"][1]["error"]
    assert len(aggregate["per_run_reports"]) == 2


def test_rerun_after_deleting_one_run_dir(tmp_path):
    aggregate = run_best_of_n(runner(seed=64, n=3), tmp_path)
    import shutil

    shutil.rmtree(tmp_path / "run-001")
    # Re-aggregate the remaining runs from their directories.
    remaining = [r for r in aggregate["runs"] if (tmp_path / r["dir"]).exists()]
    assert len(remaining) == 2


# ----------------------------------------------------------------------------
# Iteration report
# ----------------------------------------------------------------------------


def planted_run_dir(tmp_path, baseline_scores, iteration_scores):
    """Run directory whose provenance carries planted docking means."""
    store = ProvenanceStore()
    seeds = []
    for score in baseline_scores:
        _, [node] = store.record(
            "AIExpert", "seed", [], ["CCOc1ccccc1"],
            properties=[{"docking": score, "qed": 0.6, "sa": 2.5}], cycle=1,
        )
        seeds.append(node)
    for cycle, scores in iteration_scores.items():
        for i, score in enumerate(scores):
            store.record(
                "MedicinalChemist",
                "modification",
                [seeds[i % len(seeds)]],
                ["CCOc1ccccc1C"],
                properties=[{"docking": score, "qed": 0.5, "sa": 2.8}],
                cycle=cycle,
            )
    run_dir = tmp_path / "planted"
    run_dir.mkdir()
    (run_dir / "provenance.json").write_text(store.export_json())
    return run_dir


def test_iteration_report_planted_315(tmp_path):
    # Baseline mean -10.05; final iteration mean -13.21575 = 31.5% better.
    run_dir = planted_run_dir(
        tmp_path,
        baseline_scores=[-10.05, -10.05],
        iteration_scores={1: [-10.5, -10.5], 2: [-11.9, -11.9], 3: [-13.21575, -13.21575]},
    )
    report = iteration_report([run_dir])
    change = report["percent_change_vs_baseline"]["docking"]
    assert change["percent"] == 31.5
    assert change["direction"] == "improvement"
    assert "31.5% improvement" in render_iteration_report(report)


def test_iteration_report_documented_convention(tmp_path):
    # The documented convention |delta mean| / |baseline mean|: a shift
    # from -10.05 to -11.91 is 18.5% under it.
    run_dir = planted_run_dir(
        tmp_path,
        baseline_scores=[-10.05],
        iteration_scores={1: [-11.91]},
    )
    report = iteration_report([run_dir])
    assert report["percent_change_vs_baseline"]["docking"]["percent"] == 18.5


def test_iteration_report_single_iteration(tmp_path):
    run_dir = planted_run_dir(tmp_path, [-9.0], {1: [-9.5]})
    report = iteration_report([run_dir])
    assert list(report["iterations"]) == ["1"]


def test_iteration_report_requires_baseline(tmp_path):
    store = ProvenanceStore()
    _, [node] = store.record("Database", "database-import", [], ["CCO"], cycle=1)
    store.record(
        "MedicinalChemist", "modification", [node], ["CCN"],
        properties=[{"docking": -9.0}], cycle=1,
    )
    run_dir = tmp_path / "nobase"
    run_dir.mkdir()
    (run_dir / "provenance.json").write_text(store.export_json())
    with pytest.raises(ValueError, match="no-baseline"):
        iteration_report([run_dir])


def test_iteration_report_requires_mc_nodes(tmp_path):
    store = ProvenanceStore()
    store.record("AIExpert", "seed", [], ["CCO"], properties=[{"docking": -9.0}], cycle=1)
    run_dir = tmp_path / "nomc"
    run_dir.mkdir()
    (run_dir / "provenance.json").write_text(store.export_json())
    with pytest.raises(ValueError):
        iteration_report([run_dir])


# ----------------------------------------------------------------------------
# CLI surface
# ----------------------------------------------------------------------------


def test_cli_campaign_and_queries(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "mode": "mas",
                "seed": 7,
                "parallel_n": 1,
                "output_dir": str(tmp_path / "runs"),
                "backend": {"kind": "policy"},
            }
        )
    )
    assert cli_main(["campaign", "run", "-c", str(config_path)]) == 0
    run_dir = str(tmp_path / "runs" / "run-000")

    assert cli_main(["provenance", run_dir, "validate"]) == 0
    out = capsys.readouterr().out
    assert "0 violations" in out

    assert cli_main(["provenance", run_dir, "log"]) == 0
    assert cli_main(["report", "render", run_dir]) == 0
    out = capsys.readouterr().out
    assert "Generation Quality" in out

    finalists = json.loads(Path(run_dir, "finalists.json").read_text())
    node = finalists["finalists"][0]["node_id"]
    assert cli_main(["provenance", run_dir, "trace", node]) == 0
    assert cli_main(["provenance", run_dir, "trace", node, "--dot"]) == 0
    out = capsys.readouterr().out
    assert "digraph" in out

    assert cli_main(["iteration-report", run_dir]) == 0


def test_cli_trace_seed_node_single_line(tmp_path, capsys):
    store = ProvenanceStore()
    _, [node] = store.record(
        "AIExpert", "seed", [], ["CCO"], properties=[{"docking": -9.0}], cycle=1
    )
    run_dir = tmp_path / "seedrun"
    run_dir.mkdir()
    (run_dir / "provenance.json").write_text(store.export_json())
    assert cli_main(["provenance", str(run_dir), "trace", node]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1


def test_cli_metrics(tmp_path, capsys):
    gen = tmp_path / "gen.smi"
    gen.write_text("CCO\t-9.5\nCCN\t-8.0\nC1CC\t\n")
    actives = tmp_path / "actives.smi"
    actives.write_text("CCO\nc1ccccc1O\n")
    assert cli_main(["metrics", "-i", str(gen), "-a", str(actives)]) == 0
    out = capsys.readouterr().out
    assert "Target-Specific Performance" in out

    out_dir = tmp_path / "reports"
    assert cli_main(
        ["metrics", "-i", str(gen), "-a", str(actives), "--threshold", "-9.0", "-o", str(out_dir)]
    ) == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["target_specific"]["hit_threshold"] == -9.0
    assert report["target_specific"]["hit_rate_pct"] == 50.0


def test_cli_exit_codes(tmp_path):
    assert cli_main(["metrics", "-i", "/nonexistent", "-a", "/nonexistent"]) == 2
    assert cli_main(["provenance", str(tmp_path), "validate"]) == 2
    assert cli_main(["nonsense"]) == 1

    bad_config = tmp_path / "bad.json"
    bad_config.write_text("{not json")
    assert cli_main(["campaign", "run", "-c", str(bad_config)]) == 2


def test_cli_all_runs_failed_exit_code(tmp_path, monkeypatch):
    import molforge.runner as runner_module

    def always_fail(config, backend, tool_backend=None):
        raise RuntimeError("boom")

    monkeypatch.setattr(runner_module, "run_campaign", always_fail)
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "mode": "mas",
                "seed": 7,
                "parallel_n": 2,
                "jobs": 1,
                "output_dir": str(tmp_path / "runs"),
                "backend": {"kind": "policy"},
            }
        )
    )
    assert cli_main(["campaign", "run", "-c", str(config_path)]) == 3
