"""Parallel campaign execution, Best-of-N aggregation, trajectory reports.

N independent campaigns run on a bounded worker pool with derived seeds
(``seed_i = seed + i``).  Individual failures are recorded in the manifest
and never abort sibling runs.  Aggregation pools the per-run finalists and
selects the top K by docking score (ties break by QED descending, then
id), so the aggregate best equals the minimum over per-run bests.
Durations are recorded as 0.0 for scripted runs to keep aggregate.json
byte-reproducible.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from molforge.chem import ChemError, compute_descriptors, parse_smiles
from molforge.llm import ScriptFileBackend
from molforge.orchestrator.engine import (
    CampaignConfig,
    run_campaign,
    write_run_directory,
)
from molforge.orchestrator.policy import PolicyBackend
from molforge.provenance import ProvenanceStore


@dataclass(slots=True)
class RunnerConfig:
    campaign: CampaignConfig
    parallel_n: int = 1
    jobs: int = 0  # 0 = decide from available parallelism
    backend_kind: str = "policy"  # policy | script | live
    script_path: str = ""
    output_dir: str = "runs"

    @classmethod
    def from_json_file(cls, path) -> "RunnerConfig":
        with open(path) as handle:
            data = json.load(handle)
        campaign_fields = {}
        for key in (
            "mode", "seed", "finalists_k", "context_budget", "model",
            "gen_n", "seeds_kept", "mc_parents", "mc_children",
            "ranking_weights", "target_query", "pdb_id", "docking_box",
        ):
            if key in data:
                campaign_fields[key] = data[key]
        budgets = data.get("budgets", {})
        if "context_bytes" in budgets:
            campaign_fields["context_budget"] = budgets["context_bytes"]
        backend = data.get("backend", {})
        return cls(
            campaign=CampaignConfig(**campaign_fields),
            parallel_n=int(data.get("parallel_n", 1)),
            jobs=int(data.get("jobs", 0)),
            backend_kind=backend.get("kind", "policy"),
            script_path=backend.get("path", ""),
            output_dir=data.get("output_dir", "runs"),
        )


def _llm_backend(runner: RunnerConfig, seed: int):
    if runner.backend_kind == "policy":
        campaign = runner.campaign
        return PolicyBackend(
            seed=seed,
            mc_parents=campaign.mc_parents,
            mc_children=campaign.mc_children,
            gen_n=campaign.gen_n,
            seeds_kept=campaign.seeds_kept,
        )
    if runner.backend_kind == "script":
        return ScriptFileBackend.from_path(runner.script_path)
    if runner.backend_kind == "live":
        from molforge.llm import LiveChatBackend

        return LiveChatBackend(model=runner.campaign.model)
    raise ValueError(f"unknown backend kind {runner.backend_kind!r}")


def _execute_one(args: tuple) -> dict:
    runner_dict, run_index, out_dir = args
    run_name = f"run-{run_index:03d}"
    runner = RunnerConfig(
        campaign=CampaignConfig(**runner_dict["campaign"]),
        parallel_n=runner_dict["parallel_n"],
        backend_kind=runner_dict["backend_kind"],
        script_path=runner_dict["script_path"],
        output_dir=runner_dict["output_dir"],
    )
    seed = runner.campaign.seed + run_index
    config = CampaignConfig(**{**runner_dict["campaign"], "seed": seed})
    run_dir = Path(out_dir) / run_name
    try:
        result = run_campaign(config, _llm_backend(runner, seed))
        write_run_directory(result, run_dir)
        scored = [
            row["properties"].get("docking")
            for row in result.finalists
            if row["properties"].get("docking") is not None
        ]
        return {
            "run_id": run_name,
            "seed": seed,
            "status": "ok",
            "dir": run_name,
            "finalist_count": len(result.finalists),
            "padded": result.padded,
            "best_docking": min(scored) if scored else None,
            "duration_s": 0.0,  # deterministic output contract for scripted runs
            "finalists": [
                {
                    "node_id": row["node_id"],
                    "smiles": row["smiles"],
                    "docking": row["properties"].get("docking"),
                    "qed": row["properties"].get("qed"),
                    "sa": row["properties"].get("sa"),
                    "run_id": run_name,
                }
                for row in result.finalists
            ],
            "report": result.report,
        }
    except Exception as exc:
        return {
            "run_id": run_name,
            "seed": seed,
            "status": "failed",
            "dir": run_name,
            "error": f"{type(exc).__name__}: {exc}",
            "duration_s": 0.0,
            "finalists": [],
            "report": None,
        }


def _runner_dict(runner: RunnerConfig) -> dict:
    return {
        "campaign": runner.campaign.to_dict(),
        "parallel_n": runner.parallel_n,
        "backend_kind": runner.backend_kind,
        "script_path": runner.script_path,
        "output_dir": runner.output_dir,
    }


def select_best_of_n(pooled: list[dict], k: int) -> list[dict]:
    """Top K pooled finalists by docking; ties by (QED desc, node id, run)."""
    scored = [row for row in pooled if row.get("docking") is not None]
    scored.sort(
        key=lambda row: (
            row["docking"],
            -(row.get("qed") if row.get("qed") is not None else -1.0),
            row["node_id"],
            row["run_id"],
        )
    )
    return scored[:k]


def run_best_of_n(runner: RunnerConfig, out_dir: str | Path | None = None) -> dict:
    """Execute ``parallel_n`` campaigns and write ``aggregate.json``."""
    if runner.parallel_n < 1:
        raise ValueError("parallel_n must be >= 1")
    out = Path(out_dir if out_dir is not None else runner.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [
        (_runner_dict(runner), index, str(out)) for index in range(runner.parallel_n)
    ]
    if runner.parallel_n == 1 or runner.jobs == 1:
        rows = [_execute_one(task) for task in tasks]
    else:
        workers = runner.jobs if runner.jobs > 0 else None
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_execute_one, tasks))
        except (OSError, PermissionError):
            rows = [_execute_one(task) for task in tasks]
    rows.sort(key=lambda r: r["run_id"])

    pooled = [f for row in rows if row["status"] == "ok" for f in row["finalists"]]
    k = runner.campaign.finalists_k
    aggregate = {
        "schema": "aggregate/1",
        "base_seed": runner.campaign.seed,
        "mode": runner.campaign.mode,
        "parallel_n": runner.parallel_n,
        "seed_derivation": "seed_i = seed + i",
        "runs": [
            {key: row[key] for key in ("run_id", "seed", "status", "dir", "duration_s")}
            | (
                {"best_docking": row["best_docking"], "finalist_count": row["finalist_count"], "padded": row["padded"]}
                if row["status"] == "ok"
                else {"error": row["error"]}
            )
            for row in rows
        ],
        "per_run_reports": {
            row["run_id"]: row["report"] for row in rows if row["status"] == "ok"
        },
        "pooled_finalists": pooled,
        "best_of_n": select_best_of_n(pooled, k),
    }
    (out / "aggregate.json").write_text(json.dumps(aggregate, indent=1, sort_keys=True))
    return aggregate


# ---------------------------------------------------------------------------
# Iteration trajectory report
# ---------------------------------------------------------------------------


def iteration_report(run_dirs: list[str | Path]) -> dict:
    """Per-iteration property trajectory of the optimizing agent.

    Groups modification nodes by cycle against the de novo baseline (seed
    nodes); reports mean/best docking, QED, SA and LogP per iteration plus
    the percent change of the final iteration mean versus baseline mean
    (|delta| / |baseline|, sign = improvement direction).
    """
    if not run_dirs:
        raise ValueError("at least one run directory required")
    baseline_rows: list[dict] = []
    per_cycle: dict[int, list[dict]] = {}
    for run_dir in run_dirs:
        path = Path(run_dir) / "provenance.json"
        store = ProvenanceStore.import_json(path.read_text())
        for node in store.nodes.values():
            edge = store.edges[node.created_by]
            row = _node_properties(node)
            if row is None:
                continue
            if edge.kind == "seed":
                baseline_rows.append(row)
            elif edge.kind == "modification":
                per_cycle.setdefault(edge.cycle, []).append(row)
    if not per_cycle:
        raise ValueError("no modification nodes found (no optimizing-agent output)")
    if not baseline_rows:
        raise ValueError("no-baseline: no seed nodes to compare against")

    def stats(rows: list[dict]) -> dict:
        out = {}
        for key in ("docking", "qed", "sa", "logp"):
            values = [r[key] for r in rows if r.get(key) is not None]
            if not values:
                out[key] = {"mean": None, "best": None, "n": 0}
                continue
            best = min(values) if key in ("docking", "sa") else max(values)
            out[key] = {
                "mean": sum(values) / len(values),
                "best": best,
                "n": len(values),
            }
        return out

    baseline = stats(baseline_rows)
    iterations = {cycle: stats(rows) for cycle, rows in sorted(per_cycle.items())}
    final_cycle = max(iterations)
    percent_change = {}
    for key in ("docking", "qed", "sa", "logp"):
        base_mean = baseline[key]["mean"]
        final_mean = iterations[final_cycle][key]["mean"]
        if base_mean in (None, 0) or final_mean is None:
            percent_change[key] = None
            continue
        magnitude = abs(final_mean - base_mean) / abs(base_mean) * 100.0
        lower_is_better = key in ("docking", "sa")
        improved = final_mean < base_mean if lower_is_better else final_mean > base_mean
        percent_change[key] = {
            "percent": round(magnitude, 1),
            "direction": "improvement" if improved else "regression",
        }
    return {
        "baseline": baseline,
        "iterations": {str(k): v for k, v in iterations.items()},
        "final_iteration": final_cycle,
        "percent_change_vs_baseline": percent_change,
    }


def _node_properties(node) -> dict | None:
    props = node.properties
    if props.get("docking") is None:
        return None
    logp = props.get("logp")
    if logp is None:
        try:
            logp = compute_descriptors(parse_smiles(node.canonical_smiles)).logp
        except ChemError:
            logp = None
    return {
        "docking": props.get("docking"),
        "qed": props.get("qed"),
        "sa": props.get("sa"),
        "logp": logp,
    }


def render_iteration_report(report: dict) -> str:
    lines = ["Iteration trajectory (optimizing agent vs de novo baseline)"]
    header = f"{'stage':<14}{'n':>4}{'docking':>10}{'best':>8}{'qed':>8}{'sa':>8}{'logp':>8}"
    lines.append(header)
    lines.append("-" * len(header))

    def fmt(value, width=10, digits=2):
        return f"{value:>{width}.{digits}f}" if value is not None else f"{'-':>{width}}"

    def row(label, block):
        docking = block["docking"]
        return (
            f"{label:<14}{docking['n']:>4}{fmt(docking['mean'])}{fmt(docking['best'], 8)}"
            f"{fmt(block['qed']['mean'], 8)}{fmt(block['sa']['mean'], 8)}{fmt(block['logp']['mean'], 8)}"
        )

    lines.append(row("baseline", report["baseline"]))
    for cycle, block in report["iterations"].items():
        lines.append(row(f"iteration-{cycle}", block))
    change = report["percent_change_vs_baseline"]["docking"]
    if change is not None:
        lines.append(
            f"docking mean change vs baseline: {change['percent']}% {change['direction']}"
        )
    return "\n".join(lines) + "\n"
