"""Command-line entry point.

Commands:
    molforge campaign run -c config.json [--jobs N] [-o DIR]
    molforge metrics -i generated.smi -a actives.smi [--threshold -9.0] [-o DIR]
    molforge provenance <run-dir> trace <node-id> [--dot]
    molforge provenance <run-dir> log
    molforge provenance <run-dir> validate
    molforge iteration-report <run-dirs...>
    molforge report render <run-dir>

Exit codes: 0 success, 1 usage error, 2 data error, 3 all runs failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ALL_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="molforge", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    campaign = sub.add_parser("campaign", help="run optimization campaigns")
    campaign_sub = campaign.add_subparsers(dest="subcommand", required=True)
    run = campaign_sub.add_parser("run", help="execute parallel campaigns from a config file")
    run.add_argument("-c", "--config", required=True, help="campaign config JSON")
    run.add_argument("-o", "--output", default=None, help="override output directory")
    run.add_argument("--jobs", type=int, default=0, help="worker pool cap (0 = auto)")

    metrics = sub.add_parser("metrics", help="evaluate a SMILES cohort")
    metrics.add_argument("-i", "--input", required=True, help="SMILES file (smiles[\\tscore[\\ttag]])")
    metrics.add_argument("-a", "--actives", required=True, help="reference actives file")
    metrics.add_argument("--threshold", type=float, default=-9.0, help="hit threshold kcal/mol")
    metrics.add_argument("-o", "--output", default=None, help="directory for report files")

    prov = sub.add_parser("provenance", help="query a run's provenance record")
    prov.add_argument("run_dir", help="campaign run directory")
    prov_sub = prov.add_subparsers(dest="subcommand", required=True)
    trace = prov_sub.add_parser("trace", help="print a node's lineage chain")
    trace.add_argument("node_id")
    trace.add_argument("--dot", action="store_true", help="emit DOT instead of text")
    prov_sub.add_parser("log", help="print the temporal chain")
    prov_sub.add_parser("validate", help="check structural invariants")

    iteration = sub.add_parser("iteration-report", help="per-iteration property trajectory")
    iteration.add_argument("run_dirs", nargs="+")

    report = sub.add_parser("report", help="render stored reports")
    report_sub = report.add_subparsers(dest="subcommand", required=True)
    render = report_sub.add_parser("render", help="print a run's report as text")
    render.add_argument("run_dir")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "campaign":
            return _cmd_campaign_run(args)
        if args.command == "metrics":
            return _cmd_metrics(args)
        if args.command == "provenance":
            return _cmd_provenance(args)
        if args.command == "iteration-report":
            return _cmd_iteration_report(args)
        if args.command == "report":
            return _cmd_report_render(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_USAGE


def _cmd_campaign_run(args) -> int:
    from molforge.runner import RunnerConfig, run_best_of_n

    try:
        runner = RunnerConfig.from_json_file(args.config)
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.jobs:
        runner.jobs = args.jobs
    aggregate = run_best_of_n(runner, args.output)
    ok = [r for r in aggregate["runs"] if r["status"] == "ok"]
    failed = [r for r in aggregate["runs"] if r["status"] != "ok"]
    out = args.output if args.output is not None else runner.output_dir
    print(f"{len(ok)}/{len(aggregate['runs'])} runs succeeded -> {out}/aggregate.json")
    for row in failed:
        print(f"  {row['run_id']} failed: {row['error']}", file=sys.stderr)
    if not ok:
        return EXIT_ALL_FAILED
    return EXIT_OK


def _cmd_metrics(args) -> int:
    from molforge.metrics import (
        Cohort,
        MetricError,
        build_report,
        render_report_text,
        report_to_json,
    )

    try:
        cohort = Cohort.from_smiles_file(args.input, args.actives)
        report = build_report(cohort, threshold=args.threshold)
    except (OSError, MetricError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    text = render_report_text(report)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report_to_json(report))
        (out / "report.txt").write_text(text)
        print(f"wrote {out / 'report.json'} and {out / 'report.txt'}")
    else:
        print(text, end="")
    return EXIT_OK


def _load_store(run_dir: str):
    from molforge.provenance import ProvenanceStore

    path = Path(run_dir) / "provenance.json"
    if not path.exists():
        raise FileNotFoundError(f"no provenance.json under {run_dir!r}")
    return ProvenanceStore.import_json(path.read_text())


def _cmd_provenance(args) -> int:
    from molforge.provenance import ProvenanceError

    try:
        store = _load_store(args.run_dir)
    except (FileNotFoundError, ProvenanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    if args.subcommand == "validate":
        violations = store.validate()
        print(f"{len(violations)} violations")
        for violation in violations:
            print(f"  {violation}")
        return EXIT_OK

    if args.subcommand == "log":
        for edge_id in store.temporal_chain:
            edge = store.edges[edge_id]
            outputs = ", ".join(edge.outputs)
            print(
                f"{edge.seq:>4}  cycle {edge.cycle}  {edge.agent:<18} {edge.kind:<18} -> {outputs}"
            )
        return EXIT_OK

    # trace
    try:
        chain = [args.node_id] + store.lineage(args.node_id)
    except ProvenanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.dot:
        print("digraph lineage {")
        for child, parent in zip(chain, chain[1:]):
            print(f'  "{parent}" -> "{child}";')
        if len(chain) == 1:
            print(f'  "{chain[0]}";')
        print("}")
        return EXIT_OK
    # Nearest-first storage; print root-first with per-step deltas.
    ordered = list(reversed(chain))
    previous = None
    for node_id in ordered:
        node = store.nodes[node_id]
        docking = node.properties.get("docking")
        delta = ""
        if previous is not None and docking is not None:
            prev_docking = previous.properties.get("docking")
            if prev_docking is not None:
                delta = f"  (delta {docking - prev_docking:+.2f})"
        docking_text = f"{docking:.2f}" if docking is not None else "-"
        print(
            f"{node_id:<12} docking {docking_text:>7}{delta}  qed "
            f"{node.properties.get('qed', '-')}  sa {node.properties.get('sa', '-')}  "
            f"{node.canonical_smiles}"
        )
        previous = node
    return EXIT_OK


def _cmd_iteration_report(args) -> int:
    from molforge.runner import iteration_report, render_iteration_report

    try:
        report = iteration_report(args.run_dirs)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(render_iteration_report(report), end="")
    return EXIT_OK


def _cmd_report_render(args) -> int:
    path = Path(args.run_dir) / "report.json"
    if not path.exists():
        print(f"error: no report.json under {args.run_dir!r}", file=sys.stderr)
        return EXIT_DATA
    from molforge.metrics import render_report_text

    print(render_report_text(json.loads(path.read_text())), end="")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
