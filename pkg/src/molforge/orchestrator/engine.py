"""Turn-based research-cycle engine.

One campaign = exactly three cycles, each a fixed speaker schedule.  A
turn is a bounded tool loop: the agent's response may request one tool
call per round (max ``TOOL_ROUNDS``); raw tool output is observed
privately by the calling agent for the current turn only, and only the
final, summary-bearing message joins the shared transcript.  Accepted
molecule proposals are recorded into provenance with the proposing agent,
and the record assignments are attached to that same message as its
machine-readable projection.  Between cycles, the only carried state is
the closing summary plus a provenance digest, under a byte budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from molforge.chem import ChemError, compute_descriptors, parse_smiles
from molforge.llm import LlmRequest, LlmResponse
from molforge.metrics import Cohort, CohortEntry, build_report, render_report_text, report_to_json
from molforge.orchestrator.blocks import ParsedBlocks, parse_structured_blocks
from molforge.orchestrator.roles import PERSONAS, CycleSpec, schedule_for_mode
from molforge.orchestrator.transcript import (
    CONTEXT_BUDGET_BYTES,
    ContextPackage,
    Transcript,
    build_context_package,
)
from molforge.provenance import ProvenanceStore
from molforge.ranking import DesirabilityWeights, desirability_rank, top_k
from molforge.tools.errors import ToolError, ToolPermissionError
from molforge.tools.mock import MockToolBackend
from molforge.tools.registry import (
    ToolRegistry,
    baseline_permission_matrix,
    mas_permission_matrix,
    single_agent_permission_matrix,
)
from molforge.tools.target import TargetContext

TOOL_ROUNDS = 5
DIGEST_ROWS = 8

_PROPOSAL_KIND = {
    "Database": "database-import",
    "AIExpert": "seed",
    "MedicinalChemist": "modification",
}


class CampaignError(RuntimeError):
    pass


@dataclass(slots=True)
class CampaignConfig:
    mode: str = "mas"  # mas | single-agent | baseline
    seed: int = 0
    finalists_k: int = 10
    cycles: int = 3
    context_budget: int = CONTEXT_BUDGET_BYTES
    model: str = "scripted-policy"
    gen_n: int = 8
    seeds_kept: int = 4
    mc_parents: int = 3
    mc_children: int = 2
    ranking_weights: dict = field(default_factory=lambda: {"docking": 0.5, "qed": 0.3, "sa": 0.2})
    target_query: str = "AKT1"
    pdb_id: str = ""
    docking_box: dict | None = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed,
            "finalists_k": self.finalists_k,
            "cycles": self.cycles,
            "context_budget": self.context_budget,
            "model": self.model,
            "gen_n": self.gen_n,
            "seeds_kept": self.seeds_kept,
            "mc_parents": self.mc_parents,
            "mc_children": self.mc_children,
            "ranking_weights": self.ranking_weights,
            "target_query": self.target_query,
            "pdb_id": self.pdb_id,
        }


@dataclass(slots=True)
class CampaignState:
    config: CampaignConfig
    llm: object
    backend: object
    registry: ToolRegistry
    provenance: ProvenanceStore
    transcript: Transcript
    target: TargetContext | None = None
    context_package: ContextPackage | None = None
    attempts: list[tuple[str, float | None, str]] = field(default_factory=list)
    agent_rankings: dict[int, list[str]] = field(default_factory=dict)
    request_log: list[dict] = field(default_factory=list)
    context_packages: list[ContextPackage] = field(default_factory=list)


@dataclass(slots=True)
class CampaignResult:
    config: CampaignConfig
    finalists: list[dict]
    padded: bool
    provenance: ProvenanceStore
    transcript: Transcript
    registry: ToolRegistry
    report: dict
    state: CampaignState


def build_state(config: CampaignConfig, llm_backend, tool_backend=None) -> CampaignState:
    backend = tool_backend if tool_backend is not None else MockToolBackend(seed=config.seed)
    matrix = {
        "mas": mas_permission_matrix,
        "single-agent": single_agent_permission_matrix,
        "baseline": baseline_permission_matrix,
    }[config.mode]()
    state = CampaignState(
        config=config,
        llm=llm_backend,
        backend=backend,
        registry=None,  # type: ignore[arg-type]
        provenance=ProvenanceStore(),
        transcript=Transcript(),
    )
    state.registry = ToolRegistry(
        backend, matrix=matrix, target_provider=lambda: state.target
    )
    return state


# ---------------------------------------------------------------------------
# Request assembly
# ---------------------------------------------------------------------------


def _render_shared_history(state: CampaignState, cycle: int) -> str:
    lines = [f"SHARED HISTORY (cycle {cycle}):"]
    for message in state.transcript.shared_for_cycle(cycle):
        lines.append(f"[{message.role}] {message.text}")
        for row in message.blocks.get("recorded", []):
            lines.append(
                f"RECORDED id={row['id']} smiles={row['smiles']} "
                f"docking={row.get('docking')} qed={row.get('qed')} "
                f"sa={row.get('sa')} parent={row.get('parent')}"
            )
    return "\n".join(lines)


def _build_request(
    state: CampaignState,
    role: str,
    spec: CycleSpec,
    phase: str,
    observations: list[tuple[str, dict]],
    round_index: int,
) -> LlmRequest:
    config = state.config
    tools = sorted(state.registry.exposed_tools(role))
    messages: list[tuple[str, str]] = [
        (
            "system",
            f"{PERSONAS[role]}\nMode: {config.mode}; cycle {spec.index} of "
            f"{config.cycles} ({spec.purpose}); phase {phase}; "
            f"tools available: {', '.join(tools) if tools else 'none'}.",
        )
    ]
    if state.context_package is not None:
        messages.append(("user", state.context_package.render_text()))
    messages.append(("user", _render_shared_history(state, spec.index)))
    for tool, raw in observations:
        messages.append(("user", f"OBSERVATION[{tool}]: {json.dumps(raw, sort_keys=True)}"))
    messages.append(("user", f"Respond now as {role}."))
    return LlmRequest(
        model=config.model,
        messages=messages,
        agent_role=role,
        cycle=spec.index,
        turn=(0 if phase != "close" else 10) + round_index,
    )


# ---------------------------------------------------------------------------
# Turn execution
# ---------------------------------------------------------------------------


def run_turn(state: CampaignState, role: str, spec: CycleSpec, phase: str = "work"):
    """Bounded tool loop ending in one shared message.

    Returns (message, parsed blocks of the final response).
    """
    observations: list[tuple[str, dict]] = []
    record_ids: list[str] = []
    response: LlmResponse | None = None
    parsed: ParsedBlocks | None = None
    for round_index in range(TOOL_ROUNDS + 1):
        request = _build_request(state, role, spec, phase, observations, round_index)
        state.request_log.append(
            {
                "cycle": spec.index,
                "role": role,
                "phase": phase,
                "round": round_index,
                "request_text": "\n".join(text for _, text in request.messages),
            }
        )
        response = state.llm.complete(request)
        parsed = parse_structured_blocks(response.text)
        if parsed.tool_calls and round_index < TOOL_ROUNDS:
            call = parsed.tool_calls[0]
            state.transcript.append(
                spec.index, role, response.text, visibility="private"
            )
            try:
                record, raw = state.registry.call(role, call.tool, spec.index, call.args)
                record_ids.append(record.call_id)
                observations.append((call.tool, raw))
                _ingest_tool_result(state, call.tool, raw, role, spec.index)
            except ToolPermissionError as exc:
                observations.append(("error", {"kind": "permission", "error": str(exc)}))
            except ToolError as exc:
                observations.append(("error", {"kind": exc.kind, "error": str(exc)}))
            continue
        break
    assert response is not None and parsed is not None
    message = state.transcript.append(
        spec.index, role, response.text, visibility="shared", tool_record_ids=record_ids
    )
    return message, parsed


def _ingest_tool_result(state, tool: str, raw: dict, role: str, cycle: int) -> None:
    """Fold tool output into engine state: target context, attempt log."""
    if tool == "search_uniprot":
        target = state.target or TargetContext()
        target.uniprot_accession = raw["accession"]
        target.gene = raw["gene"]
        target.protein_name = raw["protein_name"]
        target.protein_sequence = raw["sequence"]
        target.docking_box = state.config.docking_box
        state.target = target
    elif tool in ("get_pdb_file", "afdb_call"):
        target = state.target or TargetContext()
        target.structure_ref = raw["structure_ref"]
        target.structure_predicted = bool(raw.get("predicted"))
        if raw.get("pdb_id"):
            target.pdb_id = raw["pdb_id"]
        state.target = target
    elif tool == "search_chembl_activity":
        target = state.target or TargetContext()
        target.actives = [(r["smiles"], r["activity"], "active") for r in raw["actives"]]
        target.inactives = [
            (r["smiles"], r["activity"], "inactive") for r in raw["inactives"]
        ]
        state.target = target
    elif tool in ("vina_mol_gen", "vina_report"):
        tag = f"{role}:c{cycle}"
        for row in raw.get("candidates", []):
            state.attempts.append((row["smiles"], row.get("docking"), tag))
    elif tool == "run_docking":
        tag = f"{role}:c{cycle}"
        for row in raw.get("results", []):
            state.attempts.append((row["smiles"], row.get("score"), tag))


# ---------------------------------------------------------------------------
# Proposal recording
# ---------------------------------------------------------------------------


def _proposal_kind(role: str, cycle: int, has_parents: bool) -> str:
    if role in _PROPOSAL_KIND:
        return _PROPOSAL_KIND[role]
    # Solo agent: seeds in cycle 1 (or parentless), modifications after.
    if has_parents:
        return "modification"
    return "seed"


def _record_proposals(state: CampaignState, message, parsed: ParsedBlocks, role: str, cycle: int):
    if role in ("PrincipalResearcher", "Ranking", "ScientificCritic"):
        return []
    label_to_node: dict[str, str] = {}
    recorded_rows: list[dict] = []
    for proposal in parsed.proposals:
        parents: list[str] = []
        unresolved = False
        for ref in proposal.parents:
            if ref in state.provenance.nodes:
                parents.append(ref)
            elif ref in label_to_node:
                parents.append(label_to_node[ref])
            else:
                unresolved = True
        if unresolved:
            parsed.diagnostics.append(
                f"proposal {proposal.label!r} skipped: unresolved parent {proposal.parents}"
            )
            continue
        kind = _proposal_kind(role, cycle, bool(parents))
        try:
            _, [node_id] = state.provenance.record(
                role,
                kind,
                parents,
                [proposal.smiles],
                rationale=proposal.rationale,
                evidence=list(message.tool_record_ids),
                cycle=cycle,
                properties=[proposal.props],
            )
        except Exception as exc:  # invalid SMILES was already filtered by parser
            parsed.diagnostics.append(f"proposal {proposal.label!r} rejected: {exc}")
            continue
        label_to_node[proposal.label] = node_id
        node = state.provenance.nodes[node_id]
        recorded_rows.append(
            {
                "id": node_id,
                "label": proposal.label,
                "smiles": node.canonical_smiles,
                "docking": proposal.props.get("docking"),
                "qed": proposal.props.get("qed"),
                "sa": proposal.props.get("sa"),
                "parent": node.parent,
            }
        )
        if state.config.mode == "baseline":
            state.attempts.append((proposal.smiles, proposal.props.get("docking"), f"{role}:c{cycle}"))
    if recorded_rows:
        message.blocks["recorded"] = recorded_rows
    return recorded_rows


# ---------------------------------------------------------------------------
# Cycle and campaign
# ---------------------------------------------------------------------------


def _digest_rows(state: CampaignState) -> list[dict]:
    rows = []
    for node in state.provenance.nodes.values():
        docking = node.properties.get("docking")
        rows.append(
            {
                "id": node.id,
                "smiles": node.canonical_smiles,
                "docking": docking,
                "qed": node.properties.get("qed"),
                "sa": node.properties.get("sa"),
                "parent": node.parent,
            }
        )
    scored = [r for r in rows if r["docking"] is not None]
    scored.sort(key=lambda r: (r["docking"], r["id"]))
    return scored[:DIGEST_ROWS]


def run_cycle(state: CampaignState, spec: CycleSpec) -> dict:
    outcome = {"cycle": spec.index, "new_nodes": [], "ranking": None}
    for role in spec.ordered_roles:
        phase = "open" if role in ("PrincipalResearcher",) else "work"
        message, parsed = run_turn(state, role, spec, phase=phase)
        rows = _record_proposals(state, message, parsed, role, spec.index)
        outcome["new_nodes"].extend(row["id"] for row in rows)
        if parsed.rankings:
            state.agent_rankings[spec.index] = parsed.rankings[-1]
            outcome["ranking"] = parsed.rankings[-1]
    closing_message, _ = run_turn(state, spec.ordered_roles[0], spec, phase="close")
    summary, objectives = _split_summary(closing_message.text)
    package = build_context_package(
        spec.index, summary, objectives, _digest_rows(state), state.config.context_budget
    )
    state.context_package = package
    state.context_packages.append(package)
    outcome["summary"] = summary
    return outcome


def _split_summary(text: str) -> tuple[str, str]:
    marker = "NEXT-OBJECTIVES:"
    if marker in text:
        summary, _, objectives = text.partition(marker)
        return summary.strip(), objectives.strip()
    return text.strip(), ""


def _eval_score_missing(state: CampaignState) -> None:
    """Evaluation-time scoring for pools built without docking tools.

    Baseline campaigns make zero tool calls; the evaluation harness docks
    their proposals afterwards so reports stay schema-identical.  Scores
    are flagged via the ``eval_scored`` property.
    """
    scorer = MockToolBackend(seed=state.config.seed)
    for node in state.provenance.nodes.values():
        if "docking" in node.properties:
            continue
        try:
            mol = parse_smiles(node.canonical_smiles)
            descriptors = compute_descriptors(mol)
            node.properties.update(
                {
                    "docking": round(scorer.dock_score(node.canonical_smiles), 2),
                    "qed": round(descriptors.qed, 4),
                    "sa": round(descriptors.sa_score, 4),
                    "eval_scored": 1.0,
                }
            )
        except ChemError:
            continue
    rescored = []
    for smiles, score, tag in state.attempts:
        if score is None:
            try:
                score = round(scorer.dock_score(smiles), 2)
            except ToolError:
                score = None
        rescored.append((smiles, score, tag))
    state.attempts = rescored


def finalize(state: CampaignState) -> CampaignResult:
    _eval_score_missing(state)
    pool = []
    for node in state.provenance.nodes.values():
        props = node.properties
        if all(props.get(k) is not None for k in ("docking", "qed", "sa")):
            pool.append(
                {
                    "id": node.id,
                    "docking": props["docking"],
                    "qed": props["qed"],
                    "sa": props["sa"],
                }
            )
    pool.sort(key=lambda c: c["id"])
    finalists_rows: list[dict] = []
    padded = False
    if pool:
        weights = DesirabilityWeights(**state.config.ranking_weights)
        ranked, _ = desirability_rank(pool, weights)
        selection = top_k(ranked, state.config.finalists_k)
        padded = selection.padded
        for candidate in selection.entries:
            state.provenance.annotate(
                candidate.node_id,
                {"rank": float(candidate.rank), "composite": round(candidate.composite, 6)},
            )
            finalists_rows.append(_finalist_row(state, candidate.node_id, candidate))
        if padded:
            # Shortfall: pad from the best unranked provenance nodes rather
            # than failing; padded rows are flagged.
            chosen_ids = {r.node_id for r in selection.entries}
            extras = [n for nid, n in state.provenance.nodes.items() if nid not in chosen_ids]
            extras.sort(
                key=lambda n: (n.properties.get("docking", float("inf")), n.id)
            )
            for node in extras:
                if len(finalists_rows) >= state.config.finalists_k:
                    break
                finalists_rows.append(_finalist_row(state, node.id, None))
    report = _campaign_report(state)
    return CampaignResult(
        config=state.config,
        finalists=finalists_rows,
        padded=padded,
        provenance=state.provenance,
        transcript=state.transcript,
        registry=state.registry,
        report=report,
        state=state,
    )


def _finalist_row(state: CampaignState, node_id: str, ranked) -> dict:
    node = state.provenance.nodes[node_id]
    return {
        "node_id": node_id,
        "smiles": node.canonical_smiles,
        "rank": ranked.rank if ranked else None,
        "composite": round(ranked.composite, 6) if ranked else None,
        "components": {k: round(v, 6) for k, v in ranked.components.items()} if ranked else None,
        "properties": dict(sorted(node.properties.items())),
        "parent": node.parent,
        "padded": ranked is None,
    }


def _reference_actives() -> list[str]:
    from molforge.tools.mock import MockToolBackend as _Backend

    rows = _Backend(seed=0).search_chembl_activity("AKT1")["actives"]
    return [r["smiles"] for r in rows]


def _campaign_report(state: CampaignState) -> dict:
    cohort = Cohort.from_rows(
        [(s, score, tag) for s, score, tag in state.attempts],
        reference_actives=_reference_actives(),
    )
    if not cohort.entries:
        # Pathological script with zero attempts: keep the schema, mark
        # every metric not-computable instead of failing the campaign.
        cohort.entries.append(CohortEntry(smiles="", docking=None))
        report = build_report(cohort)
        report["generation_quality"]["attempted"] = 0
        report["generation_quality"]["validity"] = None
    else:
        report = build_report(cohort)
    report["mode"] = state.config.mode
    report["seed"] = state.config.seed
    return report


def run_campaign(config: CampaignConfig, llm_backend, tool_backend=None) -> CampaignResult:
    """Exactly three cycles, then finalist selection and reporting."""
    if config.cycles != 3:
        raise CampaignError("the research loop terminates after exactly three cycles")
    state = build_state(config, llm_backend, tool_backend)
    for spec in schedule_for_mode(config.mode):
        run_cycle(state, spec)
    return finalize(state)


def run_architecture(config: CampaignConfig, llm_backend, tool_backend=None) -> CampaignResult:
    """Mode-dispatching wrapper; all modes emit identical result shapes."""
    if config.mode not in ("mas", "single-agent", "baseline"):
        raise CampaignError(f"unknown architecture mode {config.mode!r}")
    return run_campaign(config, llm_backend, tool_backend)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def write_run_directory(result: CampaignResult, run_dir: str | Path) -> Path:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "transcript.jsonl").write_text(result.transcript.to_jsonl())
    (run_dir / "provenance.json").write_text(result.provenance.export_json())
    toolcalls = "\n".join(
        json.dumps(record.to_dict(), sort_keys=True) for record in result.registry.records
    )
    (run_dir / "toolcalls.jsonl").write_text(toolcalls + ("\n" if toolcalls else ""))
    raw_dir = run_dir / "raw"
    raw_dir.mkdir(exist_ok=True)
    for ref in result.registry.payloads.refs():
        safe = ref.replace(":", "_")
        (raw_dir / f"{safe}.json").write_text(
            json.dumps(result.registry.payloads.get(ref), sort_keys=True)
        )
    (run_dir / "finalists.json").write_text(
        json.dumps(
            {
                "finalists": result.finalists,
                "padded": result.padded,
                "agent_rankings": result.state.agent_rankings,
                "k": result.config.finalists_k,
            },
            indent=1,
            sort_keys=True,
        )
    )
    (run_dir / "report.json").write_text(report_to_json(result.report))
    (run_dir / "report.txt").write_text(render_report_text(result.report))
    (run_dir / "config.json").write_text(json.dumps(result.config.to_dict(), indent=1, sort_keys=True))
    return run_dir
