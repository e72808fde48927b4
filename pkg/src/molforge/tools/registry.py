"""Tool registry: contracts, per-cycle permission gating, call records.

The registry is immutable after construction.  Every successful or failed
call produces exactly one :class:`ToolCallRecord` (workflows additionally
record one child per step); the raw payload goes to the payload store and
only the bounded summary is ever surfaced to shared context.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from molforge.ranking import DesirabilityWeights, desirability_rank
from molforge.tools import workflows
from molforge.tools.errors import ToolError, ToolPermissionError
from molforge.tools.records import (
    PayloadStore,
    ToolCallRecord,
    clip_summary,
    input_digest,
)

ALL_CYCLES = frozenset({1, 2, 3})
CYCLE_ONE = frozenset({1})

# The five headline tools of the pipeline: three single-call data tools
# plus the two composite workflows.
HEADLINE_TOOLS = (
    "search_uniprot",
    "get_pdb_file",
    "search_chembl_activity",
    "vina_mol_gen",
    "vina_report",
)

DATABASE_TOOLS = ("search_uniprot", "get_pdb_file", "afdb_call", "search_chembl_activity")
GENERATION_TOOLS = ("generate_molecules", "vina_mol_gen")
EVALUATION_TOOLS = ("run_docking", "get_interaction_report", "vina_report")
RANKING_TOOLS = ("rank_candidates",)

ALL_TOOLS = DATABASE_TOOLS + GENERATION_TOOLS + EVALUATION_TOOLS + RANKING_TOOLS


def mas_permission_matrix() -> dict[str, dict[str, frozenset[int]]]:
    """(role -> tool -> allowed cycles) for the full multi-agent schedule."""
    return {
        "PrincipalResearcher": {},
        "Database": {tool: CYCLE_ONE for tool in DATABASE_TOOLS},
        "AIExpert": {tool: CYCLE_ONE for tool in GENERATION_TOOLS},
        "MedicinalChemist": {tool: ALL_CYCLES for tool in EVALUATION_TOOLS},
        "Ranking": {tool: ALL_CYCLES for tool in RANKING_TOOLS},
        "ScientificCritic": {},
    }


def single_agent_permission_matrix() -> dict[str, dict[str, frozenset[int]]]:
    """One solo agent with the five headline tools (plus the archive fallback)."""
    tools = dict.fromkeys(HEADLINE_TOOLS + ("afdb_call", "rank_candidates"), ALL_CYCLES)
    return {"Solo": tools}


def baseline_permission_matrix() -> dict[str, dict[str, frozenset[int]]]:
    return {"Solo": {}}


@dataclass(slots=True)
class ToolContract:
    name: str
    input_fields: tuple[str, ...]
    output_fields: tuple[str, ...]
    summarizer: Callable[[dict], str]


def _summarize_uniprot(raw: dict) -> str:
    return (
        f"target {raw['gene']} ({raw['accession']}): {raw['protein_name']}, "
        f"{len(raw['sequence'])} residues; structures: {', '.join(raw['pdb_ids']) or 'none'}"
    )


def _summarize_structure(raw: dict) -> str:
    kind = "predicted model" if raw.get("predicted") else "experimental structure"
    name = raw.get("pdb_id") or raw.get("accession")
    return f"{kind} {name} available as {raw['structure_ref']} ({raw['size_bytes']} bytes)"


def _summarize_activity(raw: dict) -> str:
    actives = raw["actives"]
    ref = raw["reference_profile"]
    best = min((r["docking"] for r in ref), default=None)
    best_text = f"; best reference docking {best:.2f} kcal/mol" if best is not None else ""
    return (
        f"{raw['target']} bioactivity: {len(actives)} actives, "
        f"{len(raw['inactives'])} inactives; docked top {len(ref)} references{best_text}"
    )


def _summarize_generation(raw: dict) -> str:
    return f"generated {len(raw['smiles'])} candidate structures from the target sequence"


def _summarize_docking(raw: dict) -> str:
    scores = [r["score"] for r in raw["results"]]
    if not scores:
        return "docked 0 ligands"
    mean = sum(scores) / len(scores)
    return (
        f"docked {len(scores)} ligands; best {min(scores):.2f} kcal/mol; "
        f"mean {mean:.2f} kcal/mol"
    )


def _summarize_interactions(raw: dict) -> str:
    kinds: dict[str, int] = {}
    for row in raw["interactions"]:
        kinds[row["type"]] = kinds.get(row["type"], 0) + 1
    parts = ", ".join(f"{v} {k}" for k, v in sorted(kinds.items())) or "none"
    return f"binding-mode contacts: {parts}"


def _summarize_workflow(raw: dict) -> str:
    rows = raw["candidates"]
    scored = [r["docking"] for r in rows if r.get("docking") is not None]
    best = f"; best {min(scored):.2f} kcal/mol" if scored else ""
    errors = raw.get("item_errors", [])
    err = f"; {len(errors)} item errors" if errors else ""
    return f"evaluated {len(rows)} candidates{best}{err}"


def _summarize_ranking(raw: dict) -> str:
    order = [r["id"] for r in raw["ranking"][:5]]
    return f"ranked {len(raw['ranking'])} candidates; top: {', '.join(order)}"


CONTRACTS: dict[str, ToolContract] = {
    "search_uniprot": ToolContract(
        "search_uniprot", ("query",), ("accession", "sequence", "pdb_ids"), _summarize_uniprot
    ),
    "get_pdb_file": ToolContract(
        "get_pdb_file", ("pdb_id",), ("structure_ref", "predicted"), _summarize_structure
    ),
    "afdb_call": ToolContract(
        "afdb_call", ("accession",), ("structure_ref", "predicted"), _summarize_structure
    ),
    "search_chembl_activity": ToolContract(
        "search_chembl_activity",
        ("target",),
        ("actives", "inactives", "reference_profile"),
        _summarize_activity,
    ),
    "generate_molecules": ToolContract(
        "generate_molecules", ("sequence", "n", "seed"), ("smiles",), _summarize_generation
    ),
    "run_docking": ToolContract(
        "run_docking", ("structure_ref", "ligands", "box", "seed"), ("results",), _summarize_docking
    ),
    "get_interaction_report": ToolContract(
        "get_interaction_report",
        ("structure_ref", "pose_ref", "smiles"),
        ("interactions",),
        _summarize_interactions,
    ),
    "vina_mol_gen": ToolContract(
        "vina_mol_gen", ("n", "filters", "seed"), ("candidates",), _summarize_workflow
    ),
    "vina_report": ToolContract(
        "vina_report", ("smiles",), ("candidates", "item_errors"), _summarize_workflow
    ),
    "rank_candidates": ToolContract(
        "rank_candidates", ("candidates", "weights"), ("ranking",), _summarize_ranking
    ),
}


class ToolRegistry:
    """Gates, dispatches and records tool calls for one campaign."""

    def __init__(
        self,
        backend,
        matrix: dict[str, dict[str, frozenset[int]]] | None = None,
        payload_store: PayloadStore | None = None,
        target_provider: Callable[[], object] | None = None,
    ):
        self.backend = backend
        self.matrix = matrix if matrix is not None else mas_permission_matrix()
        self.payloads = payload_store or PayloadStore()
        self.records: list[ToolCallRecord] = []
        self._call_counter = 0
        self._target_provider = target_provider

    # ------------------------------------------------------------------

    def exposed_tools(self, agent: str) -> set[str]:
        return set(self.matrix.get(agent, {}))

    def allowed(self, agent: str, tool: str, cycle: int) -> bool:
        return cycle in self.matrix.get(agent, {}).get(tool, frozenset())

    def _next_call_id(self) -> str:
        self._call_counter += 1
        return f"call:{self._call_counter}"

    def _record(
        self,
        agent: str,
        tool: str,
        cycle: int,
        args: dict,
        raw: dict,
        status: str,
        parent: str | None = None,
    ) -> ToolCallRecord:
        contract = CONTRACTS[tool]
        summary = contract.summarizer(raw) if status == "ok" else raw.get("error", "failed")
        record = ToolCallRecord(
            call_id=self._next_call_id(),
            agent=agent,
            tool=tool,
            input_digest=input_digest(args),
            raw_output_ref=self.payloads.put(raw),
            summary=clip_summary(summary),
            status=status,
            cycle=cycle,
            parent_call=parent,
        )
        self.records.append(record)
        return record

    def call(
        self, agent: str, tool: str, cycle: int, args: dict
    ) -> tuple[ToolCallRecord, dict]:
        """Permission-checked dispatch; returns (record, raw payload).

        Permission violations raise before anything is recorded so negative
        gating tests can assert no record exists.
        """
        if tool not in CONTRACTS:
            raise ToolError("precondition", f"unknown tool {tool!r}")
        if not self.allowed(agent, tool, cycle):
            raise ToolPermissionError(agent, tool, cycle)
        try:
            raw, children = self._dispatch(tool, args)
        except ToolError as exc:
            self._record(agent, tool, cycle, args, {"error": str(exc)}, "error")
            raise
        record = self._record(agent, tool, cycle, args, raw, "ok")
        for child_tool, child_args, child_raw in children:
            self._record(agent, child_tool, cycle, child_args, child_raw, "ok", parent=record.call_id)
        return record, raw

    # ------------------------------------------------------------------

    def _target(self):
        if self._target_provider is None:
            raise ToolError("precondition", "no target context configured")
        target = self._target_provider()
        if target is None:
            raise ToolError("precondition", "target context not assembled yet")
        return target

    def _dispatch(self, tool: str, args: dict) -> tuple[dict, list]:
        backend = self.backend
        children: list = []
        if tool == "search_uniprot":
            return backend.search_uniprot(args.get("query", "")), children
        if tool == "get_pdb_file":
            return backend.get_pdb_file(args.get("pdb_id", "")), children
        if tool == "afdb_call":
            return backend.afdb_call(args.get("accession", "")), children
        if tool == "search_chembl_activity":
            return backend.search_chembl_activity(args.get("target", "")), children
        if tool == "generate_molecules":
            smiles = backend.generate_molecules(
                args.get("sequence") or self._target().protein_sequence,
                int(args.get("n", 10)),
                args.get("seed"),
            )
            return {"sentinel": "", "smiles": smiles}, children
        if tool == "run_docking":
            return (
                backend.run_docking(
                    args.get("structure_ref") or self._target().structure_ref,
                    args.get("ligands", []),
                    args.get("box"),
                    args.get("seed"),
                ),
                children,
            )
        if tool == "get_interaction_report":
            return (
                backend.get_interaction_report(
                    args.get("structure_ref") or self._target().structure_ref,
                    args.get("pose_ref", ""),
                    args.get("smiles", ""),
                ),
                children,
            )
        if tool == "vina_mol_gen":
            return workflows.vina_mol_gen(
                backend,
                self._target(),
                n=int(args.get("n", 10)),
                filters=args.get("filters"),
                seed=args.get("seed"),
            )
        if tool == "vina_report":
            return workflows.vina_report(
                backend, self._target(), args.get("smiles", []), seed=args.get("seed")
            )
        if tool == "rank_candidates":
            weights = args.get("weights")
            ranked, diagnostics = desirability_rank(
                args.get("candidates", []),
                DesirabilityWeights(**weights) if weights else None,
            )
            return (
                {
                    "sentinel": "",
                    "ranking": [
                        {
                            "id": r.node_id,
                            "rank": r.rank,
                            "composite": round(r.composite, 6),
                            "components": {k: round(v, 6) for k, v in r.components.items()},
                        }
                        for r in ranked
                    ],
                    "diagnostics": diagnostics,
                },
                children,
            )
        raise ToolError("precondition", f"unknown tool {tool!r}")
