"""Deterministic agent policies: the offline stand-in for a live model.

Responses are pure functions of (campaign seed, request content): the
policy reads tool observations and the shared-history projection out of
the request text exactly as a live model would, and emits the same fenced
block grammar.  The medicinal-chemist policy is greedy: it proposes
seeded valence-safe edits of the current best candidates and keeps a
child only when its docking score strictly improves on the parent's.

Every cycle-1 message (except the closing summary, which is allowed to
cross the cycle boundary) embeds a sentinel phrase so context-isolation
tests can prove cross-cycle amnesia.
"""

from __future__ import annotations

import json
import re

from molforge.chem.mutate import draw_index, mutate
from molforge.llm import LlmRequest, LlmResponse

_RECORDED = re.compile(
    r"RECORDED id=(?P<id>\S+) smiles=(?P<smiles>\S+) docking=(?P<docking>\S+) "
    r"qed=(?P<qed>\S+) sa=(?P<sa>\S+) parent=(?P<parent>\S+)"
)
_DIGEST_ROW = re.compile(
    r"^\s{2}(?P<id>\S+) \| (?P<smiles>\S+) \| (?P<docking>\S+) \| "
    r"(?P<qed>\S+) \| (?P<sa>\S+) \| (?P<parent>\S+)$",
    re.MULTILINE,
)


def c1_sentinel(seed: int, role: str) -> str:
    return f"[c1-marker-{seed}-{role}]"


def _maybe_float(text: str):
    try:
        return float(text)
    except ValueError:
        return None


class PolicyBackend:
    """Drives all roles of any architecture mode deterministically."""

    def __init__(self, seed: int, mc_parents: int = 3, mc_children: int = 2, gen_n: int = 8, seeds_kept: int = 4):
        self.seed = seed
        self.mc_parents = mc_parents
        self.mc_children = mc_children
        self.gen_n = gen_n
        self.seeds_kept = seeds_kept

    # ------------------------------------------------------------------
    # Request parsing helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _text(request: LlmRequest) -> str:
        return "\n".join(text for _, text in request.messages)

    @staticmethod
    def _observations(request: LlmRequest) -> list[tuple[str, dict]]:
        out = []
        for _, text in request.messages:
            if not text.startswith("OBSERVATION["):
                continue
            tool, _, payload = text.partition("]: ")
            try:
                out.append((tool[len("OBSERVATION[") :], json.loads(payload)))
            except json.JSONDecodeError:
                out.append((tool[len("OBSERVATION[") :], {}))
        return out

    @staticmethod
    def _phase(request: LlmRequest) -> str:
        for _, text in request.messages:
            if "phase close" in text:
                return "close"
        return "open"

    def _pool(self, request: LlmRequest) -> list[dict]:
        """Candidate pool: context-digest rows plus rows recorded this cycle."""
        rows: dict[str, dict] = {}
        text = self._text(request)
        for m in _DIGEST_ROW.finditer(text):
            rows[m["id"]] = {
                "id": m["id"],
                "smiles": m["smiles"],
                "docking": _maybe_float(m["docking"]),
                "qed": _maybe_float(m["qed"]),
                "sa": _maybe_float(m["sa"]),
                "parent": None if m["parent"] == "None" else m["parent"],
            }
        for m in _RECORDED.finditer(text):
            rows[m["id"]] = {
                "id": m["id"],
                "smiles": m["smiles"],
                "docking": _maybe_float(m["docking"]),
                "qed": _maybe_float(m["qed"]),
                "sa": _maybe_float(m["sa"]),
                "parent": None if m["parent"] == "None" else m["parent"],
            }
        return list(rows.values())

    # ------------------------------------------------------------------

    def complete(self, request: LlmRequest) -> LlmResponse:
        role = request.agent_role
        handler = {
            "PrincipalResearcher": self._principal,
            "Database": self._database,
            "AIExpert": self._ai_expert,
            "MedicinalChemist": self._medicinal_chemist,
            "Ranking": self._ranking,
            "ScientificCritic": self._critic,
            "Solo": self._solo,
        }.get(role)
        if handler is None:
            return LlmResponse(text=f"({role} has nothing to add.)")
        return LlmResponse(text=handler(request))

    # ------------------------------------------------------------------
    # Role behaviors
    # ------------------------------------------------------------------

    def _principal(self, request: LlmRequest) -> str:
        cycle = request.cycle
        if self._phase(request) == "close":
            pool = self._pool(request)
            scored = [r for r in pool if r["docking"] is not None]
            best = min((r["docking"] for r in scored), default=None)
            best_id = None
            if best is not None:
                best_id = min(scored, key=lambda r: (r["docking"], r["id"]))["id"]
            summary = (
                f"Cycle {cycle} complete: {len(pool)} candidates in the pool; "
                + (
                    f"best docking {best:.2f} kcal/mol ({best_id})."
                    if best is not None
                    else "no docking data yet."
                )
            )
            objectives = (
                "Deepen binding of the leading chemotypes while holding QED and "
                "synthetic accessibility acceptable."
                if cycle < 3
                else "Campaign closed; compile the final report."
            )
            return f"{summary}\nNEXT-OBJECTIVES: {objectives}"
        marker = f" {c1_sentinel(self.seed, 'PR')}" if cycle == 1 else ""
        goals = {
            1: "anchor the target data, seed de novo scaffolds, and run a first optimization pass",
            2: "refine the best candidates; no new scaffolds",
            3: "final polish and closing selection",
        }[cycle]
        return f"Cycle {cycle} objectives: {goals}.{marker}"

    def _database(self, request: LlmRequest) -> str:
        obs = self._observations(request)
        done = {tool for tool, _ in obs}
        if "search_uniprot" not in done:
            return self._toolcall("search_uniprot", {"query": "AKT1"})
        meta = next(raw for tool, raw in obs if tool == "search_uniprot")
        if "get_pdb_file" not in done and "afdb_call" not in done:
            pdb = (meta.get("pdb_ids") or ["0XXX"])[0]
            return self._toolcall("get_pdb_file", {"pdb_id": pdb})
        structure_failed = any(
            tool == "error" and "structure" in json.dumps(raw) for tool, raw in obs
        )
        if structure_failed and "afdb_call" not in done:
            return self._toolcall("afdb_call", {"accession": meta.get("accession", "")})
        if "search_chembl_activity" not in done:
            return self._toolcall("search_chembl_activity", {"target": "AKT1"})
        activity = next(raw for tool, raw in obs if tool == "search_chembl_activity")
        references = activity.get("reference_profile", [])[:4]
        blocks = []
        for i, row in enumerate(references, start=1):
            blocks.append(
                "```molecule\n"
                f"id: db-{i}\n"
                f"smiles: {row['smiles']}\n"
                f"rationale: reference inhibitor, activity {row['activity']}\n"
                "```"
            )
        text = (
            f"Target context assembled: {meta.get('gene')} ({meta.get('accession')}), "
            f"{len(meta.get('sequence', ''))} residues; "
            f"{len(activity.get('actives', []))} known actives retrieved. "
            f"Importing {len(references)} reference inhibitors. "
            f"{c1_sentinel(self.seed, 'DB')}"
        )
        return text + "\n" + "\n".join(blocks)

    def _ai_expert(self, request: LlmRequest) -> str:
        obs = self._observations(request)
        workflow = next((raw for tool, raw in obs if tool == "vina_mol_gen"), None)
        if workflow is None:
            return self._toolcall(
                "vina_mol_gen",
                {"n": self.gen_n, "seed": self.seed * 13 + request.cycle},
            )
        rows = [
            r
            for r in workflow.get("candidates", [])
            if r.get("docking") is not None
        ]
        rows.sort(key=lambda r: (r["docking"], r["smiles"]))
        kept = rows[: self.seeds_kept]
        blocks = []
        for i, row in enumerate(kept, start=1):
            props = {"docking": row["docking"], "qed": row["qed"], "sa": row["sa"]}
            blocks.append(
                "```molecule\n"
                f"id: ai-{i}\n"
                f"smiles: {row['smiles']}\n"
                f"props: {json.dumps(props)}\n"
                "rationale: de novo scaffold from the sequence-conditioned generator\n"
                "```"
            )
        text = (
            f"Generated {len(workflow.get('candidates', []))} structures; "
            f"{len(rows)} survived filters and docking; seeding the {len(kept)} best. "
            f"{c1_sentinel(self.seed, 'AI')}"
        )
        return text + "\n" + "\n".join(blocks)

    def _medicinal_chemist(self, request: LlmRequest) -> str:
        return self._optimize(request, role_tag="MC")

    def _planned_edits(self, cycle: int, parents: list[dict]) -> list[tuple[str, dict]]:
        """Deterministic (child SMILES, parent row) plan for this cycle."""
        plan: list[tuple[str, dict]] = []
        seen: set[str] = set()
        parent_smiles = {p["smiles"] for p in parents}
        for parent in parents:
            for k in range(self.mc_children):
                child = mutate(
                    parent["smiles"],
                    seed=draw_index(1 << 30, "mc", self.seed, cycle, parent["id"], k),
                    round_index=k,
                )
                if child not in parent_smiles and child not in seen:
                    seen.add(child)
                    plan.append((child, parent))
        return plan

    def _optimize(self, request: LlmRequest, role_tag: str) -> str:
        cycle = request.cycle
        obs = self._observations(request)
        report = next((raw for tool, raw in obs if tool == "vina_report"), None)
        pool = [r for r in self._pool(request) if r["docking"] is not None]
        if not pool:
            marker = f" {c1_sentinel(self.seed, role_tag)}" if cycle == 1 else ""
            return f"No scored candidates are visible yet; standing by.{marker}"
        pool.sort(key=lambda r: (r["docking"], r["id"]))
        parents = pool[: self.mc_parents]
        plan = self._planned_edits(cycle, parents)
        if report is None:
            if not plan:
                marker = f" {c1_sentinel(self.seed, role_tag)}" if cycle == 1 else ""
                return f"No viable edits were found for the current leaders.{marker}"
            all_smiles = [p["smiles"] for p in parents] + [child for child, _ in plan]
            return self._toolcall("vina_report", {"smiles": all_smiles})
        scored = {
            r["smiles"]: r
            for r in report.get("candidates", [])
            if r.get("docking") is not None
        }
        accepted = []
        for child, parent in plan:
            row = scored.get(child)
            if row is None:
                continue
            parent_row = scored.get(parent["smiles"])
            parent_score = parent_row["docking"] if parent_row else parent["docking"]
            if row["docking"] < parent_score:
                accepted.append((child, row, parent["id"]))
        accepted.sort(key=lambda item: (item[1]["docking"], item[0]))
        blocks = []
        for i, (smiles, row, parent_id) in enumerate(accepted, start=1):
            props = {"docking": row["docking"], "qed": row["qed"], "sa": row["sa"]}
            blocks.append(
                "```molecule\n"
                f"id: {role_tag.lower()}-{cycle}-{i}\n"
                f"smiles: {smiles}\n"
                f"parent: {parent_id}\n"
                f"props: {json.dumps(props)}\n"
                "rationale: docking-improving edit accepted by the greedy policy\n"
                "```"
            )
        marker = f" {c1_sentinel(self.seed, role_tag)}" if cycle == 1 else ""
        if not blocks:
            return f"Evaluated {len(scored)} structures; no edit beat its parent, keeping the pool.{marker}"
        text = (
            f"Evaluated {len(scored)} structures; accepted {len(blocks)} "
            f"improving modifications.{marker}"
        )
        return text + "\n" + "\n".join(blocks)

    def _ranking(self, request: LlmRequest) -> str:
        obs = self._observations(request)
        ranking = next((raw for tool, raw in obs if tool == "rank_candidates"), None)
        if ranking is None:
            pool = [r for r in self._pool(request) if r["docking"] is not None]
            if not pool:
                marker = f" {c1_sentinel(self.seed, 'RK')}" if request.cycle == 1 else ""
                return f"Nothing to rank yet.{marker}"
            candidates = [
                {"id": r["id"], "docking": r["docking"], "qed": r["qed"], "sa": r["sa"]}
                for r in sorted(pool, key=lambda r: r["id"])
            ]
            return self._toolcall("rank_candidates", {"candidates": candidates})
        order = [row["id"] for row in ranking.get("ranking", [])]
        marker = f" {c1_sentinel(self.seed, 'RK')}" if request.cycle == 1 else ""
        return (
            f"Desirability ranking over {len(order)} candidates computed.{marker}\n"
            "```ranking\n" + "\n".join(order) + "\n```"
        )

    def _critic(self, request: LlmRequest) -> str:
        marker = f" {c1_sentinel(self.seed, 'SC')}" if request.cycle == 1 else ""
        return (
            "Review: tool evidence accompanies every accepted structure, lineage "
            "links are present, and no claim exceeds the docking data. No "
            f"blocking issues this cycle.{marker}"
        )

    def _solo(self, request: LlmRequest) -> str:
        if self._phase(request) == "close":
            return self._principal(request)
        cycle = request.cycle
        text = self._text(request)
        baseline = "tools available: none" in text
        if baseline:
            return self._solo_baseline(request)
        obs = self._observations(request)
        done = {tool for tool, _ in obs}
        if cycle == 1:
            if "search_uniprot" not in done:
                return self._toolcall("search_uniprot", {"query": "AKT1"})
            meta = next(raw for tool, raw in obs if tool == "search_uniprot")
            if "get_pdb_file" not in done and "afdb_call" not in done:
                pdb = (meta.get("pdb_ids") or ["0XXX"])[0]
                return self._toolcall("get_pdb_file", {"pdb_id": pdb})
            if "search_chembl_activity" not in done:
                return self._toolcall("search_chembl_activity", {"target": "AKT1"})
            if "vina_mol_gen" not in done:
                return self._toolcall(
                    "vina_mol_gen", {"n": self.gen_n, "seed": self.seed * 13 + cycle}
                )
            workflow = next(raw for tool, raw in obs if tool == "vina_mol_gen")
            rows = [r for r in workflow.get("candidates", []) if r.get("docking") is not None]
            rows.sort(key=lambda r: (r["docking"], r["smiles"]))
            blocks = []
            for i, row in enumerate(rows[: self.seeds_kept], start=1):
                props = {"docking": row["docking"], "qed": row["qed"], "sa": row["sa"]}
                blocks.append(
                    "```molecule\n"
                    f"id: solo-{i}\n"
                    f"smiles: {row['smiles']}\n"
                    f"props: {json.dumps(props)}\n"
                    "rationale: de novo scaffold retained after generation and docking\n"
                    "```"
                )
            marker = f" {c1_sentinel(self.seed, 'SOLO')}"
            return (
                f"Target anchored and {len(rows)} candidates generated; keeping "
                f"{min(self.seeds_kept, len(rows))}.{marker}\n" + "\n".join(blocks)
            )
        return self._optimize(request, role_tag="SOLO")

    def _solo_baseline(self, request: LlmRequest) -> str:
        """Prompt-only proposals drawn from internal knowledge (no tools)."""
        from molforge.tools.mock import generation_scaffolds

        cycle = request.cycle
        scaffolds = generation_scaffolds()
        blocks = []
        seen = set()
        for i in range(self.seeds_kept):
            scaffold = scaffolds[
                draw_index(len(scaffolds), "baseline", self.seed, cycle, i)
            ]
            candidate = mutate(scaffold, seed=self.seed * 101 + cycle * 17 + i)
            if candidate in seen:
                continue
            seen.add(candidate)
            blocks.append(
                "```molecule\n"
                f"id: base-{cycle}-{i + 1}\n"
                f"smiles: {candidate}\n"
                "rationale: proposed from internal knowledge without tool feedback\n"
                "```"
            )
        marker = f" {c1_sentinel(self.seed, 'SOLO')}" if cycle == 1 else ""
        return f"Proposing {len(blocks)} candidates from prior knowledge.{marker}\n" + "\n".join(blocks)

    # ------------------------------------------------------------------

    @staticmethod
    def _toolcall(tool: str, args: dict) -> str:
        payload = json.dumps({"tool": tool, "args": args}, sort_keys=True)
        return f"Requesting {tool}.\n```toolcall\n{payload}\n```"
