"""Transformation hypergraph with a total temporal order and lineage forest.

Every agent action that produces molecules is recorded as one hyperedge
connecting input molecule nodes to freshly created output nodes.  Each
node references a single parent (the first-listed input of its creating
edge), overlaying a lineage forest on the hypergraph for fast ancestry
traversal.  The store is in-memory with explicit JSON export; one writer
per campaign.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from molforge.chem import ChemError, canonicalize, parse_smiles

SCHEMA_VERSION = "provenance/1"

EDGE_KINDS = ("seed", "database-import", "modification", "ranking-annotation")


class ProvenanceError(ValueError):
    """Invalid record call or malformed provenance file."""


@dataclass(slots=True)
class MoleculeNode:
    id: str
    canonical_smiles: str
    created_by: str
    parent: str | None = None
    properties: dict[str, float] = field(default_factory=dict)
    rationale: str = ""
    revisit: bool = False


@dataclass(slots=True)
class TransformationEdge:
    id: str
    seq: int
    agent: str
    kind: str
    inputs: list[str]
    outputs: list[str]
    rationale: str = ""
    evidence: list[str] = field(default_factory=list)
    cycle: int = 0
    timestamp: float = 0.0


class ProvenanceStore:
    """Single-campaign provenance record; see :func:`record` for writes."""

    def __init__(self) -> None:
        self.nodes: dict[str, MoleculeNode] = {}
        self.edges: dict[str, TransformationEdge] = {}
        self.temporal_chain: list[str] = []
        self._node_counter = 0
        self._smiles_seen: set[str] = set()

    # ------------------------------------------------------------------
    # Writes
    # ------------------------------------------------------------------

    def record(
        self,
        agent: str,
        kind: str,
        inputs: list[str],
        output_smiles: list[str],
        rationale: str = "",
        evidence: list[str] | None = None,
        cycle: int = 0,
        properties: list[dict[str, float]] | None = None,
        agent_tag: str | None = None,
    ) -> tuple[str, list[str]]:
        """Create one hyperedge plus one node per output SMILES.

        Validates inputs exist and outputs parse before mutating anything,
        so a failed call leaves the store unchanged.  Returns the edge id
        and the new node ids.  Nodes repeating an already-seen canonical
        SMILES are flagged ``revisit`` rather than merged.
        """
        if kind not in EDGE_KINDS:
            raise ProvenanceError(f"unknown edge kind {kind!r}")
        if not output_smiles:
            raise ProvenanceError("outputs must be nonempty")
        if not inputs and kind not in ("seed", "database-import"):
            raise ProvenanceError(f"kind {kind!r} requires at least one input")
        for node_id in inputs:
            if node_id not in self.nodes:
                raise ProvenanceError(f"unknown input node {node_id!r}")
        canonical: list[str] = []
        for smiles in output_smiles:
            try:
                canonical.append(canonicalize(parse_smiles(smiles)))
            except ChemError as exc:
                raise ProvenanceError(f"invalid output SMILES {smiles!r}: {exc}") from exc
        if properties is not None and len(properties) != len(output_smiles):
            raise ProvenanceError("properties list must align with outputs")

        seq = len(self.temporal_chain) + 1
        edge_id = f"E{seq}"
        tag = agent_tag or _default_tag(agent)
        parent = inputs[0] if inputs else None
        node_ids = []
        nodes = []
        for pos, smiles in enumerate(canonical):
            self._node_counter += 1
            node_id = f"{tag}:{cycle}:{self._node_counter}"
            node = MoleculeNode(
                id=node_id,
                canonical_smiles=smiles,
                created_by=edge_id,
                parent=parent,
                properties=dict(properties[pos]) if properties else {},
                rationale=rationale,
                revisit=smiles in self._smiles_seen,
            )
            nodes.append(node)
            node_ids.append(node_id)
        edge = TransformationEdge(
            id=edge_id,
            seq=seq,
            agent=agent,
            kind=kind,
            inputs=list(inputs),
            outputs=node_ids,
            rationale=rationale,
            evidence=list(evidence or []),
            cycle=cycle,
            timestamp=float(seq),
        )
        self.edges[edge_id] = edge
        self.temporal_chain.append(edge_id)
        for node in nodes:
            self.nodes[node.id] = node
            self._smiles_seen.add(node.canonical_smiles)
        return edge_id, node_ids

    def annotate(self, node_id: str, properties: dict[str, float]) -> None:
        """Merge metric values into an existing node's property map."""
        if node_id not in self.nodes:
            raise ProvenanceError(f"unknown node {node_id!r}")
        self.nodes[node_id].properties.update(properties)

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def lineage(self, node_id: str) -> list[str]:
        """Ancestor ids nearest-first, ending at a seed/import root."""
        if node_id not in self.nodes:
            raise ProvenanceError(f"unknown node {node_id!r}")
        chain = []
        current = self.nodes[node_id].parent
        guard = 0
        while current is not None:
            chain.append(current)
            current = self.nodes[current].parent
            guard += 1
            if guard > len(self.nodes):
                raise ProvenanceError("parent chain exceeds node count (cycle?)")
        return chain

    def descendants(self, node_id: str) -> set[str]:
        """Transitive closure over hyperedges from this node's outputs side."""
        if node_id not in self.nodes:
            raise ProvenanceError(f"unknown node {node_id!r}")
        out: set[str] = set()
        frontier = [node_id]
        while frontier:
            current = frontier.pop()
            for edge in self.edges.values():
                if current in edge.inputs:
                    for child in edge.outputs:
                        if child not in out:
                            out.add(child)
                            frontier.append(child)
        return out

    def roots(self) -> list[str]:
        return [n.id for n in self.nodes.values() if n.parent is None]

    def validate(self) -> list[str]:
        """Structural violations as data; an empty list means healthy."""
        violations: list[str] = []
        seqs = sorted(e.seq for e in self.edges.values())
        if seqs != list(range(1, len(seqs) + 1)):
            violations.append(f"seq-not-gapless: {seqs}")
        chain_seqs = [self.edges[eid].seq for eid in self.temporal_chain if eid in self.edges]
        if chain_seqs != sorted(chain_seqs) or len(self.temporal_chain) != len(self.edges):
            violations.append("temporal-chain-mismatch")
        for edge in self.edges.values():
            if not edge.outputs:
                violations.append(f"empty-outputs: {edge.id}")
            if not edge.inputs and edge.kind not in ("seed", "database-import"):
                violations.append(f"inputs-empty-for-{edge.kind}: {edge.id}")
            for node_id in edge.inputs + edge.outputs:
                if node_id not in self.nodes:
                    violations.append(f"dangling-node-ref: {edge.id} -> {node_id}")
        for node in self.nodes.values():
            edge = self.edges.get(node.created_by)
            if edge is None:
                violations.append(f"missing-created-by: {node.id}")
                continue
            if node.id not in edge.outputs:
                violations.append(f"created-by-disagrees: {node.id}")
            if node.parent is not None and node.parent not in edge.inputs:
                violations.append(f"parent-not-in-edge-inputs: {node.id}")
        violations.extend(self._cycle_check())
        return violations

    def _cycle_check(self) -> list[str]:
        # Orient edges inputs -> outputs and look for a directed cycle.
        graph: dict[str, list[str]] = {}
        for edge in self.edges.values():
            for src in edge.inputs:
                graph.setdefault(src, []).extend(edge.outputs)
        color: dict[str, int] = {}

        def visit(node: str) -> bool:
            color[node] = 1
            for child in graph.get(node, []):
                state = color.get(child, 0)
                if state == 1:
                    return True
                if state == 0 and visit(child):
                    return True
            color[node] = 2
            return False

        for node_id in self.nodes:
            if color.get(node_id, 0) == 0 and visit(node_id):
                return ["cycle"]
        return []

    # ------------------------------------------------------------------
    # Persistence
    # ------------------------------------------------------------------

    def export_json(self) -> str:
        payload = {
            "schema": SCHEMA_VERSION,
            "nodes": [
                {
                    "id": n.id,
                    "canonical_smiles": n.canonical_smiles,
                    "created_by": n.created_by,
                    "parent": n.parent,
                    "properties": n.properties,
                    "rationale": n.rationale,
                    "revisit": n.revisit,
                }
                for n in self.nodes.values()
            ],
            "edges": [
                {
                    "id": e.id,
                    "seq": e.seq,
                    "agent": e.agent,
                    "kind": e.kind,
                    "inputs": e.inputs,
                    "outputs": e.outputs,
                    "rationale": e.rationale,
                    "evidence": e.evidence,
                    "cycle": e.cycle,
                    "timestamp": e.timestamp,
                }
                for e in self.edges.values()
            ],
            "temporal_chain": self.temporal_chain,
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    @classmethod
    def import_json(cls, text: str) -> "ProvenanceStore":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProvenanceError(f"malformed provenance file: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("schema") != SCHEMA_VERSION:
            raise ProvenanceError(
                f"schema mismatch: expected {SCHEMA_VERSION!r}, got {payload.get('schema')!r}"
            )
        store = cls()
        try:
            for row in payload["nodes"]:
                node = MoleculeNode(
                    id=row["id"],
                    canonical_smiles=row["canonical_smiles"],
                    created_by=row["created_by"],
                    parent=row["parent"],
                    properties=dict(row["properties"]),
                    rationale=row["rationale"],
                    revisit=row["revisit"],
                )
                store.nodes[node.id] = node
                store._smiles_seen.add(node.canonical_smiles)
            for row in payload["edges"]:
                edge = TransformationEdge(
                    id=row["id"],
                    seq=row["seq"],
                    agent=row["agent"],
                    kind=row["kind"],
                    inputs=list(row["inputs"]),
                    outputs=list(row["outputs"]),
                    rationale=row["rationale"],
                    evidence=list(row["evidence"]),
                    cycle=row["cycle"],
                    timestamp=row["timestamp"],
                )
                store.edges[edge.id] = edge
            store.temporal_chain = list(payload["temporal_chain"])
        except (KeyError, TypeError) as exc:
            raise ProvenanceError(f"malformed provenance file: missing {exc}") from exc
        store._node_counter = len(store.nodes)
        return store

    def structurally_equal(self, other: "ProvenanceStore") -> bool:
        return self.export_json() == other.export_json()


def _default_tag(agent: str) -> str:
    tags = {
        "PrincipalResearcher": "PR",
        "Database": "DB",
        "AIExpert": "AI",
        "MedicinalChemist": "MC",
        "Ranking": "RK",
        "ScientificCritic": "SC",
        "Solo": "SOLO",
    }
    if agent in tags:
        return tags[agent]
    cleaned = "".join(ch for ch in agent.upper() if ch.isalnum())
    return cleaned[:4] or "AGT"
