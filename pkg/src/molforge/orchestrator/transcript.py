"""Chronological transcript and the distilled cross-cycle context package."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

CONTEXT_BUDGET_BYTES = 8192
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


@dataclass(slots=True)
class Message:
    turn: int
    cycle: int
    role: str
    visibility: str  # shared | private
    text: str
    blocks: dict = field(default_factory=dict)
    tool_record_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "turn": self.turn,
            "cycle": self.cycle,
            "role": self.role,
            "visibility": self.visibility,
            "text": self.text,
            "blocks": self.blocks,
            "tool_record_ids": self.tool_record_ids,
        }


class Transcript:
    """Single chronological message log with shared/private visibility."""

    def __init__(self) -> None:
        self.messages: list[Message] = []

    def append(
        self,
        cycle: int,
        role: str,
        text: str,
        visibility: str = "shared",
        blocks: dict | None = None,
        tool_record_ids: list[str] | None = None,
    ) -> Message:
        message = Message(
            turn=len(self.messages) + 1,
            cycle=cycle,
            role=role,
            visibility=visibility,
            text=text,
            blocks=blocks or {},
            tool_record_ids=tool_record_ids or [],
        )
        self.messages.append(message)
        return message

    def shared_for_cycle(self, cycle: int) -> list[Message]:
        return [
            m for m in self.messages if m.cycle == cycle and m.visibility == "shared"
        ]

    def shared_text(self) -> str:
        return "\n".join(m.text for m in self.messages if m.visibility == "shared")

    def speaker_sequence(self, cycle: int | None = None) -> list[str]:
        return [
            m.role
            for m in self.messages
            if m.visibility == "shared" and (cycle is None or m.cycle == cycle)
        ]

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(m.to_dict(), sort_keys=True) for m in self.messages) + "\n"


def truncate_at_sentence(text: str, limit: int) -> str:
    """Longest sentence-boundary prefix within limit (hard cut as fallback)."""
    if len(text.encode()) <= limit:
        return text
    sentences = _SENTENCE_END.split(text)
    out = ""
    for sentence in sentences:
        candidate = (out + " " + sentence).strip()
        if len(candidate.encode()) > limit:
            break
        out = candidate
    if not out:
        out = text.encode()[:limit].decode(errors="ignore")
    return out


@dataclass(slots=True)
class ContextPackage:
    """The only state that crosses a cycle boundary."""

    cycle: int
    summary: str
    objectives: str
    digest: list[dict]  # top candidates: id, smiles, key properties, parent
    budget: int = CONTEXT_BUDGET_BYTES

    def serialize(self) -> str:
        return json.dumps(
            {
                "cycle": self.cycle,
                "summary": self.summary,
                "objectives": self.objectives,
                "digest": self.digest,
            },
            sort_keys=True,
        )

    def render_text(self) -> str:
        lines = [
            f"Context from cycle {self.cycle}:",
            f"Summary: {self.summary}",
            f"Objectives: {self.objectives}",
            "Candidate digest (id | smiles | docking | qed | sa | parent):",
        ]
        for row in self.digest:
            lines.append(
                f"  {row['id']} | {row['smiles']} | {row.get('docking')} | "
                f"{row.get('qed')} | {row.get('sa')} | {row.get('parent')}"
            )
        return "\n".join(lines)


def build_context_package(
    cycle: int,
    summary: str,
    objectives: str,
    digest_rows: list[dict],
    budget: int = CONTEXT_BUDGET_BYTES,
) -> ContextPackage:
    """Assemble under the byte budget: trim digest rows, then the summary."""
    rows = list(digest_rows)
    package = ContextPackage(cycle, summary, objectives, rows, budget)
    while len(package.serialize().encode()) > budget and rows:
        rows = rows[:-1]
        package = ContextPackage(cycle, summary, objectives, rows, budget)
    if len(package.serialize().encode()) > budget:
        overhead = len(package.serialize().encode()) - len(summary.encode())
        package = ContextPackage(
            cycle,
            truncate_at_sentence(summary, max(budget - overhead, 0)),
            objectives,
            rows,
            budget,
        )
    return package
