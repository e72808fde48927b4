"""Tool-call records with raw-payload isolation.

Raw tool output lives only behind ``raw_output_ref`` in a payload store;
the shared transcript only ever sees the bounded ``summary``.  Every mock
backend plants :data:`RAW_SENTINEL` inside its raw payload so leak tests
can grep shared surfaces for it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

RAW_SENTINEL = "RAW-PAYLOAD-SENTINEL-7f3d"
SUMMARY_CAP = 500


@dataclass(slots=True)
class ToolCallRecord:
    call_id: str
    agent: str
    tool: str
    input_digest: str
    raw_output_ref: str
    summary: str
    status: str = "ok"
    duration: float = 0.0
    cycle: int = 0
    parent_call: str | None = None

    def to_dict(self) -> dict:
        return {
            "call_id": self.call_id,
            "agent": self.agent,
            "tool": self.tool,
            "input_digest": self.input_digest,
            "raw_output_ref": self.raw_output_ref,
            "summary": self.summary,
            "status": self.status,
            "duration": self.duration,
            "cycle": self.cycle,
            "parent_call": self.parent_call,
        }


class PayloadStore:
    """In-memory raw payload storage addressed by opaque refs."""

    def __init__(self) -> None:
        self._payloads: dict[str, dict] = {}
        self._counter = 0

    def put(self, payload: dict) -> str:
        self._counter += 1
        ref = f"raw:{self._counter}"
        self._payloads[ref] = payload
        return ref

    def get(self, ref: str) -> dict:
        return self._payloads[ref]

    def refs(self) -> list[str]:
        return list(self._payloads)


def input_digest(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def clip_summary(text: str, cap: int = SUMMARY_CAP) -> str:
    if len(text) <= cap:
        return text
    return text[: cap - 3] + "..."
