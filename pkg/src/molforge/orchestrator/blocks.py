"""Structured-block grammar inside agent messages.

Fenced blocks carry the machine-readable projection of a message:

    ```molecule
    id: mc-1
    smiles: CCOc1ccccc1
    parent: AI:1:3
    props: {"docking": -9.4}
    rationale: free text
    ```

    ```ranking
    MC:2:7
    AI:1:3
    ```

    ```toolcall
    {"tool": "vina_report", "args": {"smiles": ["CCO"]}}
    ```

Malformed blocks yield per-block diagnostics and are skipped; nothing
here is fatal to a turn.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from molforge.chem import ChemError, parse_smiles

_FENCE = re.compile(r"```(molecule|ranking|toolcall|directive)\n(.*?)```", re.DOTALL)


@dataclass(slots=True)
class MoleculeProposal:
    label: str
    smiles: str
    parents: list[str] = field(default_factory=list)
    rationale: str = ""
    props: dict = field(default_factory=dict)


@dataclass(slots=True)
class ToolCallRequest:
    tool: str
    args: dict


@dataclass(slots=True)
class ParsedBlocks:
    proposals: list[MoleculeProposal] = field(default_factory=list)
    rankings: list[list[str]] = field(default_factory=list)
    tool_calls: list[ToolCallRequest] = field(default_factory=list)
    directives: list[str] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def parse_structured_blocks(text: str) -> ParsedBlocks:
    out = ParsedBlocks()
    for kind, body in _FENCE.findall(text or ""):
        if kind == "molecule":
            _parse_molecule(body, out)
        elif kind == "ranking":
            ids = [line.strip() for line in body.splitlines() if line.strip()]
            if ids:
                out.rankings.append(ids)
            else:
                out.diagnostics.append("empty ranking block")
        elif kind == "toolcall":
            _parse_toolcall(body, out)
        elif kind == "directive":
            out.directives.append(body.strip())
    return out


def _parse_molecule(body: str, out: ParsedBlocks) -> None:
    fields: dict[str, str] = {}
    for line in body.splitlines():
        line = line.strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            out.diagnostics.append(f"molecule block line without key: {line!r}")
            continue
        fields[key.strip().lower()] = value.strip()
    smiles = fields.get("smiles", "")
    if not smiles:
        out.diagnostics.append("molecule block missing smiles")
        return
    try:
        parse_smiles(smiles)
    except ChemError as exc:
        out.diagnostics.append(f"molecule block has invalid smiles {smiles!r}: {exc}")
        return
    props: dict = {}
    if fields.get("props"):
        try:
            props = json.loads(fields["props"])
        except json.JSONDecodeError:
            out.diagnostics.append(f"unparseable props in molecule block: {fields['props']!r}")
    parents = [p.strip() for p in fields.get("parent", "").split(",") if p.strip()]
    out.proposals.append(
        MoleculeProposal(
            label=fields.get("id", f"m{len(out.proposals) + 1}"),
            smiles=smiles,
            parents=parents,
            rationale=fields.get("rationale", ""),
            props=props,
        )
    )


def _parse_toolcall(body: str, out: ParsedBlocks) -> None:
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        out.diagnostics.append(f"unparseable toolcall JSON: {exc}")
        return
    tool = data.get("tool")
    args = data.get("args", {})
    if not isinstance(tool, str) or not isinstance(args, dict):
        out.diagnostics.append(f"toolcall block needs string 'tool' and object 'args': {data!r}")
        return
    out.tool_calls.append(ToolCallRequest(tool=tool, args=args))
