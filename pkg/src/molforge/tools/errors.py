"""Tool failure taxonomy shared by mock and live backends."""

from __future__ import annotations


class ToolError(RuntimeError):
    """Tool invocation failure with a machine-readable kind."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind  # precondition | not-found | permission | backend | parse


class ToolPermissionError(ToolError):
    def __init__(self, agent: str, tool: str, cycle: int):
        super().__init__(
            "permission",
            f"agent {agent!r} may not call {tool!r} in cycle {cycle}",
        )
        self.agent = agent
        self.tool = tool
        self.cycle = cycle
