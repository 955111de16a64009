"""Collection classes for managing multiple commands."""

import inspect
import json
from typing import Union

from app.tool.base import BaseTool, ToolFailure, ToolResult


class ToolCollection:
    """A collection of defined commands."""

    def __init__(self, *tools: BaseTool):
        self.tools = tools
        self.tool_map = {tool.name: tool for tool in tools}

    def __iter__(self):
        return iter(self.tools)

    async def execute(self, name: str, tool_input: Union[str, dict] = None) -> ToolResult:
        """Execute a command by name with given input."""
        tool = self.get_tool(name)
        if not tool:
            return ToolFailure.usage(f"Unknown command '{name}'")

        tool_input = tool_input or {}
        if isinstance(tool_input, str):
            try:
                tool_input = json.loads(tool_input)
            except json.JSONDecodeError:
                return ToolFailure.usage(f"Invalid command input: {tool_input}")
        if not isinstance(tool_input, dict):
            return ToolFailure.usage(f"Command input must be an object, got {tool_input!r}")

        try:
            inspect.signature(tool.execute).bind(**tool_input)
        except TypeError as e:
            return ToolFailure.usage(f"{name}: {e}")

        return await tool(**tool_input)

    def get_tool(self, name: str) -> BaseTool:
        return self.tool_map.get(name)
