from app.tool.base import BaseTool, CLIResult, ToolFailure, ToolResult
from app.tool.plot import PlotTool
from app.tool.reconstruct import ReconstructTool
from app.tool.sweep import SweepTool
from app.tool.tool_collection import ToolCollection
from app.tool.validate import ValidateTool


def default_commands() -> ToolCollection:
    return ToolCollection(SweepTool(), ReconstructTool(), ValidateTool(), PlotTool())


__all__ = [
    "BaseTool",
    "CLIResult",
    "PlotTool",
    "ReconstructTool",
    "SweepTool",
    "ToolCollection",
    "ToolFailure",
    "ToolResult",
    "ValidateTool",
    "default_commands",
]
