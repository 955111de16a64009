from abc import ABC, abstractmethod
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field


class BaseTool(ABC, BaseModel):
    name: str
    description: str

    model_config = ConfigDict(arbitrary_types_allowed=True)

    async def __call__(self, **kwargs) -> "ToolResult":
        """Run the command with the given parameters."""
        return await self.execute(**kwargs)

    @abstractmethod
    async def execute(self, **kwargs) -> "ToolResult":
        """Run the command with the given parameters."""


class ToolResult(BaseModel):
    """Represents the result of a command."""

    output: Any = Field(default=None)
    error: Optional[str] = Field(default=None)
    exit_code: int = Field(default=0, description="Process exit status")
    artifact: Optional[str] = Field(default=None, description="Path of a written file")

    model_config = ConfigDict(arbitrary_types_allowed=True)

    def __bool__(self):
        return self.exit_code == 0 and self.error is None

    def __str__(self):
        return f"Error: {self.error}" if self.error else str(self.output or "")


class CLIResult(ToolResult):
    """A ToolResult whose output is printed to standard output."""


class ToolFailure(ToolResult):
    """A ToolResult that represents a failure."""

    exit_code: int = Field(default=1, description="Process exit status")

    @classmethod
    def usage(cls, message: str) -> "ToolFailure":
        return cls(error=message, exit_code=2)

    @classmethod
    def data(cls, message: str) -> "ToolFailure":
        return cls(error=message, exit_code=1)
