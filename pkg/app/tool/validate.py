import asyncio
from functools import partial
from typing import Optional

from app.schema import CHANNEL_VALUES, ChannelKind, ValidationSuite
from app.tool.base import BaseTool, CLIResult, ToolFailure, ToolResult
from app.validation import run_suite


class ValidateTool(BaseTool):
    name: str = "validate"
    description: str = "Run the invariant suites and report the measured deviations."

    async def execute(self, suite: str = "all", channel: Optional[str] = None) -> ToolResult:
        try:
            selected = ValidationSuite(suite)
        except ValueError:
            return ToolFailure.usage(
                f"unknown suite '{suite}', expected one of {[s.value for s in ValidationSuite]}"
            )
        try:
            kinds = None if channel is None else [ChannelKind(channel)]
        except ValueError:
            return ToolFailure.usage(f"unknown channel '{channel}', expected one of {CHANNEL_VALUES}")

        loop = asyncio.get_running_loop()
        report = await loop.run_in_executor(None, partial(run_suite, selected, kinds))
        if report.passed:
            return CLIResult(output=str(report))

        names = ", ".join(check.name for check in report.failures())
        return ToolFailure(
            output=str(report),
            error=f"{len(report.failures())} check(s) failed: {names}",
            exit_code=1,
        )
