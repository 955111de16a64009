from typing import Optional

import aiofiles

from app.config import PlotSettings
from app.exceptions import ParseError
from app.logger import logger
from app.plot import SweepTable, render_svg
from app.tool.base import BaseTool, CLIResult, ToolFailure, ToolResult


class PlotTool(BaseTool):
    name: str = "plot"
    description: str = "Render a sweep CSV as an SVG chart of log10(chi) against q."

    settings: Optional[PlotSettings] = None

    async def execute(self, source: str, out: str) -> ToolResult:
        try:
            async with aiofiles.open(source, "r", encoding="utf-8") as f:
                text = await f.read()
        except OSError as e:
            return ToolFailure.data(f"cannot read {source}: {e}")
        except UnicodeDecodeError as e:
            return ToolFailure.data(f"{source} is not UTF-8: {e}")

        try:
            table = SweepTable.from_csv(text)
        except ParseError as e:
            return ToolFailure.data(f"{source}: {e}")

        svg = render_svg(table, self.settings)
        try:
            async with aiofiles.open(out, "w", encoding="utf-8", newline="\n") as f:
                await f.write(svg)
        except OSError as e:
            return ToolFailure.data(f"cannot write {out}: {e}")

        logger.info(f"Plotted {len(table.rows)} rows of {','.join(table.columns[1:])}")
        return CLIResult(output=f"wrote {out}", artifact=out)
