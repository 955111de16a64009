import asyncio
from typing import Optional

from app.config import SearchSettings, config
from app.exceptions import ArgumentError, CausalSwitchError, ParseError
from app.experiment import (
    BUNDLED_TABLE_PATH,
    load_measurements,
    monte_carlo_band,
    reconstruct_capacity,
)
from app.logger import logger
from app.plot import format_value
from app.schema import FORMAT_VALUES, OutputFormat
from app.tool.base import BaseTool, CLIResult, ToolFailure, ToolResult


class ReconstructTool(BaseTool):
    name: str = "reconstruct"
    description: str = "Rebuild the switch capacity from measured control coherences."

    settings: Optional[SearchSettings] = None

    async def execute(
        self,
        q: float,
        measurements: Optional[str] = None,
        gamma: float = 0.5,
        format: str = "text",
        samples: int = 0,
    ) -> ToolResult:
        try:
            fmt = OutputFormat(format)
        except ValueError:
            return ToolFailure.usage(f"unknown format '{format}', expected one of {FORMAT_VALUES}")

        source = measurements or config.experiment.measurements or BUNDLED_TABLE_PATH
        try:
            meas = load_measurements(source)
        except ParseError as e:
            return ToolFailure.data(f"{source}: {e}")

        loop = asyncio.get_running_loop()
        try:
            result = await loop.run_in_executor(
                None, reconstruct_capacity, meas, q, gamma, self.settings
            )
            band = None
            if samples:
                band = await loop.run_in_executor(
                    None,
                    lambda: monte_carlo_band(meas, q, gamma, n=samples, settings=self.settings),
                )
        except ArgumentError as e:
            return ToolFailure.usage(str(e))
        except CausalSwitchError as e:
            return ToolFailure.data(str(e))

        logger.info(f"Reconstructed chi = {result.chi:.6g} at q = {q:g} from {meas.metadata}")

        fields = {
            "q": result.q,
            "gamma": result.gamma,
            "h_control": result.h_control,
            "h_min": result.h_min,
            "chi": result.chi,
        }
        if band is not None:
            fields["chi_mc_mean"], fields["chi_mc_std"] = band

        if fmt is OutputFormat.CSV:
            output = ",".join(fields) + "\n" + ",".join(format_value(v) for v in fields.values())
        else:
            output = "\n".join(f"{name} = {format_value(v)}" for name, v in fields.items())
        return CLIResult(output=output)
