import asyncio
import time
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import List, Optional

import aiofiles
import numpy as np
from pydantic import ValidationError

from app.capacity import holevo_classical, holevo_switch
from app.config import SearchSettings, config
from app.exceptions import ArgumentError, CausalSwitchError
from app.experiment import load_measurements, reconstruct_capacity, visibility_band
from app.logger import logger
from app.plot import SweepTable, sweep_columns
from app.schema import MeasurementSet, SweepConfig, VisibilityModel
from app.tool.base import BaseTool, CLIResult, ToolFailure, ToolResult


_SWEEP_DESCRIPTION = """Sweep the depolarising strength q and write the Holevo capacity of the switch
next to the definite-order baseline as CSV. With a visibility the CSV gains the
chi_vis_low/chi_vis_high band; with a measurement file it gains chi_exp.
"""


class SweepTool(BaseTool):
    name: str = "sweep"
    description: str = _SWEEP_DESCRIPTION

    settings: Optional[SearchSettings] = None
    workers: Optional[int] = None

    @staticmethod
    def _row(
        q: float,
        gamma: float,
        settings: Optional[SearchSettings],
        visibility: Optional[VisibilityModel],
        measurements: Optional[MeasurementSet],
    ) -> List[float]:
        row = [q, holevo_switch(q, gamma, settings).chi, holevo_classical(q)]
        if visibility is not None:
            row.extend(visibility_band(visibility, q, gamma, settings))
        if measurements is not None:
            row.append(reconstruct_capacity(measurements, q, gamma, settings).chi)
        return row

    async def execute(
        self,
        out: str,
        q_min: Optional[float] = None,
        q_max: Optional[float] = None,
        steps: Optional[int] = None,
        gamma: Optional[float] = None,
        visibility: Optional[float] = None,
        visibility_err: Optional[float] = None,
        measurements: Optional[str] = None,
    ) -> ToolResult:
        defaults = config.sweep
        if visibility is None and visibility_err is not None:
            return ToolFailure.usage("--visibility-err needs --visibility")

        try:
            sweep = SweepConfig(
                q_min=defaults.q_min if q_min is None else q_min,
                q_max=defaults.q_max if q_max is None else q_max,
                steps=defaults.steps if steps is None else steps,
                gamma=defaults.gamma if gamma is None else gamma,
                visibility=None if visibility is None else (visibility, visibility_err or 0.0),
                measurements=measurements,
                out=out,
            )
            band = VisibilityModel(v=sweep.visibility[0], v_err=sweep.visibility[1]) if sweep.visibility else None
        except (ArgumentError, ValidationError) as e:
            return ToolFailure.usage(str(e))

        meas = None
        if sweep.measurements:
            try:
                meas = load_measurements(sweep.measurements)
            except CausalSwitchError as e:
                return ToolFailure.data(f"{sweep.measurements}: {e}")

        qs = np.linspace(sweep.q_min, sweep.q_max, sweep.steps)
        logger.info(f"Sweeping {sweep.steps} values of q in [{sweep.q_min:g}, {sweep.q_max:g}]")
        start = time.perf_counter()

        loop = asyncio.get_running_loop()
        workers = self.workers or defaults.workers
        try:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = await asyncio.gather(
                    *(
                        loop.run_in_executor(
                            pool,
                            partial(self._row, float(q), sweep.gamma, self.settings, band, meas),
                        )
                        for q in qs
                    )
                )
        except CausalSwitchError as e:
            return ToolFailure.data(str(e))

        table = SweepTable(columns=sweep_columns(band is not None, meas is not None), rows=rows)
        try:
            async with aiofiles.open(sweep.out, "w", encoding="utf-8", newline="\n") as f:
                await f.write(table.to_csv())
        except OSError as e:
            return ToolFailure.data(f"cannot write {sweep.out}: {e}")

        logger.info(f"Sweep finished in {time.perf_counter() - start:.2f}s")
        return CLIResult(output=f"wrote {len(rows)} rows to {sweep.out}", artifact=sweep.out)
