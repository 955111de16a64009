"""Sweep tables and their SVG rendering.

The SVG is built as plain text so it carries no external assets: log10(chi)
against q, one polyline per column, a shaded band between the visibility
columns and dots on the measured values.
"""

import csv
import io
import math
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, Field, model_validator

from app.config import PlotSettings, config
from app.exceptions import ParseError


BASE_COLUMNS = ["q", "chi_switch", "chi_classical"]
BAND_COLUMNS = ["chi_vis_low", "chi_vis_high"]
EXP_COLUMN = "chi_exp"

COLORS = {
    "chi_switch": "#1f77b4",
    "chi_classical": "#2ca02c",
    "chi_vis_low": "#ff7f0e",
    "chi_vis_high": "#ff7f0e",
    "chi_exp": "#d62728",
}
LABELS = {
    "chi_switch": "switch (ideal)",
    "chi_classical": "definite order",
    "chi_vis_low": "visibility band",
    "chi_vis_high": None,
    "chi_exp": "measured",
}


def format_value(x: float) -> str:
    """12 significant digits, scientific notation."""
    return f"{x:.11e}"


def sweep_columns(band: bool, measured: bool) -> List[str]:
    columns = list(BASE_COLUMNS)
    if band:
        columns += BAND_COLUMNS
    if measured:
        columns.append(EXP_COLUMN)
    return columns


class SweepTable(BaseModel):
    """Rows of a capacity sweep, ascending in q"""

    columns: List[str]
    rows: List[List[float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_table(self):
        allowed = (
            sweep_columns(False, False),
            sweep_columns(True, False),
            sweep_columns(False, True),
            sweep_columns(True, True),
        )
        if self.columns not in allowed:
            raise ParseError(f"unexpected columns {','.join(self.columns)}", row=1)
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ParseError(f"expected {len(self.columns)} values, got {len(row)}")
        return self

    @property
    def has_band(self) -> bool:
        return BAND_COLUMNS[0] in self.columns

    def column(self, name: str) -> List[float]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines.extend(",".join(format_value(x) for x in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ParseError("empty sweep file", row=1)
        columns = [cell.strip() for cell in rows[0]]

        values = []
        previous_q = -math.inf
        for line_number, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise ParseError(
                    f"expected {len(columns)} values, got {len(row)}", row=line_number
                )
            try:
                parsed = [float(cell) for cell in row]
            except ValueError:
                raise ParseError(f"malformed values {row}", row=line_number)
            if not all(math.isfinite(x) for x in parsed):
                raise ParseError("non-finite value", row=line_number)
            if parsed[0] <= previous_q:
                raise ParseError("q must be strictly ascending", row=line_number)
            previous_q = parsed[0]
            values.append(parsed)

        if len(values) < 2:
            raise ParseError("a sweep needs at least two rows")
        return cls(columns=columns, rows=values)


class _Frame:
    """Pixel mapping of the plot area."""

    left, right_margin, top, bottom_margin = 90, 200, 50, 70

    def __init__(self, settings: PlotSettings, x_range, y_range):
        self.width, self.height = settings.width, settings.height
        self.right = self.width - self.right_margin
        self.bottom = self.height - self.bottom_margin
        self.x_min, self.x_max = x_range
        self.y_min, self.y_max = y_range

    def x(self, q: float) -> float:
        span = self.x_max - self.x_min
        return self.left + (q - self.x_min) / span * (self.right - self.left)

    def y(self, value: float) -> float:
        span = self.y_max - self.y_min
        return self.bottom - (value - self.y_min) / span * (self.bottom - self.top)


def _points(frame: _Frame, qs: Sequence[float], ys: Sequence[float]) -> str:
    return " ".join(f"{frame.x(q):.2f},{frame.y(y):.2f}" for q, y in zip(qs, ys))


def log_chi(values: Sequence[float], floor: float) -> List[float]:
    return [math.log10(max(v, floor)) for v in values]


def render_svg(table: SweepTable, settings: Optional[PlotSettings] = None) -> str:
    settings = settings or config.plot
    qs = table.column("q")
    curves: Dict[str, List[float]] = {
        name: log_chi(table.column(name), settings.floor) for name in table.columns[1:]
    }

    all_y = [y for ys in curves.values() for y in ys]
    y_min = math.floor(min(all_y))
    y_max = max(math.ceil(max(all_y)), y_min + 1)
    frame = _Frame(settings, (qs[0], qs[-1]), (y_min, y_max))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{frame.width}" '
        f'height="{frame.height}" viewBox="0 0 {frame.width} {frame.height}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
    ]

    step = max(1, (y_max - y_min) // 8)
    for decade in range(y_min, y_max + 1, step):
        y = frame.y(decade)
        lines.append(
            f'<line x1="{frame.left}" y1="{y:.2f}" x2="{frame.right}" y2="{y:.2f}" '
            f'stroke="#d9d9d9" stroke-width="1"/>'
        )
        lines.append(
            f'<text x="{frame.left - 10}" y="{y + 5:.2f}" text-anchor="end" '
            f'font-size="13" font-family="Arial">1e{decade}</text>'
        )
    for k in range(6):
        q = frame.x_min + k * (frame.x_max - frame.x_min) / 5
        x = frame.x(q)
        lines.append(
            f'<line x1="{x:.2f}" y1="{frame.bottom}" x2="{x:.2f}" y2="{frame.bottom + 6}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        lines.append(
            f'<text x="{x:.2f}" y="{frame.bottom + 24}" text-anchor="middle" '
            f'font-size="13" font-family="Arial">{q:.2f}</text>'
        )
    lines.append(
        f'<line x1="{frame.left}" y1="{frame.bottom}" x2="{frame.right}" y2="{frame.bottom}" '
        f'stroke="#000000" stroke-width="2"/>'
    )
    lines.append(
        f'<line x1="{frame.left}" y1="{frame.top}" x2="{frame.left}" y2="{frame.bottom}" '
        f'stroke="#000000" stroke-width="2"/>'
    )

    if table.has_band:
        low, high = curves["chi_vis_low"], curves["chi_vis_high"]
        outline = _points(frame, qs, low) + " " + _points(frame, qs[::-1], high[::-1])
        lines.append(
            f'<polygon class="band" points="{outline}" fill="#ff7f0e" '
            f'fill-opacity="0.25" stroke="none"/>'
        )

    for name, ys in curves.items():
        color = COLORS[name]
        width = 1 if name in BAND_COLUMNS else 2
        lines.append(
            f'<polyline data-series="{name}" fill="none" stroke="{color}" '
            f'stroke-width="{width}" points="{_points(frame, qs, ys)}"/>'
        )
    if EXP_COLUMN in curves:
        for q, y in zip(qs, curves[EXP_COLUMN]):
            lines.append(
                f'<circle cx="{frame.x(q):.2f}" cy="{frame.y(y):.2f}" r="3" fill="{COLORS[EXP_COLUMN]}"/>'
            )

    legend_x = frame.right + 20
    entries = [(name, LABELS[name]) for name in curves if LABELS[name]]
    for k, (name, label) in enumerate(entries):
        ly = frame.top + 20 + 26 * k
        lines.append(
            f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 26}" y2="{ly}" '
            f'stroke="{COLORS[name]}" stroke-width="3"/>'
        )
        lines.append(
            f'<text x="{legend_x + 34}" y="{ly + 5}" font-size="14" '
            f'font-family="Arial">{label}</text>'
        )

    mid_y = (frame.top + frame.bottom) / 2
    lines.append(
        f'<text x="{(frame.left + frame.right) / 2:.1f}" y="{frame.height - 20}" '
        f'text-anchor="middle" font-size="16" font-family="Arial">q</text>'
    )
    lines.append(
        f'<text x="28" y="{mid_y:.1f}" text-anchor="middle" font-size="16" '
        f'font-family="Arial" transform="rotate(-90 28 {mid_y:.1f})">chi (bits, log scale)</text>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
