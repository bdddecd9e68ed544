"""CSV tables with a commented metadata header, plus gnuplot scripts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence


def format_value(x) -> str:
    """Shortest decimal that round-trips to the same double."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


@dataclass
class Table:
    """Named numeric columns with free-form ``key = value`` metadata."""

    columns: list[str]
    rows: list[list[float]] = field(default_factory=list)
    meta: dict[str, str] = field(default_factory=dict)
    title: str = ""

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row has {len(r)} values, expected {len(self.columns)}")

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, expected {len(self.columns)}")
        self.rows.append(list(values))

    def column(self, name: str) -> list[float]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        lines = []
        if self.title:
            lines.append(f"# {self.title}")
        for k, v in self.meta.items():
            lines.append(f"# {k} = {v}")
        lines.append(",".join(self.columns))
        for r in self.rows:
            lines.append(",".join(format_value(v) for v in r))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "Table":
        title = ""
        meta: dict[str, str] = {}
        columns: list[str] | None = None
        rows: list[list[float]] = []
        for raw in text.splitlines():
            if raw.startswith("#"):
                body = raw[1:].strip()
                if " = " in body:
                    k, v = body.split(" = ", 1)
                    meta[k.strip()] = v
                elif not meta and not title:
                    title = body
                continue
            if not raw.strip():
                continue
            cells = raw.split(",")
            if columns is None:
                columns = [c.strip() for c in cells]
            else:
                rows.append([float(c) for c in cells])
        if columns is None:
            raise ValueError("no column row found")
        return cls(columns, rows, meta, title)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv())
        return path


def gnuplot_script(csv_name: str, table: Table, x: str, ys: Sequence[str], ylabel: str = "") -> str:
    """Standalone gnuplot script that renders ``ys`` against ``x`` to a PNG next to the CSV."""
    stem = csv_name.rsplit(".", 1)[0]
    xi = table.columns.index(x) + 1
    lines = [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
        f"set output '{stem}.png'",
        f"set xlabel '{x}'",
    ]
    if table.title:
        lines.append(f"set title '{table.title}'")
    if ylabel:
        lines.append(f"set ylabel '{ylabel}'")
    parts = []
    for y in ys:
        yi = table.columns.index(y) + 1
        style = "points pt 7" if y.endswith("_numeric") else "linespoints"
        parts.append(f"'{csv_name}' using {xi}:{yi} with {style} title '{y}'")
    lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"
