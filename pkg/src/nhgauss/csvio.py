"""Bit-stable CSV tables: 12 significant digits, ``\\n`` endings, ``#`` comment lines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

Cell = Union[float, int, str, None]


@dataclass
class Table:
    header: list[str]
    rows: list[tuple[Cell, ...]] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)
    status: int = 0

    def column(self, name: str) -> list[Cell]:
        i = self.header.index(name)
        return [row[i] for row in self.rows]


def format_cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    x = float(value)
    if math.isnan(x):
        return ""
    if x == 0:
        return "0"
    return format(x, ".12g")


def render(table: Table) -> str:
    width = len(table.header)
    lines = [",".join(table.header)]
    for row in table.rows:
        if len(row) != width:
            raise ValueError(f"row has {len(row)} cells, header has {width}")
        lines.append(",".join(format_cell(c) for c in row))
    lines.extend(f"# {c}" for c in table.comments)
    return "\n".join(lines) + "\n"


def write_csv(table: Table, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render(table))


def _parse_cell(text: str) -> Cell:
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        return text


def parse_csv(text: str) -> Table:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    comments = [ln[1:].strip() for ln in lines if ln.startswith("#")]
    data = [ln for ln in lines if not ln.startswith("#")]
    if not data:
        raise ValueError("CSV has no header")
    header = data[0].split(",")
    rows = [tuple(_parse_cell(c) for c in ln.split(",")) for ln in data[1:]]
    return Table(header, rows, comments)


def read_csv(path: Union[str, Path]) -> Table:
    return parse_csv(Path(path).read_text(encoding="utf-8"))


def rows_close(a: Sequence[Cell], b: Sequence[Cell], rel: float = 5e-12) -> bool:
    for x, y in zip(a, b):
        if isinstance(x, str) or isinstance(y, str) or x is None or y is None:
            if x != y:
                return False
        elif not math.isclose(float(x), float(y), rel_tol=rel, abs_tol=1e-300):
            return False
    return len(a) == len(b)
