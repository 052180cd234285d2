"""Writers for error tables, run series and snapshot files.

Numbers are written with ``%.6e`` so that identical runs give identical files.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence, Union

from .diagnostics import ErrorTable, RunReport
from .operators import StateField

FMT = "%.6e"
PathLike = Union[str, Path]


def number(value) -> str:
    return "" if value is None else FMT % value


def csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def table_csv(table: ErrorTable) -> str:
    """Columns ``n, delta, l1_error, ooc``; the first OOC cell is empty."""
    rows = [(str(r.n), number(r.delta), number(r.error), number(r.ooc)) for r in table.rows]
    return csv_text(("n", "delta", "l1_error", "ooc"), rows)


def series_csv(report: RunReport) -> str:
    rows = [(str(s.step), number(s.time), number(s.tv), number(s.min), number(s.max), number(s.mass))
            for s in report.series]
    return csv_text(("step", "t", "tv", "min", "max", "mass"), rows)


def gradient_csv(report: RunReport, dx: float) -> str:
    """Largest discrete gradient ``max_j |u_{j+1} - u_j| / dx`` per step."""
    rows = [(str(s.step), number(s.time), number(s.max_jump / dx)) for s in report.series]
    return csv_text(("step", "t", "max_gradient"), rows)


def snapshot_text(u: StateField) -> str:
    """Two whitespace-separated columns ``x u`` at the cell centres."""
    lines = [f"# t = {FMT % u.time}"]
    lines += [f"{FMT % x} {FMT % v}" for x, v in zip(u.grid.centers, u.values)]
    return "\n".join(lines) + "\n"


def write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
