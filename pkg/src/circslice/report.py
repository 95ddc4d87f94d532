"""Report rows and their table / CSV / JSON renderings.

CSV columns are fixed: label, command, n, d, value, std_error, samples,
seed, verdict.  Numbers are printed with 12 significant digits so that
output files are byte-stable for a fixed seed.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
import io
import json
import math

import numpy as np

CSV_COLUMNS = ("label", "command", "n", "d", "value", "std_error", "samples", "seed", "verdict")
FORMATS = ("table", "csv", "json")


@dataclass
class Row:
    label: str
    command: str
    n: int
    d: int
    value: float
    std_error: float
    samples: int
    seed: int | None
    verdict: str


@dataclass
class Report:
    command: str
    rows: list[Row] = field(default_factory=list)
    details: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    ok: bool = True


def fmt_num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return fmt_num(x)
        return float(f"{x:.12g}")
    return x


def _csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow([r.label, r.command, r.n, r.d, fmt_num(r.value), fmt_num(r.std_error), r.samples,
                    "" if r.seed is None else r.seed, r.verdict])
    return buf.getvalue()


def _table(report: Report) -> str:
    header = list(CSV_COLUMNS)
    body = [
        [r.label, r.command, str(r.n), str(r.d), fmt_num(r.value), fmt_num(r.std_error), str(r.samples),
         "" if r.seed is None else str(r.seed), r.verdict]
        for r in report.rows
    ]
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in body]
    lines += [f"note: {n}" for n in report.notes]
    return "\n".join(lines) + "\n"


def emit_report(report: Report, format: str = "table") -> bytes:
    if format == "csv":
        text = _csv(report)
    elif format == "json":
        doc = {
            "command": report.command,
            "ok": report.ok,
            "rows": [asdict(r) for r in report.rows],
            "details": report.details,
            "notes": report.notes,
        }
        text = json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    elif format == "table":
        text = _table(report)
    else:
        raise ValueError(f"unknown format {format!r}; choose from {FORMATS}")
    return text.encode("utf-8")
