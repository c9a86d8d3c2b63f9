"""CSV and JSON emission helpers shared by the CLI and the figure writers.

CSV cells use '.' decimals and 17 significant digits so every float re-parses
to the identical bit pattern. JSON output is canonical (sorted keys, two-space
indent), which makes parse -> re-emit byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

SCHEMA_VERSION = "1"


def fmt_cell(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_cell(c) for c in row])
    return buf.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows))
    return path


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def envelope(command: str, inputs: dict, results) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
    }
