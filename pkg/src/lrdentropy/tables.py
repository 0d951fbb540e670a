"""CSV/JSON tables with a config echo, exact float formatting and marker cells.

CSV layout: ``# key: <json>`` comment lines (``config`` first, then the
library ``version`` and any extra metadata), one header row, data rows.
Floats use 17 significant digits so they re-read bit-exactly. Divergent
quantities are the literal ``divergent``; failed cells are ``failed: <msg>``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from typing import Any

__all__ = [
    "DIVERGENT",
    "Failure",
    "Table",
    "format_cell",
    "parse_cell",
    "to_csv",
    "from_csv",
    "to_json",
    "from_json",
]

FAILED_PREFIX = "failed: "


class _Divergent:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIVERGENT"

    def __reduce__(self):
        return (_Divergent, ())


DIVERGENT = _Divergent()


@dataclass(frozen=True)
class Failure:
    message: str


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)  # config, version, summary, ...

    def __post_init__(self):
        for row in self.rows:
            self._check(row)

    def _check(self, row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, expected {len(self.columns)}")

    def append(self, row):
        row = list(row)
        self._check(row)
        self.rows.append(row)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    @property
    def has_failures(self) -> bool:
        return any(isinstance(c, Failure) for r in self.rows for c in r)


def format_cell(value: Any) -> str:
    if value is DIVERGENT:
        return "divergent"
    if isinstance(value, Failure):
        return FAILED_PREFIX + value.message
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        text = format(value, ".17g")
        return text if re.search(r"[.e]", text) else text + ".0"
    if value is None:
        return ""
    return str(value)


_INT = re.compile(r"[+-]?\d+\Z")
_FLOAT = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\Z|[+-]?(inf|nan)\Z")


def parse_cell(text: str) -> Any:
    if text == "divergent":
        return DIVERGENT
    if text.startswith(FAILED_PREFIX):
        return Failure(text[len(FAILED_PREFIX):])
    if text in ("true", "false"):
        return text == "true"
    if text == "":
        return None
    if _INT.match(text):
        return int(text)
    if _FLOAT.match(text):
        return float(text)
    return text


def to_csv(table: Table) -> str:
    buf = io.StringIO(newline="")
    for key, value in table.meta.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True, default=_json_default)}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(c) for c in row])
    return buf.getvalue()


def from_csv(text: str) -> Table:
    meta = {}
    lines = text.splitlines(keepends=True)
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, _, payload = lines[i][1:].strip().partition(": ")
        meta[key] = json.loads(payload)
        i += 1
    reader = csv.reader(io.StringIO("".join(lines[i:]), newline=""))
    try:
        columns = next(reader)
    except StopIteration:
        raise ValueError("table has no header row") from None
    rows = [[parse_cell(c) for c in r] for r in reader if r]
    return Table(columns, rows, meta)


def _json_default(value):
    if value is DIVERGENT:
        return "divergent"
    if isinstance(value, Failure):
        return {"failed": value.message}
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _json_cell(value):
    if isinstance(value, float) and not math.isfinite(value):
        return format_cell(value)
    return value


def to_json(table: Table) -> str:
    payload = dict(table.meta)
    payload["columns"] = table.columns
    payload["results"] = [{c: _json_cell(v) for c, v in zip(table.columns, row)} for row in table.rows]
    return json.dumps(payload, indent=2, sort_keys=False, default=_json_default) + "\n"


def _from_json_cell(value):
    if value == "divergent":
        return DIVERGENT
    if isinstance(value, dict) and set(value) == {"failed"}:
        return Failure(value["failed"])
    if value in ("nan", "inf", "-inf"):
        return float(value)
    return value


def from_json(text: str) -> Table:
    payload = json.loads(text)
    columns = payload.pop("columns")
    results = payload.pop("results")
    rows = [[_from_json_cell(r[c]) for c in columns] for r in results]
    return Table(columns, rows, payload)
