#!/usr/bin/env python3
"""
CSV / JSON Output for the Morse Spectrum Tools
Fixed decimal formatting and fixed row order, so identical invocations give
byte-identical output.
"""

import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, TextIO

from pekeris_core import DomainError

FORMATS = ("csv", "json")
DEFAULT_PRECISION = 12
MIN_PRECISION = 6
MAX_PRECISION = 17


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    destination: Optional[str] = None   # None or "-" means stdout
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.format not in FORMATS:
            raise DomainError(f"output format must be one of {FORMATS}, got {self.format!r}")
        if isinstance(self.precision, bool) or not MIN_PRECISION <= self.precision <= MAX_PRECISION:
            raise DomainError(f"precision must lie in [{MIN_PRECISION}, {MAX_PRECISION}]")

    @property
    def to_stdout(self) -> bool:
        return self.destination in (None, "-")


@dataclass(frozen=True)
class Table:
    """One block of output: header, rows and the parameters that produced it."""

    header: Sequence[str]
    rows: Sequence[Sequence[Any]]
    meta: Dict[str, Any]


def format_number(value: Any, precision: int) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
        return format(value, f".{precision}g")
    return str(value)


def _round_for_json(value: Any, precision: int) -> Any:
    if isinstance(value, float) and math.isfinite(value):
        return float(format(value, f".{precision}g"))
    if isinstance(value, dict):
        return {k: _round_for_json(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_for_json(v, precision) for v in value]
    return value


def render_csv(tables: Sequence[Table], precision: int) -> str:
    buffer = io.StringIO()
    for i, table in enumerate(tables):
        if i:
            buffer.write("\n")
        for key, value in table.meta.items():
            buffer.write(f"# {key}={format_number(value, precision)}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([format_number(v, precision) for v in row])
    return buffer.getvalue()


def render_json(tables: Sequence[Table], precision: int, meta: Optional[Dict[str, Any]] = None) -> str:
    def block(table: Table) -> Dict[str, Any]:
        return {
            "meta": _round_for_json(table.meta, precision),
            "rows": [_round_for_json(dict(zip(table.header, row)), precision) for row in table.rows],
        }

    if len(tables) == 1 and meta is None:
        payload = block(tables[0])
    else:
        payload = {"meta": _round_for_json(meta or {}, precision), "blocks": [block(t) for t in tables]}
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render_document(document: Dict[str, Any], precision: int) -> str:
    """Free-form JSON document (validation reports, registry listings)."""
    return json.dumps(_round_for_json(document, precision), indent=2, ensure_ascii=False) + "\n"


class OutputWriter:
    def __init__(self, spec: Optional[OutputSpec] = None, stream: Optional[TextIO] = None):
        self.spec = spec or OutputSpec()
        self.stream = stream

    def _write(self, text: str) -> Dict[str, Any]:
        try:
            if self.spec.to_stdout:
                stream = self.stream or sys.stdout
                stream.write(text)
                stream.flush()
                target = "<stdout>"
            else:
                target = os.path.abspath(self.spec.destination)
                os.makedirs(os.path.dirname(target), exist_ok=True)
                with open(target, "w", encoding="utf-8", newline="") as f:
                    f.write(text)
            return {"success": True, "destination": target, "size": len(text)}
        except OSError as e:
            return {"success": False, "error": f"could not write output: {e}"}

    def write_tables(self, tables: Sequence[Table], meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        if self.spec.format == "csv":
            return self._write(render_csv(tables, self.spec.precision))
        return self._write(render_json(tables, self.spec.precision, meta))

    def write_document(self, document: Dict[str, Any]) -> Dict[str, Any]:
        """JSON-only payloads; csv specs still get JSON here."""
        return self._write(render_document(document, self.spec.precision))


def parse_csv_rows(text: str) -> List[Dict[str, str]]:
    """Inverse of render_csv for a single block; comment lines are skipped."""
    lines = [line for line in text.splitlines() if line and not line.startswith("#")]
    return list(csv.DictReader(lines))
