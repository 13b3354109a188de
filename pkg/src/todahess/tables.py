"""Tabular output: deterministic CSV with a schema-version token, JSON mirror.

CSV layout: one comment line `# schema: <token>` carrying the schema-version
token, then the header row, then one record per grid point.  Floats are
written with 17 significant digits ('.' decimal separator), so identical
configurations reproduce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


def fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


@dataclass
class Table:
    schema: str  # e.g. "todahess.fig1.v1"
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(
                f"row width {len(values)} != {len(self.columns)} columns"
            )
        self.rows.append(list(values))

    def to_csv(self) -> str:
        lines = [f"# schema: {self.schema}"]
        for key in sorted(self.meta):
            lines.append(f"# {key}: {self.meta[key]}")
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(fmt_value(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "schema": self.schema,
            "meta": self.meta,
            "columns": self.columns,
            "rows": [[fmt_value(v) if isinstance(v, float) else v for v in row]
                     for row in self.rows],
        }
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_text(self) -> str:
        widths = [
            max(len(c), *(len(fmt_value(r[i])) for r in self.rows))
            if self.rows
            else len(c)
            for i, c in enumerate(self.columns)
        ]
        out = ["  ".join(c.ljust(w) for c, w in zip(self.columns, widths))]
        for row in self.rows:
            out.append(
                "  ".join(fmt_value(v).ljust(w) for v, w in zip(row, widths))
            )
        return "\n".join(out) + "\n"
