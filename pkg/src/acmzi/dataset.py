"""Column datasets and their CSV/JSON serialization.

Non-finite numbers are never written: the cell is left empty (``null`` in
JSON) and the row's ``divergent`` marker is set to 1.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

DIVERGENT = "divergent"


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return f"{float(x):.17g}"


@dataclass
class Dataset:
    columns: list[str]
    data: dict[str, list]
    units: dict[str, str] = field(default_factory=dict)
    metadata: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(self.data[c]) for c in self.columns}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: lengths {sorted(lengths)}")
        if DIVERGENT in self.columns:
            raise ValueError("the divergent column is added automatically")

    @classmethod
    def from_rows(cls, columns, rows, units=None, metadata=None):
        data = {c: [r[k] for r in rows] for k, c in enumerate(columns)}
        return cls(list(columns), data, dict(units or {}), dict(metadata or {}))

    def __len__(self):
        return len(self.data[self.columns[0]]) if self.columns else 0

    def divergent_flags(self) -> list[int]:
        flags = []
        for i in range(len(self)):
            bad = any(isinstance(v, float) and not math.isfinite(v)
                      for v in (self.data[c][i] for c in self.columns))
            flags.append(int(bad))
        return flags

    def all_divergent(self, columns=None) -> bool:
        """True when every numeric value in ``columns`` is non-finite."""
        vals = [v for c in (columns or self.columns) for v in self.data[c]]
        return bool(vals) and all(isinstance(v, float) and not math.isfinite(v) for v in vals)

    # -- serialization -----------------------------------------------------

    def _cell(self, v) -> str:
        if isinstance(v, (bool, np.bool_)):
            return str(int(v))
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return format_float(v) if math.isfinite(v) else ""
        return str(v)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}={_meta_text(v)}\n")
        if self.units:
            buf.write("# units=" + ",".join(f"{c}:{self.units[c]}" for c in self.columns
                                            if c in self.units) + "\n")
        buf.write(",".join(self.columns + [DIVERGENT]) + "\n")
        flags = self.divergent_flags()
        for i in range(len(self)):
            cells = [self._cell(self.data[c][i]) for c in self.columns]
            buf.write(",".join(cells + [str(flags[i])]) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, (float, np.floating)):
                return float(v) if math.isfinite(v) else None
            if isinstance(v, (np.integer, np.bool_)):
                return int(v)
            return v
        doc = {
            "metadata": {k: _meta_json(v) for k, v in self.metadata.items()},
            "units": {c: self.units[c] for c in self.columns if c in self.units},
            "columns": {c: [clean(v) for v in self.data[c]] for c in self.columns},
        }
        doc["columns"][DIVERGENT] = self.divergent_flags()
        return json.dumps(doc, indent=1) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def _meta_text(v) -> str:
    if isinstance(v, float):
        return format_float(v)
    return str(v).replace("\n", " ")


def _meta_json(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)


def read_csv(text: str):
    """Parse CSV written by :meth:`Dataset.to_csv` into (metadata, columns)."""
    meta, header, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = v
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    cols = {}
    for k, name in enumerate(header or []):
        cells = [r[k] for r in rows]
        try:
            cols[name] = np.array([float(c) if c != "" else np.nan for c in cells])
        except ValueError:
            cols[name] = cells
    return meta, cols
