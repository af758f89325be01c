"""Deterministic CSV output for diagnostics series and field snapshots.

Every file starts with '# key = value' metadata lines, then a header row
naming the columns, then numeric rows printed with 17 significant digits
so identical runs produce byte-identical bodies.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

FORMAT_MARKER = "levyfp-csv v1"


class SeriesError(ValueError):
    """Malformed diagnostics file or inconsistent series."""


@dataclass
class DiagnosticsSeries:
    columns: tuple
    data: np.ndarray                  # shape (n_rows, n_columns)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if self.data.shape[1] != len(self.columns):
            raise SeriesError(
                f"{self.data.shape[1]} data columns vs {len(self.columns)} names")
        if "t" in self.columns and self.data.shape[0] > 1:
            t = self.column("t")
            if not np.all(np.diff(t) > 0):
                raise SeriesError("column 't' must be strictly increasing")

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SeriesError(f"no column named {name!r}; have {self.columns}")
        return self.data[:, self.columns.index(name)]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_series(path: str, series: DiagnosticsSeries) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    lines = [f"# {FORMAT_MARKER}"]
    for k in sorted(series.meta):
        lines.append(f"# {k} = {series.meta[k]}")
    lines.append(",".join(series.columns))
    for row in series.data:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_series(path: str) -> DiagnosticsSeries:
    meta, header, rows = {}, None, []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(x) for x in line.split(",")])
    if header is None:
        raise SeriesError(f"{path} has no header row")
    if not rows:
        raise SeriesError(f"{path} contains no data rows")
    return DiagnosticsSeries(columns=tuple(header), data=np.array(rows), meta=meta)


def write_snapshot(path: str, columns: dict, meta: dict | None = None) -> str:
    """Columnar snapshot, e.g. {'x': ..., 'rho': ...} or {'v':..., 'M':...}."""
    names = tuple(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    series = DiagnosticsSeries(columns=names, data=data, meta=meta or {})
    return write_series(path, series)


def write_field(path: str, f: np.ndarray, meta: dict | None = None) -> str:
    """Full (N_x, N_v) field as rows of v-values per x node."""
    f = np.asarray(f, dtype=float)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    lines = [f"# {FORMAT_MARKER}"]
    meta = dict(meta or {})
    meta["shape"] = f"{f.shape[0]}x{f.shape[1]}"
    for k in sorted(meta):
        lines.append(f"# {k} = {meta[k]}")
    lines.append(",".join(f"v{j}" for j in range(f.shape[1])))
    for row in f:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_field(path: str) -> tuple[np.ndarray, dict]:
    series = read_series(path)
    return series.data, series.meta
