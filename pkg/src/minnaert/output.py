"""Result tables and their CSV / SVG emission."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from html import escape
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple


@dataclass
class ResultTable:
    """Named columns and typed rows; complex cells split into ``_re``/``_im`` on output."""

    columns: Tuple[str, ...]
    rows: List[Tuple[Any, ...]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(tuple(values))

    def column(self, name: str) -> List[Any]:
        try:
            i = self.columns.index(name)
        except ValueError:
            raise KeyError(f"unknown column {name!r}; have {list(self.columns)}") from None
        return [row[i] for row in self.rows]

    def _complex_columns(self) -> List[bool]:
        return [any(isinstance(row[i], complex) for row in self.rows) for i in range(len(self.columns))]

    def flat_columns(self) -> List[str]:
        out = []
        for name, is_complex in zip(self.columns, self._complex_columns()):
            out.extend([f"{name}_re", f"{name}_im"] if is_complex else [name])
        return out

    def flat_rows(self) -> List[List[Any]]:
        flags = self._complex_columns()
        out = []
        for row in self.rows:
            flat = []
            for value, is_complex in zip(row, flags):
                if is_complex:
                    value = complex(value)
                    flat.extend([value.real, value.imag])
                else:
                    flat.append(value)
            out.append(flat)
        return out


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value
    if hasattr(value, "dtype"):
        return "%.17g" % float(value)
    return str(value)


def emit_csv(table: ResultTable, path) -> Path:
    """UTF-8 CSV with a header row and 17 significant digits.

    Metadata (config hash, version, runtime) goes to ``<path>.meta.json`` so
    the CSV itself stays a plain rectangular table.
    """
    path = Path(path)
    rows = table.flat_rows()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.flat_columns())
        for row in rows:
            writer.writerow([_format(v) for v in row])
    if table.metadata:
        meta = Path(str(path) + ".meta.json")
        meta.write_text(json.dumps(table.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_csv(path) -> Tuple[List[str], List[List[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def _numeric(table: ResultTable, name: str) -> List[float]:
    flat_names = table.flat_columns()
    if name not in flat_names:
        raise KeyError(f"unknown column {name!r}; have {flat_names}")
    i = flat_names.index(name)
    return [float(r[i]) for r in table.flat_rows()]


def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def emit_svg_scatter(table: ResultTable, x_col: str, y_col: str, path, title: str = "",
                     log_x: bool = False, log_y: bool = False) -> Path:
    """Standalone SVG scatter/line plot of two numeric columns.

    Raises ``ValueError`` for an empty table and ``KeyError`` for an unknown
    column; in both cases no file is written.
    """
    if not table.rows:
        raise ValueError("cannot plot an empty table")
    xs, ys = _numeric(table, x_col), _numeric(table, y_col)
    pts = [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)
           and (not log_x or x > 0) and (not log_y or y > 0)]
    if not pts:
        raise ValueError("no finite points to plot")
    tx = (lambda v: math.log10(v)) if log_x else (lambda v: v)
    ty = (lambda v: math.log10(v)) if log_y else (lambda v: v)
    px = [tx(x) for x, _ in pts]
    py = [ty(y) for _, y in pts]
    x0, x1 = min(px), max(px)
    y0, y1 = min(py), max(py)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    width, height, margin = 640, 420, 60
    sx = lambda v: margin + (v - x0) / (x1 - x0) * (width - 2 * margin)
    sy = lambda v: height - margin - (v - y0) / (y1 - y0) * (height - 2 * margin)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<metadata>{escape(json.dumps(_stable_metadata(table.metadata), sort_keys=True))}</metadata>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        label = f"1e{t:.2g}" if log_x else f"{t:.4g}"
        parts.append(f'<text x="{sx(t):.2f}" y="{height - margin + 18}" font-size="11" '
                     f'text-anchor="middle">{escape(label)}</text>')
    for t in _ticks(y0, y1):
        label = f"1e{t:.2g}" if log_y else f"{t:.4g}"
        parts.append(f'<text x="{margin - 6}" y="{sy(t) + 4:.2f}" font-size="11" '
                     f'text-anchor="end">{escape(label)}</text>')
    order = sorted(range(len(px)), key=lambda i: px[i])
    poly = " ".join(f"{sx(px[i]):.2f},{sy(py[i]):.2f}" for i in order)
    parts.append(f'<polyline points="{poly}" fill="none" stroke="#1f77b4" stroke-width="1"/>')
    for i in order:
        parts.append(f'<circle cx="{sx(px[i]):.2f}" cy="{sy(py[i]):.2f}" r="3" fill="#1f77b4"/>')
    parts.append(f'<text x="{width / 2}" y="{height - 15}" font-size="13" text-anchor="middle">{escape(x_col)}</text>')
    parts.append(f'<text x="15" y="{height / 2}" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 15 {height / 2})">{escape(y_col)}</text>')
    if title:
        parts.append(f'<text x="{width / 2}" y="25" font-size="14" text-anchor="middle">{escape(title)}</text>')
    parts.append("</svg>")
    path = Path(path)
    tmp = Path(str(path) + ".tmp")
    tmp.write_text("\n".join(parts) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path


def _stable_metadata(meta: Dict[str, Any]) -> Dict[str, Any]:
    # runtime varies between runs and is left out of the figure
    return {k: v for k, v in meta.items() if k != "runtime_seconds"}
