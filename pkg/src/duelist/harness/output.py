"""CSV and SVG emission.

CSV files are UTF-8 with LF line endings; reals are written with 17
significant digits so they parse back to the identical float.
"""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape, quoteattr

from ..engine import GenerationRecord
from .experiment import ComparisonBundle, SweepRow

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_rows(path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def trace_header(n_vars: int) -> list[str]:
    return (["generation", "best_fitness", "mean_fitness"]
            + [f"best_x{i}" for i in range(n_vars)] + ["evaluations"])


def emit_trace_csv(trace: Sequence[GenerationRecord], path) -> Path:
    n_vars = len(trace[0].best_point) if trace else 0
    rows = ([str(r.generation), fmt(r.best_fitness), fmt(r.mean_fitness)]
            + [fmt(v) for v in r.best_point] + [str(r.evaluations)] for r in trace)
    return _write_rows(path, trace_header(n_vars), rows)


def read_trace_csv(path) -> list[GenerationRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_vars = len(header) - 4
        out = []
        for row in reader:
            out.append(GenerationRecord(
                generation=int(row[0]),
                best_fitness=float(row[1]),
                mean_fitness=float(row[2]),
                best_point=tuple(float(v) for v in row[3:3 + n_vars]),
                evaluations=int(row[-1]),
            ))
    return out


def emit_sweep_csv(rows: Sequence[SweepRow], path) -> Path:
    return _write_rows(path, ["parameter_value", "best_solution_median", "iteration_median"],
                       ([fmt(r.parameter_value), fmt(r.best_solution), fmt(r.iterations)] for r in rows))


def emit_comparison_csv(bundle: ComparisonBundle, path) -> Path:
    header = ["iteration"] + [f"{name}_best" for name in bundle.names]
    rows = ([str(i + 1)] + [fmt(bundle.traces[name][i]) for name in bundle.names]
            for i in range(bundle.n_iterations))
    return _write_rows(path, header, rows)


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    ticks, t = [], first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def emit_plot(bundle: ComparisonBundle, path, width: int = 800, height: int = 600,
              title: str | None = None) -> Path:
    """Best fitness against iteration, one polyline per algorithm, as standalone SVG 1.1."""
    names = [n for n in bundle.names if bundle.traces.get(n)]
    if not names:
        raise ValueError("cannot plot an empty comparison bundle")
    left, right, top, bottom = 80, 160, 40 if title else 20, 60
    pw, ph = width - left - right, height - top - bottom
    n_it = bundle.n_iterations
    values = [v for n in names for v in bundle.traces[n]]
    y_lo, y_hi = min(values), max(values)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = 1, max(n_it, 2)

    def sx(it):
        return left + (it - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return top + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{left + pw / 2:.2f}" y="24" text-anchor="middle" font-size="16" '
                   f'font-family="sans-serif">{escape(title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _nice_ticks(x_lo, x_hi):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 20}" text-anchor="middle" font-size="12" '
                   f'font-family="sans-serif">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        y = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="12" '
                   f'font-family="sans-serif">{t:g}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 15}" text-anchor="middle" font-size="14" '
               f'font-family="sans-serif">iteration</text>')
    out.append(f'<text x="20" y="{top + ph / 2:.2f}" text-anchor="middle" font-size="14" '
               f'font-family="sans-serif" transform="rotate(-90 20 {top + ph / 2:.2f})">best fitness</text>')

    for k, name in enumerate(names):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{sx(i + 1):.2f},{sy(v):.2f}" for i, v in enumerate(bundle.traces[name]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'data-algorithm={quoteattr(name)} points="{pts}"/>')
    for k, name in enumerate(names):
        color = PALETTE[k % len(PALETTE)]
        y = top + 20 + 22 * k
        x = left + pw + 15
        out.append(f'<g class="legend-entry"><line x1="{x}" y1="{y}" x2="{x + 25}" y2="{y}" '
                   f'stroke="{color}" stroke-width="2"/><text x="{x + 32}" y="{y + 4}" font-size="13" '
                   f'font-family="sans-serif">{escape(name)}</text></g>')
    out.append("</svg>")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")
    os.replace(tmp, path)
    return path
