"""Dependency-free SVG line plots of sweep CSV files."""

from __future__ import annotations

import csv
import math
from pathlib import Path

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=80, right=150, top=20, bottom=50)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


class PlotError(ValueError):
    pass


def read_table(csv_path) -> tuple[list[str], list[dict[str, str]]]:
    """Header and rows of a CSV whose metadata lines start with '#'."""
    with open(csv_path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise PlotError(f"{csv_path}: no header")
    reader = csv.DictReader(lines)
    rows = list(reader)
    return list(reader.fieldnames or []), rows


def _series(rows, x, y, group):
    out: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        key = " ".join(r[g] for g in group) if group else y
        out.setdefault(key, []).append((float(r[x]), float(r[y])))
    return {k: sorted(v) for k, v in out.items()}


def _ticks(lo, hi, log):
    if log:
        return [10.0**e for e in range(math.floor(lo), math.ceil(hi) + 1)
                if lo - 1e-9 <= e <= hi + 1e-9]
    if hi == lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / 4))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (m * step) <= 6:
            step *= m
            break
    first = math.ceil(lo / step) * step
    n = int(math.floor((hi - first) / step + 1e-9)) + 1
    return [first + i * step for i in range(n)]


def _fmt(v):
    return f"{v:.3g}"


def emit_plot(csv_path, x: str = "omega", y: str = "ReV_over_omega", out=None,
              logx: bool = True, logy: bool = False,
              group: str | tuple[str, ...] | None = "variant") -> Path:
    """Write ``out`` (SVG) and a sibling ``.dat`` file; return the SVG path.

    One polyline per distinct value of ``group`` (a column or a tuple of
    columns; absent columns are ignored). Nothing is written when the table
    lacks a plotted column or has no data rows.
    """
    header, rows = read_table(csv_path)
    group = (group,) if isinstance(group, str) else tuple(group or ())
    group = tuple(g for g in group if g in header)
    for col in (x, y):
        if col not in header:
            raise PlotError(f"column {col!r} not in {header}")
    if not rows:
        raise PlotError(f"{csv_path}: no data rows")
    series = _series(rows, x, y, group)
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    ty = (lambda v: math.log10(v)) if logy else (lambda v: v)
    pts = [(tx(a), ty(b)) for s in series.values() for a, b in s]
    if any(not math.isfinite(p) for xy in pts for p in xy):
        raise PlotError("non-finite or non-positive data on a log axis")
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        pad = abs(y0) * 0.1 or 1.0
        y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (1.0 - (v - y0) / (y1 - y0)) * ph

    svg = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
           'fill="none" stroke="black"/>']
    for t in _ticks(x0, x1, logx):
        v = math.log10(t) if logx else t
        X = px(v)
        svg.append(f'<line x1="{X:.2f}" y1="{MARGIN["top"] + ph}" x2="{X:.2f}" '
                   f'y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        svg.append(f'<text x="{X:.2f}" y="{MARGIN["top"] + ph + 18}" '
                   f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1, logy):
        v = math.log10(t) if logy else t
        Y = py(v)
        svg.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y:.2f}" x2="{MARGIN["left"]}" '
                   f'y2="{Y:.2f}" stroke="black"/>')
        svg.append(f'<text x="{MARGIN["left"] - 8}" y="{Y + 4:.2f}" '
                   f'text-anchor="end">{_fmt(t)}</text>')
    svg.append(f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="{HEIGHT - 10}" '
               f'text-anchor="middle">{x}</text>')
    svg.append(f'<text x="15" y="{MARGIN["top"] + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {MARGIN["top"] + ph / 2:.2f})">{y}</text>')
    for i, (name, s) in enumerate(sorted(series.items())):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{px(tx(a)):.2f},{py(ty(b)):.2f}" for a, b in s)
        svg.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{coords}"><title>{name}</title></polyline>')
        ly = MARGIN["top"] + 15 + 18 * i
        lx = WIDTH - MARGIN["right"] + 10
        svg.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
                   'stroke-width="1.5"/>')
        svg.append(f'<text x="{lx + 25}" y="{ly + 4}">{name}</text>')
    svg.append("</svg>")

    out = Path(out) if out is not None else Path(csv_path).with_suffix(".svg")
    dat = [f"# {x} {y}"]
    for name, s in sorted(series.items()):
        dat.append(f"# {name}")
        dat.extend(f"{a!r} {b!r}" for a, b in s)
        dat.extend(["", ""])
    out.write_text("\n".join(svg) + "\n")
    out.with_suffix(".dat").write_text("\n".join(dat))
    return out
