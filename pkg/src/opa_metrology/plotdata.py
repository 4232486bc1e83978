"""CSV and minimal SVG line-chart output for sweep tables.

A table is an ordered mapping of column name to equal-length 1D arrays.
Missing values (degenerate estimators) are ``nan`` in memory and written as
empty CSV fields.
"""
from __future__ import annotations

import csv
import io
import math
from xml.sax.saxutils import escape

import numpy as np

SVG_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
LEGEND = {
    "opa": "with OPA",
    "noopa": "without OPA",
    "snl": "SNL (with OPA)",
    "printed": "closed form",
}


def _rows(table) -> int:
    lengths = {len(v) for v in table.values()}
    if not table or lengths == {0}:
        raise ValueError("cannot emit an empty table")
    if len(lengths) != 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    return lengths.pop()


def format_number(x: float) -> str:
    if x is None or not math.isfinite(x):
        return ""
    return f"{float(x):.17g}"


def to_csv(table) -> str:
    n = _rows(table)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(table))
    cols = [np.asarray(v, dtype=float) for v in table.values()]
    for i in range(n):
        writer.writerow([format_number(c[i]) for c in cols])
    return buf.getvalue()


def read_csv(text: str) -> dict[str, np.ndarray]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    data = [[float(x) if x else math.nan for x in row] for row in reader]
    arr = np.array(data, dtype=float).reshape(len(data), len(header))
    return {h: arr[:, j] for j, h in enumerate(header)}


def _series(table):
    """Lines to draw: (label, x, y). 2D tables are drawn as loss1 slices."""
    if "loss" in table:
        x = np.asarray(table["loss"], dtype=float)
        for name, y in table.items():
            if name.startswith("sigma"):
                tag = name.rsplit("_", 1)[-1]
                prefix = "phase 1, " if name.startswith("sigma1_") else ""
                yield prefix + LEGEND.get(tag, tag), x, np.asarray(y, dtype=float)
        return
    l1 = np.asarray(table["loss1"], dtype=float)
    l2 = np.asarray(table["loss2"], dtype=float)
    levels = np.unique(l2)
    picks = levels[[0, len(levels) // 2, -1]] if len(levels) > 2 else levels
    for name, y in table.items():
        if not name.startswith("sigma"):
            continue
        tag = name.rsplit("_", 1)[-1]
        y = np.asarray(y, dtype=float)
        for level in np.unique(picks):
            sel = l2 == level
            yield f"{LEGEND.get(tag, tag)}, loss2={level:g}", l1[sel], y[sel]


def to_svg(table, log_sigma=False, width=640, height=420) -> str:
    _rows(table)
    series = [(label, x, y) for label, x, y in _series(table)]
    if not series:
        raise ValueError("table has no sigma columns to plot")
    left, right, top, bottom = 70, 190, 20, 50
    pw, ph = width - left - right, height - top - bottom
    xs = np.concatenate([s[1] for s in series])
    ys = np.concatenate([s[2] for s in series])
    ok = np.isfinite(ys) & ((ys > 0) if log_sigma else True)
    tr = np.log10 if log_sigma else (lambda v: v)
    ymin, ymax = float(np.min(tr(ys[ok]))), float(np.max(tr(ys[ok])))
    if ymax == ymin:
        ymax = ymin + 1.0
    xmin, xmax = float(np.min(xs)), float(np.max(xs))
    if xmax == xmin:
        xmax = xmin + 1.0

    def px(v):
        return left + (v - xmin) / (xmax - xmin) * pw

    def py(v):
        return top + ph - (tr(v) - ymin) / (ymax - ymin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">loss</text>',
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.1f})">'
        f'{"log10 sigma" if log_sigma else "sigma"}</text>',
    ]
    for t in np.linspace(xmin, xmax, 5):
        out.append(f'<text x="{px(t):.1f}" y="{top + ph + 16}" text-anchor="middle" '
                   f'font-size="11">{t:.2f}</text>')
    for t in np.linspace(ymin, ymax, 5):
        y = top + ph - (t - ymin) / (ymax - ymin) * ph
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end" font-size="11">{t:.3g}</text>')
    for i, (label, x, y) in enumerate(series):
        color = SVG_COLORS[i % len(SVG_COLORS)]
        keep = np.isfinite(y) & ((y > 0) if log_sigma else True)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[keep], y[keep]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 14 + 18 * i
        out.append(f'<line x1="{width - right + 10}" y1="{ly - 4}" x2="{width - right + 30}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{width - right + 35}" y="{ly}" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plotdata(table, path, format="csv", log_sigma=False) -> str:
    """Write ``table`` to ``path`` as CSV or SVG and return the written text."""
    if format == "csv":
        text = to_csv(table)
    elif format in ("svg", "svg-lines"):
        text = to_svg(table, log_sigma=log_sigma)
    else:
        raise ValueError(f"unsupported format {format!r}; expected 'csv' or 'svg'")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text
