"""CSV/JSON data files and self-contained SVG renders."""

from __future__ import annotations

import json
import math
from html import escape
from pathlib import Path

import numpy as np

from . import __version__

NEUTRAL_GRAY = (160, 160, 160)
WHITE = (255, 255, 255)
RED = (178, 24, 43)
BLUE = (33, 102, 172)


def _fmt(x):
    # repr of a Python float is the shortest string that round-trips exactly
    return repr(float(x))


def _json_num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def emit_data(result, fmt, path, config_hash=""):
    """Write ``result`` as CSV or JSON and return the path.

    CSV columns are ``omega_detuning, s1`` for spectra and
    ``omega1, omega2, s2, g2`` (row-major over the grid) for maps.
    """
    path = Path(path)
    if fmt == "csv":
        lines = []
        if result.is_map:
            lines.append("omega1,omega2,s2,g2")
            g2 = result.g2 if result.g2 is not None else np.full_like(result.s2, np.nan)
            for i, w1 in enumerate(result.axis1):
                for j, w2 in enumerate(result.axis2):
                    lines.append(",".join(map(_fmt, (w1, w2, result.s2[i, j], g2[i, j]))))
        else:
            lines.append("omega_detuning,s1")
            lines.extend(f"{_fmt(w)},{_fmt(s)}" for w, s in zip(result.axis1, result.s1))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        doc = {
            "engine_version": __version__,
            "config_hash": config_hash,
            "label": result.label,
            "mode": result.mode.value,
            "provenance": result.provenance,
            "failed": list(result.failed),
        }
        if result.is_map:
            doc["columns"] = ["omega1", "omega2", "s2", "g2"]
            doc["omega1"] = [_json_num(x) for x in result.axis1]
            doc["omega2"] = [_json_num(x) for x in result.axis2]
            doc["s2"] = [[_json_num(x) for x in row] for row in result.s2]
            g2 = result.g2 if result.g2 is not None else np.full_like(result.s2, np.nan)
            doc["g2"] = [[_json_num(x) for x in row] for row in g2]
        else:
            doc["columns"] = ["omega_detuning", "s1"]
            doc["omega_detuning"] = [_json_num(x) for x in result.axis1]
            doc["s1"] = [_json_num(x) for x in result.s1]
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def read_csv(path):
    """Parse a CSV written by :func:`emit_data` into ``(header, float array)``."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    return header, np.array(rows, dtype=float)


def _mix(c0, c1, t):
    t = min(max(t, 0.0), 1.0)
    return tuple(int(round(a + (b - a) * t)) for a, b in zip(c0, c1))


def g2_color(value, scale="linear", vmax=2.0, log_range=None):
    """Diverging map: blue below 1, white at 1, red above; NaN is gray.

    ``linear`` clamps to ``[0, vmax]``; ``symlog`` maps ``log10(g2)`` on
    ``[-log_range, log_range]``.
    """
    if value is None or not math.isfinite(value):
        return NEUTRAL_GRAY
    if scale == "linear":
        if value >= 1.0:
            return _mix(WHITE, RED, (value - 1.0) / (vmax - 1.0))
        return _mix(WHITE, BLUE, 1.0 - value)
    if scale == "symlog":
        rng = log_range or 1.0
        t = math.log10(max(value, 1e-300)) / rng
        return _mix(WHITE, RED, t) if t >= 0 else _mix(WHITE, BLUE, -t)
    raise ValueError(f"unknown scale {scale!r}")


def _hex(c):
    return "#%02x%02x%02x" % c


def _svg_doc(width, height, body, meta):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">\n'
        f"<metadata>{escape(meta)}</metadata>\n" + "\n".join(body) + "\n</svg>\n"
    )


_SERIES_COLORS = ["#2166ac", "#000000", "#b2182b", "#1b7837", "#762a83"]
_SERIES_DASH = ["", "2,3", "6,3", "", ""]


def render_lines(results, path, title="", config_hash=""):
    """Log-scale line plot of one or more single-photon spectra."""
    results = list(results)
    w, h, ml, mr, mt, mb = 720, 440, 70, 130, 30, 45
    pw, ph = w - ml - mr, h - mt - mb
    xs = np.concatenate([r.axis1 for r in results])
    ys = np.concatenate([r.s1[np.isfinite(r.s1) & (r.s1 > 0)] for r in results])
    x0, x1 = float(xs.min()), float(xs.max())
    if x1 == x0:
        x1 = x0 + 1.0
    ly0 = math.floor(math.log10(ys.min())) if ys.size else -1
    ly1 = math.ceil(math.log10(ys.max())) if ys.size else 0
    if ly1 == ly0:
        ly1 = ly0 + 1

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + (ly1 - math.log10(y)) / (ly1 - ly0) * ph

    body = [f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>']
    for k in range(ly0, ly1 + 1):
        y = py(10.0**k)
        body.append(f'<line x1="{ml}" x2="{ml + pw}" y1="{y:.1f}" y2="{y:.1f}" stroke="#ddd"/>')
        body.append(f'<text x="{ml - 6}" y="{y + 4:.1f}" text-anchor="end">1e{k}</text>')
    for t in np.linspace(x0, x1, 5):
        body.append(f'<text x="{px(t):.1f}" y="{mt + ph + 16}" text-anchor="middle">{t:.3g}</text>')
    body.append(
        f'<text x="{ml + pw / 2}" y="{h - 8}" text-anchor="middle">detuning (1/ps)</text>'
    )
    body.append(f'<text x="{ml}" y="{mt - 10}">{escape(title)}</text>')
    for n, r in enumerate(results):
        color = _SERIES_COLORS[n % len(_SERIES_COLORS)]
        dash = _SERIES_DASH[n % len(_SERIES_DASH)]
        segs, cur = [], []
        for x, y in zip(r.axis1, r.s1):
            if math.isfinite(y) and y > 0:
                cur.append(f"{px(x):.2f},{py(y):.2f}")
            elif cur:
                segs.append(cur)
                cur = []
        if cur:
            segs.append(cur)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        for s in segs:
            body.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.2"{extra} '
                f'points="{" ".join(s)}"/>'
            )
        ly = mt + 14 + 16 * n
        body.append(
            f'<line x1="{ml + pw + 10}" x2="{ml + pw + 35}" y1="{ly}" y2="{ly}" '
            f'stroke="{color}"{extra}/>'
        )
        body.append(f'<text x="{ml + pw + 40}" y="{ly + 4}">{escape(r.label)}</text>')
    meta = f"engine {__version__}; config {config_hash}"
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(_svg_doc(w, h, body, meta), encoding="utf-8")
    return Path(path)


def render_heatmap(result, path, scale="linear", vmax=2.0, title="", config_hash=""):
    """g2 map as a grid of rectangles; runs of equal color in a row are merged."""
    g2 = result.g2
    n1, n2 = g2.shape
    size = 480
    ml, mt, mb, mr = 60, 30, 45, 90
    cw, ch = size / n2, size / n1
    log_range = None
    if scale == "symlog":
        finite = g2[np.isfinite(g2) & (g2 > 0)]
        log_range = float(np.max(np.abs(np.log10(finite)))) if finite.size else 1.0
        log_range = log_range or 1.0
    body = []
    # axis1 runs upward, axis2 to the right
    for i in range(n1):
        y = mt + (n1 - 1 - i) * ch
        j = 0
        while j < n2:
            c = g2_color(g2[i, j], scale, vmax, log_range)
            k = j + 1
            while k < n2 and g2_color(g2[i, k], scale, vmax, log_range) == c:
                k += 1
            body.append(
                f'<rect x="{ml + j * cw:.2f}" y="{y:.2f}" width="{(k - j) * cw + 0.05:.2f}" '
                f'height="{ch + 0.05:.2f}" fill="{_hex(c)}"/>'
            )
            j = k
    body.append(f'<rect x="{ml}" y="{mt}" width="{size}" height="{size}" fill="none" stroke="#000"/>')
    a1, a2 = result.axis1, result.axis2
    body.append(f'<text x="{ml}" y="{mt + size + 16}">{a2[0]:.3g}</text>')
    body.append(f'<text x="{ml + size}" y="{mt + size + 16}" text-anchor="end">{a2[-1]:.3g}</text>')
    body.append(f'<text x="{ml - 4}" y="{mt + size}" text-anchor="end">{a1[0]:.3g}</text>')
    body.append(f'<text x="{ml - 4}" y="{mt + 10}" text-anchor="end">{a1[-1]:.3g}</text>')
    body.append(f'<text x="{ml + size / 2}" y="{mt + size + 34}" text-anchor="middle">omega2 detuning (1/ps)</text>')
    body.append(f'<text x="{ml}" y="{mt - 10}">{escape(title)}</text>')
    # colorbar
    bx, steps = ml + size + 25, 60
    if scale == "linear":
        vals = np.linspace(vmax, 0.0, steps)
        labels = [(0, f"{vmax:g}"), (steps // 2, "1"), (steps - 1, "0")]
    else:
        vals = 10.0 ** np.linspace(log_range, -log_range, steps)
        labels = [(0, f"{10**log_range:.3g}"), (steps // 2, "1"), (steps - 1, f"{10**-log_range:.3g}")]
    bh = size / steps
    for s, v in enumerate(vals):
        c = g2_color(v, scale, vmax, log_range)
        body.append(
            f'<rect x="{bx}" y="{mt + s * bh:.2f}" width="16" height="{bh + 0.05:.2f}" fill="{_hex(c)}"/>'
        )
    for s, text in labels:
        body.append(f'<text x="{bx + 20}" y="{mt + s * bh + 8:.1f}">{text}</text>')
    meta = f"engine {__version__}; config {config_hash}"
    w = ml + size + mr
    h = mt + size + mb
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(_svg_doc(w, h, body, meta), encoding="utf-8")
    return Path(path)


def render_svg(result, path, style="linear", title="", config_hash=""):
    """1-D results (or a list of them) become line plots, maps become heatmaps."""
    if isinstance(result, (list, tuple)):
        return render_lines(result, path, title, config_hash)
    if result.is_map:
        return render_heatmap(result, path, scale=style, title=title, config_hash=config_hash)
    return render_lines([result], path, title, config_hash)
