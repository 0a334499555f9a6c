"""File emitters: CSV traces, SVG figures, JSON reports.

All output is deterministic: no timestamps, fixed numeric formatting
(17 significant digits in CSV, so values survive a parse round trip
bit-identically), LF line endings.
"""

from __future__ import annotations

import json
import math

import numpy as np

FIELD_STATIONS = 24
FIELD_OFFSETS = 9
CLAMP_FRACTION = 0.05   # max rendered arrow length, fraction of bounding box


def _fmt(x):
    return format(float(x), ".17g")


def emit_csv(trace, path):
    """Write <path>.norms.csv (t and sup-norms of r..r_uuuu) and
    <path>.snapshots.csv (long-format t,u,r)."""
    path = str(path)
    with open(path + ".norms.csv", "w", newline="\n") as fh:
        fh.write("t,sup_r,sup_r1,sup_r2,sup_r3,sup_r4\n")
        for i, t in enumerate(trace.times):
            row = [t] + [trace.norms[m][i] for m in range(5)]
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    u = None
    with open(path + ".snapshots.csv", "w", newline="\n") as fh:
        fh.write("t,u,r\n")
        for t, snap in trace.snapshots:
            if u is None:
                n = len(snap)
                L = trace.meta.get("L", float(n))
                u = np.arange(n) * (L / n)
            for ui, ri in zip(u, snap):
                fh.write(f"{_fmt(t)},{_fmt(ui)},{_fmt(ri)}\n")


def _offset_levels(chart):
    """Nine offsets spanning the margin-shrunk chart, always including r=0.
    An infinite (convex) outer end is plotted symmetrically to the inner."""
    hi = chart.band_hi
    lo = chart.band_lo if math.isfinite(chart.band_lo) else -hi
    neg = np.linspace(lo, 0.0, 5)[:-1]
    pos = np.linspace(0.0, hi, 5)[1:]
    return np.concatenate([neg, [0.0], pos])


def field_arrows(curve, chart, cfg, arrow_scale=1.5, phase=0.0):
    """Arrow base points and raw (unclamped) vectors on the station/offset
    lattice: stations along u, offsets r across the band."""
    from .forcing import f_scalar

    u = ((np.arange(FIELD_STATIONS) + phase) % FIELD_STATIONS) * (curve.length / FIELD_STATIONS)
    rows = []
    for r in _offset_levels(chart):
        pos = curve.interp_position(u)
        nor = curve.interp_normal(u)
        k = curve.interp_curvature(u)
        base = pos + r * nor
        vec = f_scalar(np.full_like(k, r), k, cfg.C)[:, None] * nor * arrow_scale
        for j in range(FIELD_STATIONS):
            rows.append((u[j], r, base[j], vec[j]))
    return rows


def emit_svg_field(curve, chart, cfg, path, arrow_scale=1.5, phase=0.0, size=640):
    """Vector-field figure: the target curve plus the forcing field sampled on
    a 24x9 normal-coordinate lattice. Arrows are scaled by arrow_scale and
    clamped at 5% of the bounding box; clamped arrows use a distinct stroke
    (near high-curvature points some vectors are very large)."""
    rows = field_arrows(curve, chart, cfg, arrow_scale, phase)
    pts = np.array([b for (_, _, b, _) in rows])
    allpts = np.vstack([curve.position, pts])
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = hi - lo
    clamp_len = CLAMP_FRACTION * max(span[0], span[1])
    pad = 0.08 * max(span[0], span[1])
    scale = size / (max(span[0], span[1]) + 2 * pad)
    tx = -(lo[0] - pad) * scale
    ty = (hi[1] + pad) * scale

    def fmt(x):
        return format(float(x), ".12g")

    lines = []
    lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">')
    lines.append(f'<g transform="matrix({fmt(scale)} 0 0 {fmt(-scale)} {fmt(tx)} {fmt(ty)})">')
    d = "M " + " L ".join(f"{fmt(p[0])} {fmt(p[1])}" for p in curve.position) + " Z"
    w = 1.5 / scale
    lines.append(f'<path class="target" d="{d}" fill="none" stroke="#1a1a1a" '
                 f'stroke-width="{fmt(w)}"/>')
    lines.append('<g class="field">')
    for u, r, base, vec in rows:
        length = math.hypot(vec[0], vec[1])
        cls = "arrow"
        stroke = "#2266cc"
        if length > clamp_len and length > 0:
            vec = vec * (clamp_len / length)
            cls = "arrow clamped"
            stroke = "#cc3322"
        tip = base + vec
        lines.append(
            f'<line class="{cls}" data-u="{fmt(u)}" data-r="{fmt(r)}" '
            f'x1="{fmt(base[0])}" y1="{fmt(base[1])}" '
            f'x2="{fmt(tip[0])}" y2="{fmt(tip[1])}" '
            f'stroke="{stroke}" stroke-width="{fmt(w)}"/>')
    lines.append("</g></g></svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_svg_evolution(curve, trace, path, frames=8, size=640):
    """Evolution figure: the target plus generated curves at a few snapshot
    times, fading with time."""
    count = min(frames, len(trace.snapshots))
    picks = np.unique(np.linspace(0, len(trace.snapshots) - 1, count).astype(int))
    curves = []
    for i in picks:
        t, snap = trace.snapshots[i]
        pts = curve.position + snap[:, None] * curve.normal
        curves.append((t, pts))
    allpts = np.vstack([curve.position] + [p for _, p in curves])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = hi - lo
    pad = 0.08 * max(span[0], span[1])
    scale = size / (max(span[0], span[1]) + 2 * pad)
    tx = -(lo[0] - pad) * scale
    ty = (hi[1] + pad) * scale

    def fmt(x):
        return format(float(x), ".12g")

    def path_of(pts):
        return "M " + " L ".join(f"{fmt(p[0])} {fmt(p[1])}" for p in pts) + " Z"

    w = 1.5 / scale
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<g transform="matrix({fmt(scale)} 0 0 {fmt(-scale)} {fmt(tx)} {fmt(ty)})">',
             f'<path class="target" d="{path_of(curve.position)}" fill="none" '
             f'stroke="#1a1a1a" stroke-width="{fmt(1.5 * w)}"/>']
    for j, (t, pts) in enumerate(curves):
        opacity = 0.25 + 0.75 * (j + 1) / len(curves)
        lines.append(f'<path class="frame" data-t="{fmt(t)}" d="{path_of(pts)}" '
                     f'fill="none" stroke="#2266cc" stroke-opacity="{opacity:.3f}" '
                     f'stroke-width="{fmt(w)}"/>')
    lines.append("</g></svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_report(report, path):
    """Deterministic JSON report (sorted keys, no timestamps)."""
    text = json.dumps(_json_safe(report), sort_keys=True, indent=2)
    with open(path, "w", newline="\n") as fh:
        fh.write(text + "\n")
    return text
