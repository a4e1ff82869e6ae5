"""Deterministic SVG rendering of world lines and events.

Position runs horizontally, time vertically (upward).  Output depends only
on the input data: fixed canvas, fixed palette, fixed number formatting.
"""

from __future__ import annotations

import numpy as np

_W, _H = 480.0, 480.0
_MARGIN = 46.0

_FACTOR_COLORS = {None: "#333333", 0: "#1f77b4", 1: "#d62728"}
_EVENT_STYLE = {"creation": "#2ca02c", "annihilation": "#8c1010", "crossing": "#777777"}


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Mapper:
    def __init__(self, x_range, t_range):
        self.x0, self.x1 = x_range
        self.t0, self.t1 = t_range

    def pt(self, x, t):
        u = _MARGIN + (x - self.x0) / (self.x1 - self.x0) * (_W - 2 * _MARGIN)
        v = _H - _MARGIN - (t - self.t0) / (self.t1 - self.t0) * (_H - 2 * _MARGIN)
        return u, v


def render_worldlines(lines, events, title="") -> str:
    """SVG document string for (line_id, factor_id, ts, xs) rows and events.

    ``events`` rows are (kind, t, x, line_ids); lines broken at gaps arrive
    simply as separate rows.
    """
    xs_all = [x for _, _, _, xs in lines for x in xs] or [0.0]
    ts_all = [t for _, _, ts, _ in lines for t in ts] or [0.0]
    xs_all += [e[2] for e in events]
    ts_all += [e[1] for e in events]
    x_lo, x_hi = min(xs_all), max(xs_all)
    t_lo, t_hi = min(ts_all), max(ts_all)
    pad_x = 0.05 * (x_hi - x_lo) or 1.0
    pad_t = 0.05 * (t_hi - t_lo) or 1.0
    m = _Mapper((x_lo - pad_x, x_hi + pad_x), (t_lo - pad_t, t_hi + pad_t))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:.0f}" height="{_H:.0f}" '
        f'viewBox="0 0 {_W:.0f} {_H:.0f}">',
        f'<rect width="{_W:.0f}" height="{_H:.0f}" fill="white"/>',
        f'<rect x="{_fmt(_MARGIN)}" y="{_fmt(_MARGIN)}" width="{_fmt(_W - 2 * _MARGIN)}" '
        f'height="{_fmt(_H - 2 * _MARGIN)}" fill="none" stroke="#bbbbbb"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(_W / 2)}" y="24" text-anchor="middle" '
            f'font-family="monospace" font-size="13">{title}</text>'
        )
    # axis labels: x range along the bottom, t range along the left
    parts.append(
        f'<text x="{_fmt(_MARGIN)}" y="{_fmt(_H - 16)}" font-family="monospace" '
        f'font-size="11">x={x_lo:.6g}</text>'
    )
    parts.append(
        f'<text x="{_fmt(_W - _MARGIN)}" y="{_fmt(_H - 16)}" text-anchor="end" '
        f'font-family="monospace" font-size="11">x={x_hi:.6g}</text>'
    )
    parts.append(
        f'<text x="10" y="{_fmt(_H - _MARGIN)}" font-family="monospace" '
        f'font-size="11">t={t_lo:.6g}</text>'
    )
    parts.append(
        f'<text x="10" y="{_fmt(_MARGIN + 10)}" font-family="monospace" '
        f'font-size="11">t={t_hi:.6g}</text>'
    )

    for line_id, factor_id, ts, xs in lines:
        if len(ts) == 0:
            continue
        color = _FACTOR_COLORS.get(factor_id, "#555555")
        coords = " ".join(
            f"{_fmt(u)},{_fmt(v)}" for u, v in (m.pt(x, t) for x, t in zip(xs, ts))
        )
        if len(ts) == 1:
            u, v = m.pt(xs[0], ts[0])
            parts.append(f'<circle cx="{_fmt(u)}" cy="{_fmt(v)}" r="1.5" fill="{color}"/>')
        else:
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.4"/>'
            )

    for kind, t, x, _ids in events:
        u, v = m.pt(x, t)
        color = _EVENT_STYLE.get(kind, "#000000")
        if kind == "creation":
            parts.append(
                f'<circle cx="{_fmt(u)}" cy="{_fmt(v)}" r="4" fill="none" '
                f'stroke="{color}" stroke-width="1.5"/>'
            )
        elif kind == "annihilation":
            parts.append(
                f'<path d="M {_fmt(u - 4)} {_fmt(v - 4)} L {_fmt(u + 4)} {_fmt(v + 4)} '
                f'M {_fmt(u - 4)} {_fmt(v + 4)} L {_fmt(u + 4)} {_fmt(v - 4)}" '
                f'stroke="{color}" stroke-width="1.5" fill="none"/>'
            )
        else:
            parts.append(f'<circle cx="{_fmt(u)}" cy="{_fmt(v)}" r="2" fill="{color}"/>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
