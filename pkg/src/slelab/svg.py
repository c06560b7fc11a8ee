"""Self-contained SVG emission: traces, circle families, log-log fits.

Hand-rolled so figures need no renderer dependency; every function writes
a standalone SVG 1.1 document with a single root element.
"""

from __future__ import annotations

import math

__all__ = ["polyline_svg", "circles_svg", "loglog_svg"]

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _doc(width, height, body, title):
    return (
        _HEADER
        + f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f"<title>{title}</title>\n"
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        + body
        + "</svg>\n"
    )


def _fit_box(xs, ys, width, height, pad):
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    s = min((width - 2 * pad) / (x1 - x0), (height - 2 * pad) / (y1 - y0))

    def to_px(x, y):
        return (pad + (x - x0) * s, height - pad - (y - y0) * s)

    return to_px


def polyline_svg(points, path, title="trace", width=640, height=640):
    """One polyline through the complex points, plus the real axis."""
    xs = [z.real for z in points]
    ys = [z.imag for z in points]
    to_px = _fit_box(xs + [0], ys + [0], width, height, 20)
    pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in (to_px(x, y) for x, y in zip(xs, ys)))
    ax0 = to_px(min(xs + [0]), 0)
    ax1 = to_px(max(xs + [0]), 0)
    body = (
        f'<line x1="{ax0[0]:.1f}" y1="{ax0[1]:.1f}" x2="{ax1[0]:.1f}" y2="{ax1[1]:.1f}" '
        'stroke="#999" stroke-width="1"/>\n'
        f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="1"/>\n'
    )
    with open(path, "w") as fh:
        fh.write(_doc(width, height, body, title))


_RUN_COLORS = ["#1f4e9c", "#b0321f", "#2a7d36", "#8a56c2", "#c28b1f", "#1f8a96"]


def circles_svg(records, path, title="circle family", width=640, height=640):
    """Circle-family records (owner, center, radius, run) as stroked circles."""
    xs, ys = [0.0], [0.0]
    for rec in records:
        cx, cy = rec["center"]
        r = rec["radius"]
        xs += [cx - r, cx + r]
        ys += [cy - r, cy + r]
    to_px = _fit_box(xs, ys, width, height, 20)
    scale_x = to_px(1.0, 0.0)[0] - to_px(0.0, 0.0)[0]
    body = ""
    ox, oy = to_px(0.0, 0.0)
    body += f'<circle cx="{ox:.1f}" cy="{oy:.1f}" r="3" fill="#000"/>\n'
    for rec in records:
        cx, cy = rec["center"]
        px, py = to_px(cx, cy)
        col = _RUN_COLORS[rec["run"] % len(_RUN_COLORS)]
        body += (
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{rec["radius"] * scale_x:.2f}" '
            f'fill="none" stroke="{col}" stroke-width="1"/>\n'
        )
    with open(path, "w") as fh:
        fh.write(_doc(width, height, body, title))


def loglog_svg(xs, ys, path, yerr=None, fit=None, title="log-log fit",
               xlabel="r", ylabel="p", width=640, height=480):
    """Scatter of (xs, ys) on log-log axes with an optional fitted power law.

    fit: (slope, intercept) of log y = slope * log x + intercept.
    """
    lx = [math.log10(x) for x in xs]
    ly = [math.log10(y) for y in ys]
    to_px = _fit_box(lx, ly, width, height, 48)
    body = ""
    # axes frame
    x0, y0 = to_px(min(lx), min(ly))
    x1, y1 = to_px(max(lx), max(ly))
    body += (
        f'<rect x="{min(x0, x1):.1f}" y="{min(y0, y1):.1f}" '
        f'width="{abs(x1 - x0):.1f}" height="{abs(y1 - y0):.1f}" '
        'fill="none" stroke="#ccc"/>\n'
    )
    if fit is not None:
        # fit is in natural logs: log y = slope * log x + intercept, so on
        # decimal axes log10 y = slope * log10 x + intercept / ln 10
        slope, intercept = fit
        lo, hi = min(lx), max(lx)
        y_lo = slope * lo + intercept / math.log(10)
        y_hi = slope * hi + intercept / math.log(10)
        p0 = to_px(lo, y_lo)
        p1 = to_px(hi, y_hi)
        body += (
            f'<line x1="{p0[0]:.1f}" y1="{p0[1]:.1f}" x2="{p1[0]:.1f}" y2="{p1[1]:.1f}" '
            'stroke="#b0321f" stroke-width="1.5"/>\n'
        )
    for i, (px, py) in enumerate(to_px(a, b) for a, b in zip(lx, ly)):
        if yerr is not None and ys[i] > 0 and yerr[i] > 0:
            hi = math.log10(ys[i] + yerr[i])
            lo_v = max(ys[i] - yerr[i], ys[i] * 1e-3)
            lo = math.log10(lo_v)
            _, pyh = to_px(lx[i], hi)
            _, pyl = to_px(lx[i], lo)
            body += (
                f'<line x1="{px:.1f}" y1="{pyh:.1f}" x2="{px:.1f}" y2="{pyl:.1f}" '
                'stroke="#555" stroke-width="1"/>\n'
            )
        body += f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3.5" fill="#1f4e9c"/>\n'
    body += (
        f'<text x="{width / 2:.0f}" y="{height - 10}" text-anchor="middle" '
        f'font-size="13">{xlabel} (log)</text>\n'
        f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {height / 2:.0f})">{ylabel} (log)</text>\n'
    )
    with open(path, "w") as fh:
        fh.write(_doc(width, height, body, title))
