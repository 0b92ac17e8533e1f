"""Static SVG drawings of storyline layouts."""
from __future__ import annotations

from typing import Iterable
from xml.sax.saxutils import escape, quoteattr

from .model import InvalidLayoutError, Layout, StorylineInstance, validate_layout

__all__ = ["render_svg", "PALETTE"]

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _f(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_svg(
    instance: StorylineInstance,
    layout: Layout,
    *,
    row_height: float = 24,
    step: float = 48,
    opacity: float = 0.25,
    highlight: Iterable[str] = (),
    labels: bool = True,
) -> str:
    """Draw one polyline per character and a translucent box per meeting.

    Characters in ``highlight`` (typically the inserted ones) are dash-dotted.
    """
    report = validate_layout(instance, layout)
    if report:
        raise InvalidLayoutError(report)
    highlight = frozenset(highlight)
    tau = instance.tau
    rows = max((len(layout.order(t)) for t in range(1, tau + 1)), default=0)
    left = 16 + (90 if labels else 0)
    top = 16
    width = left + max(tau - 1, 0) * step + 16
    height = top + max(rows - 1, 0) * row_height + 16

    def x(t: int) -> float:
        return left + (t - 1) * step

    def y(rank: int) -> float:
        return top + rank * row_height

    rank = {t: {c: i for i, c in enumerate(layout.order(t))} for t in range(1, tau + 1)}
    chars = sorted(instance.lifespans)
    color = {c: PALETTE[i % len(PALETTE)] for i, c in enumerate(chars)}

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_f(width)}" height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">',
        '<g class="meetings">',
    ]
    pad = 0.45 * row_height
    for m in instance.meetings:
        ranks = [rank[t][c] for t in range(m.begin, m.end + 1) for c in m.members]
        x0 = x(m.begin) - 0.2 * step
        x1 = x(m.end) + 0.2 * step
        y0 = y(min(ranks)) - pad
        y1 = y(max(ranks)) + pad
        out.append(
            f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" height="{_f(y1 - y0)}" '
            f'rx="4" fill="#888888" fill-opacity="{_f(opacity)}"/>'
        )
    out.append("</g>")
    out.append('<g class="characters" fill="none" stroke-width="2.5">')
    for c in chars:
        span = instance.lifespans[c]
        pts = []
        for t in range(span.first, span.last + 1):
            pts.append(f"{_f(x(t))},{_f(y(rank[t][c]))}")
        if len(pts) == 1:  # one-instant lifespans still get a visible stub
            t = span.first
            pts = [f"{_f(x(t) - 0.15 * step)},{_f(y(rank[t][c]))}",
                   f"{_f(x(t) + 0.15 * step)},{_f(y(rank[t][c]))}"]
        dash = ' stroke-dasharray="8 3 2 3"' if c in highlight else ""
        out.append(
            f'<polyline data-character={quoteattr(c)} points="{" ".join(pts)}" '
            f'stroke="{color[c]}"{dash}/>'
        )
    out.append("</g>")
    if labels:
        out.append('<g class="labels" font-family="sans-serif" font-size="11" text-anchor="end">')
        for c in chars:
            t = instance.lifespans[c].first
            out.append(
                f'<text x="{_f(x(t) - 0.25 * step)}" y="{_f(y(rank[t][c]) + 4)}" '
                f'fill="{color[c]}">{escape(c)}</text>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
