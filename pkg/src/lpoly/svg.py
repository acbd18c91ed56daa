"""SVG 1.1 overlay of a Newton polygon on the Hodge polygon."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .polygon import NewtonPolygon
from .valuation import fmt_frac

W, H, M = 560, 400, 60


def render(np_: NewtonPolygon, hp: NewtonPolygon | None, title: str = "") -> str:
    xmax = max(np_.d - 1, 1)
    ys = [y for _, y in np_.vertices] + ([y for _, y in hp.vertices] if hp else [])
    ymax = max(max(ys), 1)

    def sx(x) -> float:
        return M + float(x) / xmax * (W - 2 * M)

    def sy(y) -> float:
        return H - M - float(y) / float(ymax) * (H - 2 * M)

    def path(poly: NewtonPolygon) -> str:
        return " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in poly.vertices)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{M}" y1="{H - M}" x2="{W - M}" y2="{H - M}" stroke="black"/>',
        f'<line x1="{M}" y1="{H - M}" x2="{M}" y2="{M}" stroke="black"/>',
    ]
    for n in range(np_.d):
        out.append(f'<text x="{sx(n):.2f}" y="{H - M + 18}" font-size="12" text-anchor="middle">{n}</text>')
    if title:
        out.append(f'<text x="{W / 2}" y="24" font-size="14" text-anchor="middle">{escape(title)}</text>')
    if hp is not None:
        out.append(
            f'<polyline id="hodge" points="{path(hp)}" fill="none" stroke="gray" stroke-width="2" stroke-dasharray="6,4"/>'
        )
        for x, y in hp.vertices:
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="gray"/>')
    out.append(f'<polyline id="newton" points="{path(np_)}" fill="none" stroke="#1f4e9c" stroke-width="2"/>')
    for x, y in np_.vertices:
        label = f"({x}, {fmt_frac(y)})"
        out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" fill="#1f4e9c"/>')
        out.append(f'<text x="{sx(x) + 6:.2f}" y="{sy(y) - 8:.2f}" font-size="12" fill="#1f4e9c">{escape(label)}</text>')
    out.append(f'<text x="{W - M}" y="{M - 20}" font-size="12" text-anchor="end" fill="#1f4e9c">NP (solid)</text>')
    if hp is not None:
        out.append(f'<text x="{W - M}" y="{M - 6}" font-size="12" text-anchor="end" fill="gray">HP (dashed)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
