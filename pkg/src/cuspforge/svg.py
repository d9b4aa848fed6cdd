"""Static SVG pictures of packings and of the rectangle seen at a tangency.

Output is plain text with fixed number formatting, so it is byte-stable for a
fixed packing.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .diagram import CROSSING_CIRCLE
from .packing import CirclePacking, _edge_lines, dual_circle

_HEAD = '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="{x:.6f} {y:.6f} {vw:.6f} {vh:.6f}">\n'


def _num(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def packing_svg(p: CirclePacking, size: int = 640, show_dual: bool = True, labels: bool = True) -> str:
    """The packing in its gauge, with dual circles dashed and circle labels."""
    c, r = p.centers, p.radii
    lo = min((c.real - r).min(), (-c.imag - r).min())
    hi = max((c.real + r).max(), (-c.imag + r).max())
    pad = 0.05 * (hi - lo)
    span = hi - lo + 2 * pad
    out = [_HEAD.format(w=size, h=size, x=lo - pad, y=lo - pad, vw=span, vh=span)]
    stroke = span / size
    out.append(f'<g fill="none" stroke="black" stroke-width="{_num(stroke)}">\n')
    for k in range(len(r)):
        # flip y so counterclockwise reads counterclockwise on screen
        out.append(f'<circle cx="{_num(c[k].real)}" cy="{_num(-c[k].imag)}" r="{_num(r[k])}"/>\n')
    out.append("</g>\n")
    if show_dual:
        out.append(f'<g fill="none" stroke="gray" stroke-dasharray="{_num(4 * stroke)}" stroke-width="{_num(stroke)}">\n')
        for f in range(p.nerve.num_faces):
            if f == p.gauge_face:
                continue
            d = dual_circle(p, f)
            out.append(f'<circle cx="{_num(d.center.real)}" cy="{_num(-d.center.imag)}" r="{_num(d.radius)}"/>\n')
        out.append("</g>\n")
    if labels:
        fs = 12 * stroke
        out.append(f'<g font-family="sans-serif" font-size="{_num(fs)}" text-anchor="middle">\n')
        for k, lab in enumerate(p.nerve.labels):
            out.append(f'<text x="{_num(c[k].real)}" y="{_num(-c[k].imag)}">{escape(lab)}</text>\n')
        out.append("</g>\n")
    out.append("</svg>\n")
    return "".join(out)


def rectangle_svg(p: CirclePacking, e: int | str, periods: float = 1.5, size: int = 640) -> str:
    """Strip between the two white lines at edge ``e`` with the images of the other circles.

    The picture is rotated so the white lines are horizontal and scaled so
    the shaded side has length 1.
    """
    nv = p.nerve
    if isinstance(e, str):
        e = nv.edge_ids.index(e)
    P, Q = (int(x) for x in nv.edges[e])
    inv, white, shaded = _edge_lines(p, e)
    rot = 1j * white[0].normal.conjugate()  # white normal -> vertical
    s = abs(white[0].offset - np.sign((white[0].normal.conjugate() * white[1].normal).real) * white[1].offset)
    scale = 1.0 / s

    def tr(z):
        return z * rot * scale

    # images of the white lines: horizontal at these heights
    y0 = tr(white[0].normal * white[0].offset).imag
    y1 = tr(white[1].normal * white[1].offset).imag
    x0 = tr(shaded[0].normal * shaded[0].offset).real
    x1 = tr(shaded[1].normal * shaded[1].offset).real
    ylo, yhi = min(y0, y1), max(y0, y1)
    xlo, xhi = min(x0, x1), max(x0, x1)
    w = xhi - xlo
    cx = 0.5 * (xlo + xhi)
    half = 0.5 * periods * max(w, 1.0)
    vx, vw = cx - half, 2 * half
    out = [_HEAD.format(w=size, h=int(size * (yhi - ylo + 0.2) / vw) or 1, x=vx, y=-yhi - 0.1, vw=vw, vh=yhi - ylo + 0.2)]
    stroke = vw / size
    out.append(f'<g stroke="black" stroke-width="{_num(stroke)}">\n')
    for y in (ylo, yhi):
        out.append(f'<line x1="{_num(vx)}" y1="{_num(-y)}" x2="{_num(vx + vw)}" y2="{_num(-y)}"/>\n')
    out.append("</g>\n")
    out.append(f'<g stroke="gray" stroke-dasharray="{_num(4 * stroke)}" stroke-width="{_num(stroke)}">\n')
    for x in (xlo, xhi):
        out.append(f'<line x1="{_num(x)}" y1="{_num(-ylo)}" x2="{_num(x)}" y2="{_num(-yhi)}"/>\n')
    out.append("</g>\n")
    out.append(f'<g fill="none" stroke="black" stroke-width="{_num(stroke)}">\n')
    for k, circ in enumerate(p.circles):
        if k in (P, Q):
            continue
        img = inv.image(circ)
        if img.is_line:
            continue
        z = tr(img.center)
        rr = img.radius * scale
        if z.real + rr < vx or z.real - rr > vx + vw:
            continue
        out.append(f'<circle cx="{_num(z.real)}" cy="{_num(-z.imag)}" r="{_num(rr)}"/>\n')
    out.append("</g>\n")
    kind = "crossing circle" if nv.classification[e] == CROSSING_CIRCLE else "strand"
    out.append(f"<!-- edge {escape(nv.edge_ids[e])} ({kind}): white {w:.12g}, shaded 1 -->\n")
    out.append("</svg>\n")
    return "".join(out)

