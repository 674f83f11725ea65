"""Deterministic SVG figures of square families with optional overlays."""

from __future__ import annotations

import math
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .geometry import Point, SquareFamily, vertices
from .patches import CIRCULAR, POLYGON, TRIANGLE, PatchCertificate

PALETTE = (
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4",
    "#f032e6", "#bfef45", "#469990", "#9a6324", "#800000", "#000075",
)
OUTLINE = "#333333"
POINT = "#000000"
PIVOT = "#ffd700"
SIZE = 512.0
PAD = 16.0


def _f(x: float) -> str:
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _View:
    def __init__(self, pts: list[tuple[float, float]]):
        if not pts:
            pts = [(0.0, 0.0), (1.0, 1.0)]
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        self.x0, self.y1 = min(xs), max(ys)
        span = max(max(xs) - self.x0, self.y1 - min(ys), 1e-9)
        self.k = (SIZE - 2 * PAD) / span

    def __call__(self, p) -> tuple[str, str]:
        # flip y so the figure reads with y up
        return _f(PAD + (p[0] - self.x0) * self.k), _f(PAD + (self.y1 - p[1]) * self.k)

    def length(self, r: float) -> str:
        return _f(r * self.k)


def _poly(view: _View, pts, **attrs) -> str:
    coords = " ".join(",".join(view(p)) for p in pts)
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<polygon points="{coords}"{extra}/>'


def _certificate_shapes(view: _View, cert, k: int) -> list[str]:
    colour = PALETTE[k % len(PALETTE)]
    style = dict(fill=colour, fill_opacity="0.2", stroke=colour, stroke_width="1")
    if isinstance(cert, PatchCertificate):
        if cert.kind == TRIANGLE:
            return [_poly(view, cert.region["triangle"], **style)]
        if cert.kind == CIRCULAR:
            cx, cy = view(cert.region["centre"])
            return [f'<circle cx="{cx}" cy="{cy}" r="{view.length(cert.region["radius"])}" '
                    f'fill="{colour}" fill-opacity="0.2" stroke="{colour}"/>']
        if cert.kind == POLYGON:
            return [_poly(view, cert.region["ring"], **style)]
        return []
    if isinstance(cert, dict) and cert.get("kind") == "halfdisk":
        # boundary of {|q - c| <= r, (q - c).u >= 0}
        c, r, u = cert["centre"], cert["radius"], cert.get("direction", (1.0, 0.0))
        a0 = math.atan2(u[1], u[0])
        arc = [(c[0] + r * math.cos(a0 - math.pi / 2 + math.pi * i / 32),
                c[1] + r * math.sin(a0 - math.pi / 2 + math.pi * i / 32)) for i in range(33)]
        return [_poly(view, arc, fill="none", stroke=colour, stroke_width="1.5", stroke_dasharray="4 3")]
    if isinstance(cert, dict) and cert.get("kind") == "disk":
        cx, cy = view(cert["centre"])
        return [f'<circle cx="{cx}" cy="{cy}" r="{view.length(cert["radius"])}" '
                f'fill="{colour}" fill-opacity="0.2" stroke="{colour}"/>']
    return []


def _extent(cert) -> list[tuple[float, float]]:
    if isinstance(cert, PatchCertificate):
        if cert.kind == CIRCULAR:
            (x, y), r = cert.region["centre"], cert.region["radius"]
            return [(x - r, y - r), (x + r, y + r)]
        return [tuple(p) for key in ("triangle", "ring") for p in cert.region.get(key, ())]
    if isinstance(cert, dict) and "centre" in cert:
        (x, y), r = cert["centre"], cert["radius"]
        return [(x - r, y - r), (x + r, y + r)]
    return []


def render_svg(
    fam: SquareFamily,
    points: Optional[Sequence] = None,
    colouring: Optional[Sequence[int]] = None,
    certificates: Optional[Sequence] = None,
    pivots: Optional[Sequence[int]] = None,
    point_labels: Optional[Sequence[str]] = None,
) -> bytes:
    """Squares outlined (filled by colour class when a colouring is given),
    pivots highlighted, hitting points as labelled dots, certificate regions
    as translucent shapes."""
    points = [Point(p[0], p[1]) for p in (points or [])]
    certificates = list(certificates or [])
    pivots = set(pivots or [])
    polys = [vertices(s) for s in fam]
    extent = [tuple(v) for poly in polys for v in poly] + [tuple(p) for p in points]
    for c in certificates:
        extent += _extent(c)
    view = _View(extent)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(SIZE)}" height="{_f(SIZE)}" '
        f'viewBox="0 0 {_f(SIZE)} {_f(SIZE)}">',
        f'<rect width="{_f(SIZE)}" height="{_f(SIZE)}" fill="#ffffff"/>',
    ]
    for k, c in enumerate(certificates):
        out.extend(_certificate_shapes(view, c, k))
    for i, poly in enumerate(polys):
        if colouring is not None:
            colour = PALETTE[int(colouring[i]) % len(PALETTE)]
            attrs = dict(fill=colour, fill_opacity="0.25", stroke=colour, stroke_width="1.5")
        else:
            attrs = dict(fill="none", stroke=OUTLINE, stroke_width="1")
        if i in pivots:
            attrs.update(stroke=PIVOT, stroke_width="3")
        out.append(_poly(view, poly, **attrs))
    for j, p in enumerate(points):
        x, y = view(p)
        label = escape(point_labels[j]) if point_labels is not None else str(j + 1)
        out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{POINT}"/>')
        out.append(f'<text x="{x}" y="{y}" dx="4" dy="-4" font-size="10" font-family="monospace">{label}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode()
