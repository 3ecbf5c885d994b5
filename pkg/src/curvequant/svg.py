"""Static SVG pictures of a support curve, its generators and the cell boundaries."""

from __future__ import annotations

import numpy as np

from curvequant.curves import Curve, build_curve
from curvequant.document import ResultDocument

SIZE = 480.0
MARGIN = 24.0
PATH_SAMPLES = 256


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def render(doc: ResultDocument, show_boundaries: bool = False) -> str:
    curve = build_curve(doc.curve)
    return render_curve(curve, np.asarray(doc.points, dtype=float).reshape(-1, 2),
                        doc.boundary_params if show_boundaries else ())


def render_curve(curve: Curve, points, boundaries=()) -> str:
    polylines = [
        seg.point(np.linspace(0.0, 1.0, 2 if seg.kind == "line" else PATH_SAMPLES + 1))
        for seg in curve.segments
    ]
    allpts = np.vstack(polylines + [points])
    lo, hi = allpts.min(0), allpts.max(0)
    span = max(float((hi - lo).max()), 1e-12)
    scale = (SIZE - 2 * MARGIN) / span
    width = (hi[0] - lo[0]) * scale + 2 * MARGIN
    height = (hi[1] - lo[1]) * scale + 2 * MARGIN

    def tx(p):
        # flip y so the picture has the usual orientation
        return MARGIN + (p[0] - lo[0]) * scale, height - MARGIN - (p[1] - lo[1]) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for poly in polylines:
        coords = [tx(p) for p in poly]
        d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in coords)
        out.append(f'<path d="{d}" fill="none" stroke="black" stroke-width="1.5"/>')
    for seg, t in boundaries:
        p = curve.segments[int(seg)].point(np.array([t]))[0]
        tan = curve.segments[int(seg)].tangent(np.array([t]))[0]
        nrm = np.array([-tan[1], tan[0]]) / max(float(np.hypot(*tan)), 1e-300)
        a, b = tx(p - 6.0 / scale * nrm), tx(p + 6.0 / scale * nrm)
        out.append(
            f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" x2="{_fmt(b[0])}" y2="{_fmt(b[1])}" '
            'stroke="red" stroke-width="1"/>'
        )
    for p in points:
        x, y = tx(p)
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
