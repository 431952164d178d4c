"""Deterministic SVG drawing of planar certificates."""
from __future__ import annotations

from xml.sax.saxutils import escape

from .shapes import Ball, Brick, Funnel, Homothet, placed_vertices
from .verify import PackingCertificate, exact_box

PAD = 0.05


def _fmt(v: float) -> str:
    s = f"{float(v):.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _target_outline(target, scale=1.0):
    """SVG elements (in model coordinates) and the target bbox, or None when unbounded."""
    if isinstance(target, Homothet):
        return _target_outline(target.base, scale * float(target.lam))
    if isinstance(target, Brick):
        w, h = (float(d) * scale for d in target.dims)
        el = f'<rect class="target" x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}"/>'
        return [el], (0.0, 0.0, w, h)
    if isinstance(target, Ball):
        r = float(target.radius) * scale
        return [f'<circle class="target" cx="0" cy="0" r="{_fmt(r)}"/>'], (-r, -r, r, r)
    if isinstance(target, Funnel):
        return None, None
    raise TypeError(f"cannot draw {target!r}")


def _funnel_outline(scale: float, x_max: float) -> str:
    xs = [scale * (1 + (x_max / scale - 1) * k / 200) for k in range(201)]
    upper = [(x, scale - scale * scale / x) for x in xs]
    pts = upper + [(x, -y) for x, y in reversed(upper)]
    return '<polyline class="target" points="' + " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts) + '"/>'


def render_svg(cert: PackingCertificate, pixels: int = 800) -> str:
    if cert.dim != 2:
        raise ValueError("only planar certificates can be rendered")
    pieces = cert.collection.by_id()
    shapes = []
    xs, ys = [], []
    for pid, sigma in cert.placements:
        piece = pieces[pid]
        box = exact_box(sigma, piece)
        if box is not None:
            (x0, y0), (x1, y1) = [[float(v) for v in c] for c in box]
            el = (f'<rect class="piece" x="{_fmt(x0)}" y="{_fmt(y0)}" '
                  f'width="{_fmt(x1 - x0)}" height="{_fmt(y1 - y0)}"/>')
            pts = [(x0, y0), (x1, y1)]
        else:
            v = [tuple(float(c) for c in p) for p in placed_vertices(sigma, piece)]
            ring = [v[0], v[1], v[3], v[2]]
            el = '<polygon class="piece" points="' + " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in ring) + '"/>'
            pts = ring
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        xs += [p[0] for p in pts]
        ys += [p[1] for p in pts]
        size = min(float(d) for d in piece.dims) * 0.5
        shapes.append((el, pid, cx, cy, size))

    outline, bbox = _target_outline(cert.target)
    if bbox is None:
        scale = float(cert.target.lam) if isinstance(cert.target, Homothet) else 1.0
        x_max = max(xs + [2.0 * scale])
        outline = [_funnel_outline(scale, x_max)]
        bbox = (scale, -scale, x_max, scale)
    x0, y0, x1, y1 = bbox
    w, h = x1 - x0, y1 - y0
    x0, y0, w, h = x0 - PAD * w, y0 - PAD * h, w * (1 + 2 * PAD), h * (1 + 2 * PAD)
    height_px = max(1, round(pixels * h / w))
    stroke = max(w, h) / 1000

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{pixels}" height="{height_px}" '
        f'viewBox="{_fmt(x0)} {_fmt(-(y0 + h))} {_fmt(w)} {_fmt(h)}">',
        "<style>.target{fill:none;stroke:#000}.piece{fill:#9cc3e6;stroke:#1f4e79}"
        "text{fill:#000;text-anchor:middle;dominant-baseline:middle}</style>",
        f'<g transform="scale(1,-1)" stroke-width="{_fmt(stroke)}">',
    ]
    out += outline
    for el, *_ in shapes:
        out.append(el)
    out.append("</g>")
    for _, pid, cx, cy, size in shapes:
        fs = _fmt(max(size, 1e-6))
        out.append(f'<text x="{_fmt(cx)}" y="{_fmt(-cy)}" font-size="{fs}">{escape(str(pid))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

