"""Small hand-rolled SVG emitters for run artifacts.

Two pictures are enough for this package: a growth curve plotted against
the radius, and a unit-disk overlay showing lifted paths together with the
contact ray.  Both return complete SVG documents as strings so callers can
write them wherever the report lands.
"""

from __future__ import annotations

from typing import Iterable, Sequence

_PALETTE = (
    "#1f6fb2",
    "#b2541f",
    "#3c8a4e",
    "#8a3c7e",
    "#6b6b23",
    "#23666b",
)


def _fmt(x: float) -> str:
    s = f"{x:.2f}"
    return s.rstrip("0").rstrip(".") if "." in s else s


def _polyline(points: Sequence[tuple[float, float]], color: str, width: float = 1.4) -> str:
    pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in points)
    return (
        f'<polyline points="{pts}" fill="none" stroke="{color}" '
        f'stroke-width="{width}"/>'
    )


def growth_curve(
    rs: Sequence[float],
    values: Sequence[float],
    *,
    below: Sequence[bool] | None = None,
    title: str = "",
    width: int = 520,
    height: int = 340,
) -> str:
    """Plot a mean coverage curve with the level-one threshold marked.

    Points flagged in ``below`` (default: strictly under one) are drawn as
    filled red markers so a glance at the file shows where the curve loses
    its lower bound.
    """
    if len(rs) != len(values) or not rs:
        raise ValueError("need matching nonempty r and value sequences")
    if below is None:
        below = [v < 1.0 for v in values]
    if len(below) != len(rs):
        raise ValueError("below flags must match the sample count")
    ml, mr, mt, mb = 58, 16, 34, 42
    pw, ph = width - ml - mr, height - mt - mb
    lo = min(min(values), 1.0)
    hi = max(max(values), 1.0)
    pad = 0.08 * (hi - lo) or 0.1
    lo, hi = lo - pad, hi + pad

    def sx(r: float) -> float:
        return ml + pw * (r - rs[0]) / (rs[-1] - rs[0] or 1.0)

    def sy(v: float) -> float:
        return mt + ph * (hi - v) / (hi - lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#444" stroke-width="1"/>',
    ]
    if title:
        out.append(
            f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="monospace" font-size="13">{title}</text>'
        )
    for k in range(5):
        v = lo + (hi - lo) * k / 4
        y = sy(v)
        out.append(
            f'<line x1="{ml}" y1="{y:.2f}" x2="{ml + pw}" y2="{y:.2f}" '
            'stroke="#ddd" stroke-width="0.7"/>'
        )
        out.append(
            f'<text x="{ml - 6}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="monospace" font-size="11">{_fmt(v)}</text>'
        )
    for k in range(5):
        r = rs[0] + (rs[-1] - rs[0]) * k / 4
        x = sx(r)
        out.append(
            f'<text x="{x:.2f}" y="{mt + ph + 16}" text-anchor="middle" '
            f'font-family="monospace" font-size="11">{_fmt(r)}</text>'
        )
    out.append(
        f'<text x="{ml + pw / 2:.0f}" y="{height - 8}" text-anchor="middle" '
        'font-family="monospace" font-size="11">r</text>'
    )
    y1 = sy(1.0)
    out.append(
        f'<line x1="{ml}" y1="{y1:.2f}" x2="{ml + pw}" y2="{y1:.2f}" '
        'stroke="#c22" stroke-width="1" stroke-dasharray="5,4"/>'
    )
    out.append(_polyline([(sx(r), sy(v)) for r, v in zip(rs, values)], _PALETTE[0], 1.6))
    for r, v, dip in zip(rs, values, below):
        if dip:
            out.append(
                f'<circle cx="{sx(r):.2f}" cy="{sy(v):.2f}" r="3.2" fill="#c22"/>'
            )
        else:
            out.append(
                f'<circle cx="{sx(r):.2f}" cy="{sy(v):.2f}" r="2.2" fill="{_PALETTE[0]}"/>'
            )
    out.append("</svg>")
    return "\n".join(out)


def disk_overlay(
    paths: Iterable[Sequence[complex]],
    *,
    contact: complex | None = None,
    title: str = "",
    size: int = 460,
) -> str:
    """Draw polylines inside the closed unit disk.

    Each entry of ``paths`` is a sequence of complex points with modulus at
    most one.  The optional contact ray is drawn from the origin.
    """
    m = 26
    c = size / 2
    rad = c - m

    def pt(z: complex) -> tuple[float, float]:
        return (c + rad * z.real, c - rad * z.imag)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<circle cx="{c}" cy="{c}" r="{rad}" fill="none" stroke="#444" stroke-width="1.2"/>',
        f'<line x1="{c - rad}" y1="{c}" x2="{c + rad}" y2="{c}" stroke="#eee" stroke-width="0.8"/>',
        f'<line x1="{c}" y1="{c - rad}" x2="{c}" y2="{c + rad}" stroke="#eee" stroke-width="0.8"/>',
    ]
    if title:
        out.append(
            f'<text x="{c:.0f}" y="17" text-anchor="middle" '
            f'font-family="monospace" font-size="12">{title}</text>'
        )
    if contact is not None:
        x, y = pt(contact)
        out.append(
            f'<line x1="{c}" y1="{c}" x2="{x:.2f}" y2="{y:.2f}" '
            'stroke="#c22" stroke-width="1.4" stroke-dasharray="3,3"/>'
        )
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="#c22"/>')
    for i, path in enumerate(paths):
        pts = [pt(z) for z in path]
        if len(pts) < 2:
            continue
        color = _PALETTE[i % len(_PALETTE)]
        out.append(_polyline(pts, color, 1.1))
        out.append(f'<circle cx="{pts[0][0]:.2f}" cy="{pts[0][1]:.2f}" r="2" fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out)
