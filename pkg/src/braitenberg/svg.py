"""Minimal SVG trajectory plot: one red polyline for the vehicle, one black for the mate."""

from __future__ import annotations

from typing import Sequence

Point = tuple[float, float]


def _points_attr(points: Sequence[Point]) -> str:
    # world y grows upward, SVG y grows downward
    return " ".join(f"{x:.4f},{-y:.4f}" for x, y in points)


def trajectory_svg(vehicle: Sequence[Point], mate: Sequence[Point], width: int = 600,
                   margin: float = 0.05, title: str | None = None) -> str:
    """Render both paths with a viewBox fitted to their joint bounding box."""
    pts = list(vehicle) + list(mate)
    if pts:
        xs = [p[0] for p in pts]
        ys = [-p[1] for p in pts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0 = x1 = y0 = y1 = 0.0
    span = max(x1 - x0, y1 - y0, 1e-9)
    pad = span * margin + 0.5
    vb_w, vb_h = (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad
    height = max(1, round(width * vb_h / vb_w))
    stroke = span / 300 + 0.05
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{x0 - pad:.4f} {y0 - pad:.4f} {vb_w:.4f} {vb_h:.4f}">',
    ]
    if title:
        lines.append(f"<title>{_escape(title)}</title>")
    lines.append(f'<polyline id="mate" fill="none" stroke="black" stroke-width="{stroke:.4f}" '
                 f'points="{_points_attr(mate)}"/>')
    lines.append(f'<polyline id="vehicle" fill="none" stroke="red" stroke-width="{stroke:.4f}" '
                 f'points="{_points_attr(vehicle)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def log_svg(log, title: str | None = None) -> str:
    return trajectory_svg([(r.xv, r.yv) for r in log.records], [(r.xm, r.ym) for r in log.records], title=title)


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
