"""Deterministic SVG snapshots of planar flapped-pair frames."""
from __future__ import annotations

from pathlib import Path

from .errors import DimensionError
from .flaps import FLAP, VERTEX, FlapSpec
from .motion import MotionSample

CANVAS = 800
SCALE = 200.0  # canvas pixels per world unit, origin at the canvas centre
INWARD_COLOR = "#1f77b4"
OUTWARD_COLOR = "#d62728"


def _xy(pt) -> tuple[str, str]:
    x = CANVAS / 2 + SCALE * float(pt[0])
    y = CANVAS / 2 - SCALE * float(pt[1])
    return f"{x:.3f}", f"{y:.3f}"


def render_frame(sample: MotionSample, spec: FlapSpec, t: float) -> str:
    """SVG text for the first-two-coordinate projection of the frame at ``t``.

    Flap points on the simplex side of their face are drawn in the inward
    colour (label ``b``), the others in the outward colour (label ``c``).
    """
    if spec.d != 2:
        raise DimensionError(f"snapshots support d = 2 only, got d = {spec.d}")
    cfg = sample.frame_at(t)
    pts = cfg.coords[:, :2]
    u = spec.simplex.vertices
    n = spec.simplex.normals
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>',
        f'<text x="20" y="30" font-family="monospace" font-size="16">t = {t:.4f}, s = {spec.s:.4f}</text>',
    ]
    verts = {lab.i: pts[k] for k, lab in enumerate(cfg.labels) if lab.kind == VERTEX}
    for i in range(3):
        for j in range(i + 1, 3):
            (x1, y1), (x2, y2) = _xy(verts[i]), _xy(verts[j])
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black" stroke-width="2"/>')
    flaps = {}
    for k, lab in enumerate(cfg.labels):
        if lab.kind == FLAP:
            flaps.setdefault(lab.i, []).append((lab, pts[k]))
    for i in sorted(flaps):
        (la, a), (lb, b) = flaps[i]
        (x1, y1), (x2, y2) = _xy(a), _xy(b)
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="gray" stroke-dasharray="6 4"/>')
        for lab, pt in flaps[i]:
            inward = float((pt - u[lab.j]) @ n[lab.i]) <= 0.0
            color = INWARD_COLOR if inward else OUTWARD_COLOR
            name = f"{'b' if inward else 'c'}{lab.i}{lab.j}"
            (vx, vy), (px, py) = _xy(u[lab.j]), _xy(pt)
            out.append(f'<line x1="{vx}" y1="{vy}" x2="{px}" y2="{py}" stroke="{color}" stroke-width="1"/>')
            out.append(f'<circle cx="{px}" cy="{py}" r="5" fill="{color}"/>')
            out.append(f'<text x="{px}" y="{py}" dx="7" dy="-7" font-family="monospace" '
                       f'font-size="12" fill="{color}">{name}</text>')
    for i in sorted(verts):
        x, y = _xy(verts[i])
        out.append(f'<circle cx="{x}" cy="{y}" r="6" fill="black"/>')
        out.append(f'<text x="{x}" y="{y}" dx="8" dy="16" font-family="monospace" font-size="14">u{i}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_snapshot(sample: MotionSample, spec: FlapSpec, t: float, path) -> Path:
    path = Path(path)
    path.write_text(render_frame(sample, spec, t), encoding="utf-8")
    return path

