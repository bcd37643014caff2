"""Plain-text SVG rendering of a circuit with its Stencil overlay."""
from __future__ import annotations

import math

from .geometry import Circuit
from .stencil import Stencil

ROLE_COLOURS = {"input": "#1f77b4", "output": "#d62728", "helper": "#7f7f7f"}


def _f(x: float) -> str:
    return f"{x:.6g}"


def render_stencil_svg(circuit: Circuit, stencil: Stencil, px: float = 600.0) -> str:
    side = circuit.substrate.side_length_l
    margin = 0.5
    scale = px / (side + 2 * margin)

    def X(x):
        return _f((x + margin) * scale)

    def Y(y):  # lattice y grows upward
        return _f((side - y + margin) * scale)

    size = _f(px)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect x="{X(0)}" y="{Y(side)}" width="{_f(side * scale)}" height="{_f(side * scale)}" '
           f'fill="#fafafa" stroke="black"/>']
    a = stencil.a
    lo_i = math.floor((0 - stencil.origin[0]) / a) - 1
    hi_i = math.ceil((side - stencil.origin[0]) / a) + 1
    lo_j = math.floor((0 - stencil.origin[1]) / a) - 1
    hi_j = math.ceil((side - stencil.origin[1]) / a) + 1
    out.append('<g fill="none" clip-path="none">')
    for i in range(lo_i, hi_i + 1):
        for j in range(lo_j, hi_j + 1):
            for rect, style in ((stencil.outer_rect((i, j)), 'stroke="#999" stroke-dasharray="4 3"'),
                                (stencil.inner_rect((i, j)), 'stroke="#2ca02c" fill="#2ca02c" fill-opacity="0.12"')):
                x0, y0 = max(rect.x0, 0), max(rect.y0, 0)
                x1, y1 = min(rect.x1, side), min(rect.y1, side)
                if x1 <= x0 or y1 <= y0:
                    continue
                out.append(f'<rect x="{X(x0)}" y="{Y(y1)}" width="{_f((x1 - x0) * scale)}" '
                           f'height="{_f((y1 - y0) * scale)}" {style}/>')
    out.append("</g>")
    r = _f(max(1.5, 0.18 * scale))
    for n in sorted(circuit.nodes, key=lambda n: n.id):
        out.append(f'<circle cx="{X(n.pos[0])}" cy="{Y(n.pos[1])}" r="{r}" '
                   f'fill="{ROLE_COLOURS[n.role]}"><title>{n.id} {n.role}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
