"""Static SVG and DOT renderings of diagrams and posets."""
from __future__ import annotations

from fractions import Fraction
from xml.sax.saxutils import escape

from .diagram import Diagram
from .order import Poset


def _num(x: Fraction | float) -> str:
    return f"{float(x):.3f}".rstrip("0").rstrip(".")


def diagram_svg(d: Diagram, scale: int = 60, margin: int = 20) -> str:
    """SVG 1.1 drawing with x = v - u and y = -(u + v); neon tubes drawn red and thicker."""
    xs = {e: (p[1] - p[0]) * scale for e, p in d.coords.items()}
    ys = {e: -(p[0] + p[1]) * scale for e, p in d.coords.items()}
    x0, x1 = min(xs.values()), max(xs.values())
    y0, y1 = min(ys.values()), max(ys.values())
    w = float(x1 - x0) + 2 * margin
    h = float(y1 - y0) + 2 * margin

    def X(e):
        return _num(xs[e] - x0 + margin)

    def Y(e):
        return _num(ys[e] - y0 + margin)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(w)}" height="{_num(h)}">',
    ]
    for a, b in sorted(d.covers):
        style = 'stroke="#c0392b" stroke-width="3"' if d.is_precipitous(a, b) else 'stroke="#333" stroke-width="1.5"'
        cls = "precipitous" if d.is_precipitous(a, b) else "normal"
        lines.append(f'  <line class="{cls}" x1="{X(a)}" y1="{Y(a)}" x2="{X(b)}" y2="{Y(b)}" {style}/>')
    for e in d.elements:
        lines.append(f'  <circle cx="{X(e)}" cy="{Y(e)}" r="4" fill="#fff" stroke="#000"><title>{escape(e)}</title></circle>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def diagram_dot(d: Diagram) -> str:
    lines = ["digraph lattice {", "  rankdir=BT;", "  node [shape=circle, label=\"\", width=0.15];"]
    for e in d.elements:
        u, v = d.coords[e]
        lines.append(f"  {_q(e)} [tooltip={_q(e)}, pos={_q(f'{_num(v - u)},{_num(u + v)}!')}];")
    for a, b in sorted(d.covers):
        attr = " [color=red, penwidth=2]" if d.is_precipitous(a, b) else ""
        lines.append(f"  {_q(a)} -> {_q(b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def poset_dot(p: Poset, name: str = "poset") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for e in p.elements:
        lines.append(f"  {_q(e)};")
    for a, b in p.covers:
        lines.append(f"  {_q(a)} -> {_q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
