import xml.etree.ElementTree as ET

from lamplab.order import chain
from lamplab.render import diagram_dot, diagram_svg, poset_dot


def test_svg_is_well_formed(s7):
    svg = diagram_svg(s7)
    root = ET.fromstring(svg.split("\n", 1)[1])
    ns = "{http://www.w3.org/2000/svg}"
    circles = root.findall(f"{ns}circle")
    lines = root.findall(f"{ns}line")
    assert len(circles) == 7 and len(lines) == len(s7.covers)
    assert sum(1 for ln in lines if ln.get("class") == "precipitous") == 1


def test_dot_outputs(s7):
    dot = diagram_dot(s7)
    assert dot.startswith("digraph lattice {") and dot.count("->") == len(s7.covers)
    assert dot.count("color=red") == 1
    p = poset_dot(chain(3))
    assert p.count("->") == 2
