"""SVG rendering of an instance and a solution."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .instance import Instance
from .solution import Solution, vertex_sequence

__all__ = ["plot_solution", "ROUTE_COLORS"]

ROUTE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")

_SIZE = 640.0
_MARGIN = 24.0


def plot_solution(solution: Solution, points, instance: Instance, title: str | None = None) -> str:
    """SVG document showing the depot, disks, required edges and routes.

    ``points`` may be None, in which case routes pass through node centers.
    Disks are drawn only for nodes with a positive radius.
    """
    xs = [instance.depot[0]] + [n.center[0] for n in instance.nodes]
    ys = [instance.depot[1]] + [n.center[1] for n in instance.nodes]
    for e in instance.edges:
        xs += [e.a[0], e.b[0]]
        ys += [e.a[1], e.b[1]]
    pad = max([n.radius for n in instance.nodes], default=0.0)
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    span = max(x1 - x0, y1 - y0, 1e-9)
    k = (_SIZE - 2 * _MARGIN) / span

    def tx(x):
        return _MARGIN + (x - x0) * k

    def ty(y):
        # SVG y grows downwards
        return _SIZE - _MARGIN - (y - y0) * k

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=f"{_SIZE:g}",
                     height=f"{_SIZE:g}", viewBox=f"0 0 {_SIZE:g} {_SIZE:g}")
    ET.SubElement(svg, "rect", width="100%", height="100%", fill="white")
    if title:
        ET.SubElement(svg, "title").text = title

    g = ET.SubElement(svg, "g", {"class": "disks"})
    for n in instance.nodes:
        if n.radius > 0:
            ET.SubElement(g, "circle", cx=f"{tx(n.center[0]):.3f}", cy=f"{ty(n.center[1]):.3f}",
                          r=f"{n.radius * k:.3f}", fill="none", stroke="#888888",
                          **{"stroke-dasharray": "4 3", "stroke-width": "1"})
    g = ET.SubElement(svg, "g", {"class": "edges"})
    for e in instance.edges:
        ET.SubElement(g, "line", x1=f"{tx(e.a[0]):.3f}", y1=f"{ty(e.a[1]):.3f}",
                      x2=f"{tx(e.b[0]):.3f}", y2=f"{ty(e.b[1]):.3f}", stroke="black",
                      **{"stroke-width": "3.5", "stroke-linecap": "round"})
    g = ET.SubElement(svg, "g", {"class": "nodes"})
    for n in instance.nodes:
        ET.SubElement(g, "circle", cx=f"{tx(n.center[0]):.3f}", cy=f"{ty(n.center[1]):.3f}",
                      r="2.5", fill="black")
    g = ET.SubElement(svg, "g", {"class": "routes"})
    for i, route in enumerate(solution.routes):
        pts = points[i] if points is not None else [d.center for d in vertex_sequence(route, instance)]
        ET.SubElement(g, "polyline", points=" ".join(f"{tx(p[0]):.3f},{ty(p[1]):.3f}" for p in pts),
                      fill="none", stroke=ROUTE_COLORS[i % len(ROUTE_COLORS)],
                      **{"stroke-width": "1.6", "stroke-linejoin": "round"})
    dx, dy = tx(instance.depot[0]), ty(instance.depot[1])
    ET.SubElement(svg, "rect", {"class": "depot", "x": f"{dx - 6:.3f}", "y": f"{dy - 6:.3f}",
                                "width": "12", "height": "12", "fill": "#ffcc00", "stroke": "black"})
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"
