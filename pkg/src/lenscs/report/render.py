"""Scene descriptions for fans, webs and eigenvalue cuts, drawn to SVG by matplotlib.

A :class:`SvgScene` is a plain list of primitives in data coordinates.  The
builders below are deterministic; :func:`write_svg` hands the scene to
matplotlib with a fixed hash salt and no timestamp so the bytes repeat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..lattice import LatticeFan, PQWeb, Triangulation, interior_points  # noqa: E402

GRID_PX = 60          # pixels per lattice unit
MARGIN = 0.6          # data units around the content
TRIVIAL_COLOR = "#202020"
NONTRIVIAL_COLOR = "#c0392b"

RC = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.linewidth": 0.6,
    "lines.linewidth": 1.0,
    "svg.hashsalt": "lenscs",
    "svg.fonttype": "none",
}


@dataclass
class Element:
    kind: str                      # point | segment | polyline | polygon | label
    coords: list[tuple[float, float]]
    style: dict = field(default_factory=dict)
    text: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "coords": [list(c) for c in self.coords],
                "style": self.style, "text": self.text}


@dataclass
class SvgScene:
    width: int
    height: int
    elements: list[Element]
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    axes: bool = False
    aspect_equal: bool = True

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [c[0] for e in self.elements for c in e.coords]
        ys = [c[1] for e in self.elements for c in e.coords]
        if not xs:
            return (0.0, 0.0, 1.0, 1.0)
        return (min(xs), min(ys), max(xs), max(ys))

    def viewbox(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, width, height) of the data window including the margin."""
        x0, y0, x1, y1 = self.bounds()
        m = MARGIN if self.aspect_equal else 0.05 * max(x1 - x0, y1 - y0, 1e-9)
        return (x0 - m, y0 - m, x1 - x0 + 2 * m, y1 - y0 + 2 * m)

    def validate(self) -> None:
        x0, y0, w, h = self.viewbox()
        for e in self.elements:
            for x, y in e.coords:
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise ValueError(f"non-finite coordinate in {e.kind}")
                if not (x0 <= x <= x0 + w and y0 <= y <= y0 + h):
                    raise ValueError(f"coordinate ({x}, {y}) outside the view box")

    def count(self, kind: str) -> int:
        return sum(1 for e in self.elements if e.kind == kind)

    def to_dict(self) -> dict:
        return {"width": self.width, "height": self.height, "viewbox": list(self.viewbox()),
                "title": self.title, "elements": [e.to_dict() for e in self.elements]}


def _lattice_size(x0, y0, x1, y1) -> tuple[int, int]:
    return (int(round((x1 - x0 + 2 * MARGIN) * GRID_PX)), int(round((y1 - y0 + 2 * MARGIN) * GRID_PX)))


def render_fan(fan: LatticeFan, tri: Triangulation | None = None) -> SvgScene:
    """Lattice points, hull, and (optionally) the triangulation of a fan."""
    els: list[Element] = []
    hull = [(float(v.x), float(v.y)) for v in fan.hull_vertices]
    els.append(Element("polygon", hull, {"facecolor": "#eef3fb", "edgecolor": "#34495e", "linewidth": 1.4}))
    if tri is not None:
        for i, j in sorted(tri.edges):
            a, b = tri.points[i], tri.points[j]
            els.append(Element("segment", [(a.x, a.y), (b.x, b.y)], {"color": "#7f8c8d", "linewidth": 0.8}))
    inner = set(interior_points(fan))
    for v in fan.points:
        colour = "#2e86c1" if v in inner else "#17202a"
        els.append(Element("point", [(float(v.x), float(v.y))], {"color": colour, "size": 30}))
    x0, y0, x1, y1 = _bounds(els)
    w, h = _lattice_size(x0, y0, x1, y1)
    p, q = fan.ls.p, fan.ls.q
    return SvgScene(w, h, els, title=f"fan p={p} q={q}")


def render_web(web: PQWeb, leg_length: float = 0.6) -> SvgScene:
    """Trivalent web: nodes at triangle barycentres, internal edges, external legs."""
    pos = [(float(x), float(y)) for x, y in web.positions]
    els: list[Element] = []
    for a, b in web.internal_edges:
        els.append(Element("segment", [pos[a], pos[b]], {"color": "#1f618d", "linewidth": 1.2}))
    for (n, _), (dx, dy) in zip(web.external_legs, web.leg_charges):
        norm = math.hypot(dx, dy)
        x, y = pos[n]
        els.append(Element("segment", [(x, y), (x + leg_length * dx / norm, y + leg_length * dy / norm)],
                           {"color": "#1f618d", "linewidth": 1.2, "linestyle": "--"}))
    for x, y in pos:
        els.append(Element("point", [(x, y)], {"color": "#922b21", "size": 18}))
    x0, y0, x1, y1 = _bounds(els)
    w, h = _lattice_size(x0, y0, x1, y1)
    return SvgScene(w, h, els, title=f"pq-web ({len(pos)} nodes)")


def render_density(groups: Sequence[np.ndarray], p: int, densities: Sequence | None = None,
                   endpoints: Sequence[tuple[complex, complex]] | None = None,
                   height_scale: float = 0.35) -> SvgScene:
    """Cuts on the cylinder R x [0, 2 pi): cut I at height 2 pi I/p.

    The trivial cut (I = 0) is dark, the others red.  When densities are
    given each is drawn as a profile rising from its cut.
    """
    els: list[Element] = []
    for I, g in enumerate(groups):
        if len(g) == 0:
            continue
        y0 = 2 * math.pi * I / p
        colour = TRIVIAL_COLOR if I == 0 else NONTRIVIAL_COLOR
        g = np.asarray(g)
        if endpoints is not None:
            a, b = endpoints[I]
        else:
            a, b = g[np.argmin(g.real)], g[np.argmax(g.real)]
        els.append(Element("segment", [(float(np.real(a)), y0 + float(np.imag(a))),
                                       (float(np.real(b)), y0 + float(np.imag(b)))],
                           {"color": colour, "linewidth": 2.0}))
        els.append(Element("polyline", [(float(z.real), y0 + float(z.imag)) for z in g.astype(complex)],
                           {"color": colour, "linewidth": 0, "marker": "o", "markersize": 1.5}))
        if densities is not None and densities[I] is not None:
            d = densities[I]
            peak = float(np.max(d.values)) or 1.0
            prof = [(float(x), y0 + height_scale * float(v) / peak) for x, v in zip(d.grid, d.values)]
            els.append(Element("polyline", prof, {"color": colour, "linewidth": 0.8}))
        els.append(Element("label", [(float(np.real(b)) + 0.05, y0)], {"color": colour}, text=f"I={I}"))
    return SvgScene(640, 480, els, title=f"cuts on the cylinder, p={p}", xlabel="Re z",
                    ylabel="Im z", axes=True, aspect_equal=False)


def _bounds(els):
    xs = [c[0] for e in els for c in e.coords]
    ys = [c[1] for e in els for c in e.coords]
    return min(xs), min(ys), max(xs), max(ys)


def write_svg(scene: SvgScene, path: str | Path) -> Path:
    """Draw ``scene`` with matplotlib and save it as SVG."""
    scene.validate()
    path = Path(path)
    x0, y0, w, h = scene.viewbox()
    with plt.rc_context(RC):
        fig = plt.figure(figsize=(scene.width / 100, scene.height / 100), dpi=100)
        if scene.axes:
            ax = fig.add_axes([0.1, 0.1, 0.85, 0.82])
            ax.set_xlabel(scene.xlabel)
            ax.set_ylabel(scene.ylabel)
        else:
            ax = fig.add_axes([0, 0, 1, 1])
            ax.set_axis_off()
        for e in scene.elements:
            xs = [c[0] for c in e.coords]
            ys = [c[1] for c in e.coords]
            st = e.style
            if e.kind == "point":
                ax.scatter(xs, ys, s=st.get("size", 20), c=st.get("color", "k"), zorder=3)
            elif e.kind in ("segment", "polyline"):
                ax.plot(xs, ys, color=st.get("color", "k"), linewidth=st.get("linewidth", 1.0),
                        linestyle=st.get("linestyle", "-"), marker=st.get("marker", ""),
                        markersize=st.get("markersize", 0), zorder=2)
            elif e.kind == "polygon":
                ax.fill(xs, ys, facecolor=st.get("facecolor", "none"), edgecolor=st.get("edgecolor", "k"),
                        linewidth=st.get("linewidth", 1.0), zorder=1)
            elif e.kind == "label":
                ax.text(xs[0], ys[0], e.text, color=st.get("color", "k"), va="center")
        ax.set_xlim(x0, x0 + w)
        ax.set_ylim(y0, y0 + h)
        if scene.aspect_equal:
            ax.set_aspect("equal", adjustable="box")
        if scene.title and scene.axes:
            ax.set_title(scene.title)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
