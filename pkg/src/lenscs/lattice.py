"""Toric data of the orbifolded conifold X_{p,q} and its crepant resolution.

Everything here is exact integer (or rational) arithmetic on small planar
point sets: the height-one slice of the fan, a reproducible unimodular
triangulation, Betti numbers, lattice width, lattice automorphisms between
two fans and the dual pq-web.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateInput, InvalidLensSpace


class LatticePoint2(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class LensSpace:
    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if not (isinstance(p, (int, np.integer)) and isinstance(q, (int, np.integer))):
            raise InvalidLensSpace(f"p and q must be integers, got {p!r}, {q!r}")
        if not 1 <= q < p:
            raise InvalidLensSpace(f"need 1 <= q < p, got p={p}, q={q}")
        if math.gcd(p, q) != 1:
            raise InvalidLensSpace(f"p={p} and q={q} are not coprime")

    def homeomorphic_to(self, other: "LensSpace") -> bool:
        if self.p != other.p:
            return False
        p, a, b = self.p, self.q, other.q
        return (a - b) % p == 0 or (a + b) % p == 0 or (a * b - 1) % p == 0 or (a * b + 1) % p == 0


# --------------------------------------------------------------------------
# planar helpers

def _orient(a, b, c) -> int:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def convex_hull(points: Iterable[Sequence[int]]) -> list[LatticePoint2]:
    """Strict hull vertices in counter-clockwise order (monotone chain)."""
    pts = sorted({LatticePoint2(int(x), int(y)) for x, y in points})
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[LatticePoint2] = []
        for pt in seq:
            while len(out) >= 2 and _orient(out[-2], out[-1], pt) <= 0:
                out.pop()
            out.append(pt)
        return out

    lower, upper = half(pts), half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def polygon_area2(vertices: Sequence[Sequence[int]]) -> int:
    """Twice the signed area of a polygon given in order."""
    n = len(vertices)
    return sum(vertices[i][0] * vertices[(i + 1) % n][1] - vertices[(i + 1) % n][0] * vertices[i][1]
               for i in range(n))


def lattice_point_counts(points: Iterable[Sequence[int]]) -> tuple[int, int]:
    """(interior, boundary) lattice-point counts of the convex hull of ``points``.

    Uses Pick's theorem on the hull, so points of the set itself play no role
    beyond spanning it.
    """
    hull = convex_hull(points)
    if len(hull) == 1:
        return 0, 1
    boundary = sum(math.gcd(abs(hull[(i + 1) % len(hull)][0] - hull[i][0]),
                            abs(hull[(i + 1) % len(hull)][1] - hull[i][1]))
                   for i in range(len(hull)))
    if len(hull) == 2:
        return 0, boundary // 2 + 1
    area2 = abs(polygon_area2(hull))
    interior = (area2 - boundary + 2) // 2
    return interior, boundary


def strictly_inside(pt: Sequence[int], hull: Sequence[Sequence[int]]) -> bool:
    n = len(hull)
    return n >= 3 and all(_orient(hull[i], hull[(i + 1) % n], pt) > 0 for i in range(n))


# --------------------------------------------------------------------------
# fan

@dataclass(frozen=True)
class LatticeFan:
    points: tuple[LatticePoint2, ...]
    rays: tuple[tuple[int, int, int], ...]
    hull_vertices: tuple[LatticePoint2, ...]
    ls: LensSpace | None = None

    def to_dict(self) -> dict:
        return {
            "p": self.ls.p if self.ls else None,
            "q": self.ls.q if self.ls else None,
            "points": [list(v) for v in self.points],
            "rays": [list(b) for b in self.rays],
            "hull_vertices": [list(v) for v in self.hull_vertices],
        }


def fan_points(p: int, q: int) -> list[LatticePoint2]:
    """The p+3 height-one points v_1, ..., v_{p+3} of the resolved fan."""
    pts = [LatticePoint2(q + 1, 0), LatticePoint2(q, 0)]
    # jq/p is never integral for 0<j<p, so floor is unambiguous
    pts += [LatticePoint2(q - (j * q) // p, j) for j in range(1, p + 1)]
    pts.append(LatticePoint2(1, p))
    return pts


def build_fan(ls: LensSpace) -> LatticeFan:
    pts = fan_points(ls.p, ls.q)
    rays = tuple((v.x, v.y, 1) for v in pts)
    corners = (LatticePoint2(ls.q + 1, 0), LatticePoint2(ls.q, 0),
               LatticePoint2(1, ls.p), LatticePoint2(0, ls.p))
    return LatticeFan(points=tuple(pts), rays=rays, hull_vertices=corners, ls=ls)


def interior_points(fan: LatticeFan) -> list[LatticePoint2]:
    """Fan points lying strictly inside the hull, found by scanning its bounding box."""
    hull = np.array(convex_hull(fan.points), dtype=np.int64)
    if len(hull) < 3:
        return []
    xs = np.arange(hull[:, 0].min(), hull[:, 0].max() + 1)
    ys = np.arange(hull[:, 1].min(), hull[:, 1].max() + 1)
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    inside = np.ones(gx.shape, dtype=bool)
    for a, b in zip(hull, np.roll(hull, -1, axis=0)):
        inside &= (b[0] - a[0]) * (gy - a[1]) - (b[1] - a[1]) * (gx - a[0]) > 0
    return [LatticePoint2(int(x), int(y)) for y, x in zip(gy[inside], gx[inside])]


# --------------------------------------------------------------------------
# triangulation

@dataclass(frozen=True)
class Triangulation:
    points: tuple[LatticePoint2, ...]
    simplices: tuple[tuple[int, int, int], ...]
    adjacency: tuple[tuple[int, int, tuple[int, int]], ...]
    boundary_edges: tuple[tuple[int, tuple[int, int]], ...] = field(default=())

    @property
    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for a, b, c in self.simplices:
            for e in ((a, b), (b, c), (a, c)):
                out.add(tuple(sorted(e)))
        return out

    def area2(self, k: int) -> int:
        a, b, c = (self.points[i] for i in self.simplices[k])
        return abs(_orient(a, b, c))

    def to_dict(self) -> dict:
        return {
            "points": [list(v) for v in self.points],
            "simplices": [list(s) for s in self.simplices],
            "adjacency": [[s, t, list(e)] for s, t, e in self.adjacency],
            "boundary_edges": [[s, list(e)] for s, e in self.boundary_edges],
        }


def _placing_triangulation(points: Sequence[LatticePoint2]) -> list[tuple[int, int, int]]:
    # Points are inserted in lexicographic order; each new point is a vertex
    # of the running hull, so it is coned over the hull edges it sees. This is
    # the regular triangulation for heights growing fast along the lex order.
    order = sorted(range(len(points)), key=lambda i: points[i])
    P = [points[i] for i in order]
    k = 2
    while k < len(P) and _orient(P[0], P[1], P[k]) == 0:
        k += 1
    if k == len(P):
        raise DegenerateInput("all points are collinear")
    # degenerate two-sided cycle over the collinear prefix
    chain = list(range(k))
    cycle = chain + chain[-2:0:-1]
    tris = []
    for new in range(k, len(P)):
        n = len(cycle)
        vis = [_orient(P[cycle[i]], P[cycle[(i + 1) % n]], P[new]) < 0 for i in range(n)]
        if not any(vis):
            raise DegenerateInput("placing step found no visible edge")
        # rotate so the visible run is contiguous from index 0
        start = next(i for i in range(n) if vis[i] and not vis[i - 1])
        cycle = cycle[start:] + cycle[:start]
        vis = vis[start:] + vis[:start]
        run = 0
        while run < n and vis[run]:
            tris.append((cycle[run], cycle[(run + 1) % n], new))
            run += 1
        cycle = [cycle[0], new] + cycle[run:]
    return [tuple(sorted(order[i] for i in t)) for t in tris]


def triangulate(fan: LatticeFan) -> Triangulation:
    """Deterministic complete triangulation using every fan point.

    Raises DegenerateInput if a simplex is not unimodular, which would mean
    the fan itself is malformed.
    """
    pts = tuple(fan.points)
    simplices = sorted(_placing_triangulation(pts))
    for s in simplices:
        a, b, c = (pts[i] for i in s)
        if abs(_orient(a, b, c)) != 1:
            raise DegenerateInput(f"simplex {s} has lattice area {abs(_orient(a, b, c))}/2")
    edge_owner: dict[tuple[int, int], list[int]] = {}
    for k, (a, b, c) in enumerate(simplices):
        for e in ((a, b), (b, c), (a, c)):
            edge_owner.setdefault(e, []).append(k)
    adjacency = tuple(sorted((own[0], own[1], e) for e, own in edge_owner.items() if len(own) == 2))
    boundary = tuple(sorted((own[0], e) for e, own in edge_owner.items() if len(own) == 1))
    return Triangulation(points=pts, simplices=tuple(simplices), adjacency=adjacency,
                         boundary_edges=boundary)


# --------------------------------------------------------------------------
# topology

@dataclass(frozen=True)
class ToricTopology:
    euler: int
    b0: int
    b2: int
    b4: int

    def to_dict(self) -> dict:
        return {"euler": self.euler, "b0": self.b0, "b2": self.b2, "b4": self.b4}


def topology(fan: LatticeFan, tri: Triangulation) -> ToricTopology:
    # each unimodular triangle is a torus-fixed point, so chi = #triangles
    euler = len(tri.simplices)
    b4 = len(interior_points(fan))
    return ToricTopology(euler=euler, b0=1, b2=euler - 1 - b4, b4=b4)


# --------------------------------------------------------------------------
# lattice width

def _primitive_directions(bound: int) -> np.ndarray:
    dirs = [(a, b) for a in range(-bound, bound + 1) for b in range(0, bound + 1)
            if (b > 0 or a > 0) and math.gcd(a, b) == 1]
    return np.array(dirs, dtype=np.int64).reshape(-1, 2)


def lattice_width(points: Iterable[Sequence[int]], return_direction: bool = False):
    """Minimum over primitive directions d of max <d,v> - min <d,v>."""
    pts = np.array([tuple(v) for v in points], dtype=np.int64).reshape(-1, 2)
    if len(pts) == 0:
        raise DegenerateInput("lattice width of an empty set")
    if len(np.unique(pts, axis=0)) == 1:
        return (0, (1, 0)) if return_direction else 0
    diff = pts[:, None, :] - pts[None, :, :]
    bound = max(1, int(math.ceil(math.sqrt(float((diff ** 2).sum(axis=-1).max())))))
    dirs = _primitive_directions(bound)
    proj = pts @ dirs.T
    widths = proj.max(axis=0) - proj.min(axis=0)
    k = int(np.argmin(widths))
    w = int(widths[k])
    if return_direction:
        return w, (int(dirs[k, 0]), int(dirs[k, 1]))
    return w


# --------------------------------------------------------------------------
# automorphisms

@dataclass(frozen=True)
class AffineMap:
    matrix: tuple[tuple[int, int], tuple[int, int]]
    translation: tuple[int, int]

    def __call__(self, v: Sequence[int]) -> LatticePoint2:
        (a, b), (c, d) = self.matrix
        return LatticePoint2(a * v[0] + b * v[1] + self.translation[0],
                             c * v[0] + d * v[1] + self.translation[1])

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def to_dict(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "translation": list(self.translation)}


def _frame_maps(src: Sequence[LatticePoint2], dst: Sequence[LatticePoint2]):
    # candidates: send the corner src[0] with its two hull neighbours onto any
    # corner of dst with its neighbours, in either orientation
    hs, hd = convex_hull(src), convex_hull(dst)
    if len(hs) != len(hd) or len(hs) < 3:
        return
    v0, vn, vp = hs[0], hs[1], hs[-1]
    e1 = (vn[0] - v0[0], vn[1] - v0[1])
    e2 = (vp[0] - v0[0], vp[1] - v0[1])
    det = e1[0] * e2[1] - e1[1] * e2[0]
    n = len(hd)
    for i in range(n):
        w0 = hd[i]
        for wn, wp in ((hd[(i + 1) % n], hd[i - 1]), (hd[i - 1], hd[(i + 1) % n])):
            f1 = (wn[0] - w0[0], wn[1] - w0[1])
            f2 = (wp[0] - w0[0], wp[1] - w0[1])
            # A [e1 e2] = [f1 f2]  ->  A = F E^{-1}
            inv = ((Fraction(e2[1], det), Fraction(-e2[0], det)),
                   (Fraction(-e1[1], det), Fraction(e1[0], det)))
            F = ((f1[0], f2[0]), (f1[1], f2[1]))
            A = [[sum(F[r][k] * inv[k][c] for k in range(2)) for c in range(2)] for r in range(2)]
            if any(x.denominator != 1 for row in A for x in row):
                continue
            M = ((int(A[0][0]), int(A[0][1])), (int(A[1][0]), int(A[1][1])))
            if abs(M[0][0] * M[1][1] - M[0][1] * M[1][0]) != 1:
                continue
            t = (w0[0] - (M[0][0] * v0[0] + M[0][1] * v0[1]),
                 w0[1] - (M[1][0] * v0[0] + M[1][1] * v0[1]))
            yield AffineMap(M, t)


def find_affine_map(src: Iterable[Sequence[int]], dst: Iterable[Sequence[int]]) -> AffineMap | None:
    """An affine GL(2,Z) map carrying the point set ``src`` onto ``dst``, if any."""
    S = [LatticePoint2(*v) for v in src]
    D = {LatticePoint2(*v) for v in dst}
    if len(set(S)) != len(D):
        return None
    for f in _frame_maps(S, list(D)):
        if {f(v) for v in S} == D:
            return f
    return None


def fan_automorphism(f1: LatticeFan, f2: LatticeFan) -> AffineMap | None:
    return find_affine_map(f1.points, f2.points)


# --------------------------------------------------------------------------
# pq-web

@dataclass(frozen=True)
class PQWeb:
    internal_nodes: tuple[int, ...]
    internal_edges: tuple[tuple[int, int], ...]
    external_legs: tuple[tuple[int, tuple[int, int]], ...]
    positions: tuple[tuple[Fraction, Fraction], ...]
    edge_charges: tuple[tuple[int, int], ...] = ()
    leg_charges: tuple[tuple[int, int], ...] = ()

    def degrees(self) -> list[int]:
        deg = [0] * len(self.internal_nodes)
        for a, b in self.internal_edges:
            deg[a] += 1
            deg[b] += 1
        for a, _ in self.external_legs:
            deg[a] += 1
        return deg

    def is_connected(self) -> bool:
        n = len(self.internal_nodes)
        if n == 0:
            return True
        nbrs = [[] for _ in range(n)]
        for a, b in self.internal_edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        seen, stack = {0}, [0]
        while stack:
            for m in nbrs[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return len(seen) == n

    def to_dict(self) -> dict:
        return {
            "internal_nodes": list(self.internal_nodes),
            "internal_edges": [list(e) for e in self.internal_edges],
            "external_legs": [[n, list(e)] for n, e in self.external_legs],
            "positions": [[str(x), str(y)] for x, y in self.positions],
            "edge_charges": [list(c) for c in self.edge_charges],
            "leg_charges": [list(c) for c in self.leg_charges],
        }


def _normal(a: LatticePoint2, b: LatticePoint2) -> tuple[int, int]:
    dx, dy = b.x - a.x, b.y - a.y
    g = math.gcd(dx, dy) or 1
    return (dy // g, -dx // g)


def pq_web(tri: Triangulation) -> PQWeb:
    """Trivalent graph dual to ``tri``.

    Nodes sit at triangle barycentres. Each edge also records its (p,q)
    charge, the primitive normal of the dual triangle edge, which is the
    direction it takes in a true web drawing. External legs point outward.
    """
    pts = tri.points
    positions = []
    for s in tri.simplices:
        xs = [pts[i].x for i in s]
        ys = [pts[i].y for i in s]
        positions.append((Fraction(sum(xs), 3), Fraction(sum(ys), 3)))
    edges = tuple((s, t) for s, t, _ in tri.adjacency)
    edge_charges = tuple(_normal(pts[e[0]], pts[e[1]]) for _, _, e in tri.adjacency)
    legs = tri.boundary_edges
    leg_charges = []
    for s, (i, j) in legs:
        n = _normal(pts[i], pts[j])
        k = next(v for v in tri.simplices[s] if v not in (i, j))
        # orient away from the opposite vertex
        if n[0] * (pts[k].x - pts[i].x) + n[1] * (pts[k].y - pts[i].y) > 0:
            n = (-n[0], -n[1])
        leg_charges.append(n)
    return PQWeb(internal_nodes=tuple(range(len(tri.simplices))), internal_edges=edges,
                 external_legs=legs, positions=tuple(positions), edge_charges=edge_charges,
                 leg_charges=tuple(leg_charges))
