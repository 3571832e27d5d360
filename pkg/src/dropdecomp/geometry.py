"""Finite simplicial complexes of dimension <= 2 with the standard path metric.

Each simplex carries a flat chart: edges are segments of their stored length
(unit length for a freshly built complex), triangles are planar triangles
with the matching side lengths.  The path metric measures curves chart by
chart.  Geodesic queries run on a cached refinement graph: every simplex is
sampled at a fixed barycentric resolution and all node pairs inside one
simplex are joined by their exact chart distance, so graph paths are
piecewise-linear paths through the complex.  Distances between points in a
shared simplex are exact chart distances.

Points are (simplex, barycentric coordinates) pairs, canonicalized so that
zero weights drop the point to the carrier face.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import DomainError, PunctureError, ResourceLimitError, StructureError

GRAPH_RESOLUTION = 8


class Point(NamedTuple):
    simplex: tuple[int, ...]
    coords: tuple[float, ...]


def make_point(simplex: Sequence[int], coords: Sequence[float]) -> Point:
    """Canonical point: weights sorted into simplex order, faces collapsed."""
    simplex = tuple(simplex)
    coords = tuple(float(c) for c in coords)
    if len(simplex) != len(coords):
        raise ValueError("simplex/coordinate arity mismatch")
    if any(c < -1e-12 for c in coords) or abs(sum(coords) - 1.0) > 1e-9:
        raise ValueError(f"invalid barycentric coordinates {coords}")
    keep = [(v, max(c, 0.0)) for v, c in zip(simplex, coords) if c > 1e-12]
    keep.sort()
    total = sum(c for _, c in keep)
    return Point(tuple(v for v, _ in keep), tuple(c / total for _, c in keep))


def vertex_point(v: int) -> Point:
    return Point((v,), (1.0,))


@dataclass(frozen=True)
class PLPath:
    """Piecewise-linear path: breakpoints in [0, 1] and points, one per node."""

    breakpoints: tuple[float, ...]
    points: tuple[Point, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.points) or len(self.points) < 1:
            raise ValueError("breakpoints and points must align")

    def at(self, complex_: "SimplicialComplex2", s: float) -> Point:
        s = min(max(s, 0.0), 1.0)
        bp = self.breakpoints
        for i in range(len(bp) - 1):
            if s <= bp[i + 1] or i == len(bp) - 2:
                if bp[i + 1] == bp[i]:
                    return self.points[i + 1]
                lam = (s - bp[i]) / (bp[i + 1] - bp[i])
                return complex_.interpolate(self.points[i], self.points[i + 1], lam)
        return self.points[-1]

    def length(self, complex_: "SimplicialComplex2") -> float:
        return sum(
            complex_.local_distance(p, q)
            for p, q in zip(self.points, self.points[1:])
        )


class SimplicialComplex2:
    """Simplicial complex of dimension <= 2 with per-simplex flat charts."""

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Iterable[Sequence[int]],
        triangles: Iterable[Sequence[int]] = (),
        edge_lengths: Optional[dict] = None,
        vertex_positions: Optional[dict] = None,
    ):
        self.vertices = sorted(set(int(v) for v in vertices))
        self.edges = sorted(set(tuple(sorted(int(v) for v in e)) for e in edges))
        self.triangles = sorted(set(tuple(sorted(int(v) for v in t)) for t in triangles))
        self.edge_lengths = {e: 1.0 for e in self.edges}
        if edge_lengths:
            for e, l in edge_lengths.items():
                self.edge_lengths[tuple(sorted(e))] = float(l)
        # optional global embedding used by field fixtures, not by the metric
        self.vertex_positions = dict(vertex_positions) if vertex_positions else None
        self._validate()
        self._charts: dict[tuple[int, ...], np.ndarray] = {}
        self._graph_cache: dict[int, tuple] = {}

    def _validate(self):
        vset = set(self.vertices)
        for e in self.edges:
            if len(e) != 2 or e[0] == e[1] or not set(e) <= vset:
                raise StructureError(f"bad edge {e}")
        eset = set(self.edges)
        for t in self.triangles:
            if len(t) != 3 or len(set(t)) != 3 or not set(t) <= vset:
                raise StructureError(f"bad triangle {t}")
            for pair in itertools.combinations(t, 2):
                if tuple(sorted(pair)) not in eset:
                    raise StructureError(f"triangle {t} missing edge {pair}")
        for t in self.triangles:
            a, b, c = self._sides(t)
            if a + b <= c or b + c <= a or a + c <= b:
                raise StructureError(f"triangle {t} violates the chart inequality")

    # -- basic structure ---------------------------------------------------

    def _sides(self, t: tuple[int, ...]) -> tuple[float, float, float]:
        v0, v1, v2 = t
        return (
            self.edge_lengths[(v0, v1)],
            self.edge_lengths[tuple(sorted((v1, v2)))],
            self.edge_lengths[(v0, v2)],
        )

    def simplices(self) -> list[tuple[int, ...]]:
        return [(v,) for v in self.vertices] + list(self.edges) + list(self.triangles)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            parent[find(a)] = find(b)
        roots = {find(v) for v in self.vertices}
        return len(roots) == 1

    def contains_point(self, p: Point) -> bool:
        s = p.simplex
        if len(s) == 1:
            return s[0] in set(self.vertices)
        if len(s) == 2:
            return s in set(self.edges)
        return s in set(self.triangles)

    def cofaces(self, simplex: tuple[int, ...]) -> list[tuple[int, ...]]:
        s = set(simplex)
        out = []
        for e in self.edges:
            if s <= set(e):
                out.append(e)
        for t in self.triangles:
            if s <= set(t):
                out.append(t)
        if len(simplex) == 1:
            out.insert(0, simplex)
        return out

    def carrier_tops(self, p: Point) -> list[tuple[int, ...]]:
        """Top-dimensional simplices whose closure contains p."""
        if len(p.simplex) == 3:
            return [p.simplex]
        cof = [c for c in self.cofaces(p.simplex) if len(c) == 3]
        if cof:
            return cof
        if len(p.simplex) == 2:
            return [p.simplex]
        cof = [c for c in self.cofaces(p.simplex) if len(c) == 2]
        return cof or [p.simplex]

    # -- charts ------------------------------------------------------------

    def chart(self, simplex: tuple[int, ...]) -> np.ndarray:
        """Vertex coordinates of the simplex chart (rows follow simplex order)."""
        simplex = tuple(simplex)
        if simplex in self._charts:
            return self._charts[simplex]
        if len(simplex) == 1:
            m = np.zeros((1, 2))
        elif len(simplex) == 2:
            l = self.edge_lengths[simplex]
            m = np.array([[0.0, 0.0], [l, 0.0]])
        else:
            ab, bc, ac = self._sides(simplex)
            x = (ab * ab + ac * ac - bc * bc) / (2.0 * ab)
            y = math.sqrt(max(ac * ac - x * x, 0.0))
            m = np.array([[0.0, 0.0], [ab, 0.0], [x, y]])
        self._charts[simplex] = m
        return m

    def chart_coords(self, p: Point, top: tuple[int, ...]) -> np.ndarray:
        """Coordinates of p in the chart of a containing simplex."""
        m = self.chart(top)
        out = np.zeros(2)
        for v, c in zip(p.simplex, p.coords):
            out += c * m[top.index(v)]
        return out

    def point_from_chart(self, top: tuple[int, ...], xy: np.ndarray) -> Point:
        m = self.chart(top)
        if len(top) == 2:
            l = self.edge_lengths[top]
            s = float(np.clip(xy[0] / l, 0.0, 1.0))
            return make_point(top, (1.0 - s, s))
        a = np.vstack([m.T, np.ones(3)])
        b = np.array([xy[0], xy[1], 1.0])
        lam = np.linalg.lstsq(a, b, rcond=None)[0]
        lam = np.clip(lam, 0.0, None)
        lam = lam / lam.sum()
        return make_point(top, tuple(lam))

    def interpolate(self, p: Point, q: Point, lam: float) -> Point:
        top = self._shared_top(p, q)
        if top is None:
            raise DomainError("cannot interpolate across simplices")
        a = self.chart_coords(p, top)
        b = self.chart_coords(q, top)
        return self.point_from_chart(top, (1.0 - lam) * a + lam * b)

    def _shared_top(self, p: Point, q: Point) -> Optional[tuple[int, ...]]:
        tops_p = self.carrier_tops(p)
        tops_q = set(map(tuple, self.carrier_tops(q)))
        for t in tops_p:
            if t in tops_q:
                return t
        return None

    def local_distance(self, p: Point, q: Point) -> float:
        """Chart distance inside a shared simplex; inf when none is shared."""
        top = self._shared_top(p, q)
        if top is None:
            return math.inf
        a = self.chart_coords(p, top)
        b = self.chart_coords(q, top)
        return float(np.linalg.norm(a - b))

    def global_position(self, p: Point) -> np.ndarray:
        if self.vertex_positions is None:
            raise DomainError("complex has no global embedding")
        out = np.zeros(2)
        for v, c in zip(p.simplex, p.coords):
            out += c * np.asarray(self.vertex_positions[v], dtype=float)
        return out

    # -- refinement graph ----------------------------------------------------

    def _graph(self, resolution: int = GRAPH_RESOLUTION):
        if resolution in self._graph_cache:
            return self._graph_cache[resolution]
        nodes: list[Point] = []
        index: dict[Point, int] = {}

        def add(p: Point) -> int:
            if p not in index:
                index[p] = len(nodes)
                nodes.append(p)
            return index[p]

        for v in self.vertices:
            add(vertex_point(v))
        for e in self.edges:
            for j in range(1, resolution):
                add(make_point(e, (1.0 - j / resolution, j / resolution)))
        for t in self.triangles:
            for i in range(resolution + 1):
                for j in range(resolution + 1 - i):
                    k = resolution - i - j
                    add(make_point(t, (i / resolution, j / resolution, k / resolution)))
        per_simplex: dict[tuple[int, ...], list[int]] = {}
        for s in self.simplices():
            sset = set(s)
            members = [i for i, p in enumerate(nodes) if set(p.simplex) <= sset]
            per_simplex[s] = members
        rows, cols, vals = [], [], []
        for s, members in per_simplex.items():
            if len(s) == 1:
                continue
            for a, b in itertools.combinations(members, 2):
                d = self.local_distance(nodes[a], nodes[b])
                rows.append(a)
                cols.append(b)
                vals.append(d)
        n = len(nodes)
        g = coo_matrix((vals, (rows, cols)), shape=(n, n))
        dist, pred = dijkstra(g, directed=False, return_predecessors=True)
        self._graph_cache[resolution] = (nodes, index, per_simplex, dist, pred)
        return self._graph_cache[resolution]

    def _attach(self, p: Point, per_simplex, nodes) -> list[int]:
        """Graph nodes sharing a simplex with p."""
        out = set()
        for top in self.carrier_tops(p):
            out.update(per_simplex.get(top, ()))
        return sorted(out)


def barycenter(complex_: SimplicialComplex2, simplex: Sequence[int]) -> Point:
    """Center of a simplex: the vertex, the midpoint, or the barycenter."""
    simplex = tuple(sorted(simplex))
    n = len(simplex)
    return make_point(simplex, tuple(1.0 / n for _ in range(n)))


def path_distance(complex_: SimplicialComplex2, x: Point, y: Point) -> float:
    """Geodesic length under the chart metric (refinement-graph approximation).

    Exact for points sharing a simplex; longer routes go through the cached
    refinement graph.  Disconnected pairs yield math.inf.
    """
    if x == y:
        return 0.0
    best = complex_.local_distance(x, y)
    nodes, index, per_simplex, dist, _ = complex_._graph()
    anch_x = complex_._attach(x, per_simplex, nodes)
    anch_y = complex_._attach(y, per_simplex, nodes)
    if not anch_x or not anch_y:
        return best
    dx = np.array([complex_.local_distance(x, nodes[a]) for a in anch_x])
    dy = np.array([complex_.local_distance(y, nodes[b]) for b in anch_y])
    through = dist[np.ix_(anch_x, anch_y)] + dx[:, None] + dy[None, :]
    best = min(best, float(through.min()) if through.size else math.inf)
    return best


def geodesic_path(complex_: SimplicialComplex2, x: Point, y: Point) -> PLPath:
    """Piecewise-linear path realizing path_distance (same approximation)."""
    direct = complex_.local_distance(x, y)
    nodes, index, per_simplex, dist, pred = complex_._graph()
    anch_x = complex_._attach(x, per_simplex, nodes)
    anch_y = complex_._attach(y, per_simplex, nodes)
    best_through = math.inf
    best_pair = None
    for a in anch_x:
        da = complex_.local_distance(x, nodes[a])
        for b in anch_y:
            v = da + dist[a, b] + complex_.local_distance(y, nodes[b])
            if v < best_through:
                best_through = v
                best_pair = (a, b)
    if direct <= best_through:
        pts = [x, y]
    else:
        a, b = best_pair
        chain = [b]
        while chain[-1] != a:
            chain.append(int(pred[a, chain[-1]]))
        chain.reverse()
        pts = [x] + [nodes[i] for i in chain] + [y]
        pts = [p for i, p in enumerate(pts) if i == 0 or p != pts[i - 1]]
    if len(pts) == 1:
        return PLPath((0.0, 1.0), (x, y))
    legs = [complex_.local_distance(p, q) for p, q in zip(pts, pts[1:])]
    total = sum(legs)
    if total == 0.0:
        return PLPath((0.0, 1.0), (pts[0], pts[-1]))
    bps = [0.0]
    for l in legs:
        bps.append(bps[-1] + l / total)
    bps[-1] = 1.0
    return PLPath(tuple(bps), tuple(pts))


def star_diameter(complex_: SimplicialComplex2, simplex: tuple[int, ...], resolution: int = 4) -> float:
    """Diameter of the union of open simplices meeting the given simplex.

    Brute force: sample every simplex of the closed star and take the max
    pairwise path distance.
    """
    s = set(simplex)
    star = [sp for sp in complex_.simplices() if s & set(sp)]
    pts: list[Point] = []
    for sp in star:
        if len(sp) == 1:
            pts.append(vertex_point(sp[0]))
        elif len(sp) == 2:
            for j in range(resolution + 1):
                pts.append(make_point(sp, (1.0 - j / resolution, j / resolution)))
        else:
            for i in range(resolution + 1):
                for j in range(resolution + 1 - i):
                    k = resolution - i - j
                    pts.append(make_point(sp, (i / resolution, j / resolution, k / resolution)))
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = path_distance(complex_, pts[i], pts[j])
            if d > best:
                best = d
    return best


def max_star_diameter(complex_: SimplicialComplex2, resolution: int = 4) -> float:
    return max(star_diameter(complex_, s, resolution) for s in complex_.simplices())


def barycentric_subdivision(complex_: SimplicialComplex2) -> SimplicialComplex2:
    """One global barycentric-style subdivision (edge midpoints + centers)."""
    next_id = max(complex_.vertices) + 1 if complex_.vertices else 0
    mid: dict[tuple[int, int], int] = {}
    center: dict[tuple[int, ...], int] = {}
    lengths: dict[tuple[int, int], float] = {}
    vertices = list(complex_.vertices)
    positions = dict(complex_.vertex_positions) if complex_.vertex_positions else None

    def new_vertex(point: Point) -> int:
        nonlocal next_id
        vid = next_id
        next_id += 1
        vertices.append(vid)
        if positions is not None:
            positions[vid] = tuple(complex_.global_position(point))
        return vid

    for e in complex_.edges:
        mid[e] = new_vertex(make_point(e, (0.5, 0.5)))
    for t in complex_.triangles:
        center[t] = new_vertex(make_point(t, (1 / 3, 1 / 3, 1 / 3)))

    edges: list[tuple[int, int]] = []
    triangles: list[tuple[int, int, int]] = []

    def add_edge(a: int, b: int, length: float):
        e = tuple(sorted((a, b)))
        edges.append(e)
        lengths[e] = length

    for e in complex_.edges:
        a, b = e
        m = mid[e]
        half = complex_.edge_lengths[e] / 2.0
        add_edge(a, m, half)
        add_edge(m, b, half)

    for t in complex_.triangles:
        g = center[t]
        chart = complex_.chart(t)
        gxy = chart.mean(axis=0)
        corners = {v: chart[i] for i, v in enumerate(t)}
        mids = {}
        for pair in itertools.combinations(t, 2):
            e = tuple(sorted(pair))
            mids[e] = 0.5 * (corners[pair[0]] + corners[pair[1]])
        for v in t:
            add_edge(v, g, float(np.linalg.norm(corners[v] - gxy)))
        for e, mxy in mids.items():
            add_edge(mid[e], g, float(np.linalg.norm(mxy - gxy)))
            triangles.append(tuple(sorted((e[0], mid[e], g))))
            triangles.append(tuple(sorted((e[1], mid[e], g))))

    return SimplicialComplex2(vertices, edges, triangles, lengths, positions)


def subdivide_until(
    complex_: SimplicialComplex2, bound: float, max_rounds: int = 8
) -> SimplicialComplex2:
    """Subdivide barycentrically until every closed star has diameter <= bound.

    Idempotent on complexes that already conform.  The vertex set of the input
    survives as a subset of the output's vertices.
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    cur = complex_
    for _ in range(max_rounds + 1):
        if max_star_diameter(cur) <= bound:
            return cur
        cur = barycentric_subdivision(cur)
    raise ResourceLimitError(
        f"star-diameter bound {bound} not reached within {max_rounds} subdivisions"
    )


def insert_vertex(complex_: SimplicialComplex2, point: Point) -> SimplicialComplex2:
    """Make a point a vertex via a local star subdivision."""
    p = point
    if len(p.simplex) == 1:
        return complex_
    next_id = max(complex_.vertices) + 1
    vertices = list(complex_.vertices) + [next_id]
    positions = dict(complex_.vertex_positions) if complex_.vertex_positions else None
    if positions is not None:
        positions[next_id] = tuple(complex_.global_position(p))
    edges = list(complex_.edges)
    triangles = list(complex_.triangles)
    lengths = dict(complex_.edge_lengths)

    def add_edge(a, b, length):
        e = tuple(sorted((a, b)))
        if e not in lengths:
            edges.append(e)
        lengths[e] = length

    if len(p.simplex) == 2:
        e = p.simplex
        a, b = e
        edges.remove(e)
        base = lengths.pop(e)
        sa = p.coords[1]  # weight on b == arclength fraction from a
        add_edge(a, next_id, base * sa)
        add_edge(next_id, b, base * (1.0 - sa))
        for t in list(triangles):
            if set(e) <= set(t):
                triangles.remove(t)
                (c,) = set(t) - set(e)
                chart = complex_.chart(t)
                pxy = complex_.chart_coords(p, t)
                cxy = chart[t.index(c)]
                add_edge(c, next_id, float(np.linalg.norm(cxy - pxy)))
                triangles.append(tuple(sorted((a, next_id, c))))
                triangles.append(tuple(sorted((b, next_id, c))))
    else:
        t = p.simplex
        triangles.remove(t)
        chart = complex_.chart(t)
        pxy = complex_.chart_coords(p, t)
        for v in t:
            add_edge(v, next_id, float(np.linalg.norm(chart[t.index(v)] - pxy)))
        for pair in itertools.combinations(t, 2):
            triangles.append(tuple(sorted(pair + (next_id,))))
    return SimplicialComplex2(vertices, edges, triangles, lengths, positions)


@dataclass(frozen=True)
class Retraction:
    """Radial retraction off punctured triangles onto the 1-skeleton."""

    complex_: SimplicialComplex2
    punctures: dict

    def __call__(self, p: Point) -> Point:
        if len(p.simplex) < 3:
            return p
        t = p.simplex
        if t not in self.punctures:
            raise DomainError(f"no puncture declared for triangle {t}")
        c = self.complex_.chart_coords(self.punctures[t], t)
        x = self.complex_.chart_coords(p, t)
        d = x - c
        nd = np.linalg.norm(d)
        if nd < 1e-14:
            raise PunctureError("point coincides with the puncture")
        chart = self.complex_.chart(t)
        best = None
        for i, j in ((0, 1), (1, 2), (0, 2)):
            a, b = chart[i], chart[j]
            m = np.column_stack([d, a - b])
            if abs(np.linalg.det(m)) < 1e-14:
                continue
            s, lam = np.linalg.solve(m, a - c)
            if s > 1e-12 and -1e-9 <= lam <= 1.0 + 1e-9:
                cand = (float(s), i, j, float(np.clip(lam, 0.0, 1.0)))
                if best is None or cand[0] < best[0]:
                    best = cand
        if best is None or best[0] < nd - 1e-9:
            raise PunctureError("ray from puncture failed to meet the boundary")
        _, i, j, lam = best
        vi, vj = t[i], t[j]
        e = tuple(sorted((vi, vj)))
        wi = 1.0 - lam
        coords = (wi, lam) if e == (vi, vj) else (lam, wi)
        return make_point(e, coords)


def retract_to_skeleton(
    complex_: SimplicialComplex2,
    punctures: dict,
    samples: Sequence[Point] = (),
) -> tuple[Retraction, list[tuple[Point, Point]]]:
    """Validated retraction plus a sampled map table for the given points."""
    for t, p in punctures.items():
        t = tuple(sorted(t))
        if len(p.simplex) != 3 or p.simplex != t:
            raise PunctureError(f"puncture for {t} is not strictly interior")
        if min(p.coords) <= 1e-9:
            raise PunctureError(f"puncture for {t} lies on the boundary")
    r = Retraction(complex_, {tuple(sorted(t)): p for t, p in punctures.items()})
    table = [(p, r(p)) for p in samples]
    return r, table


def complex_to_json(complex_: SimplicialComplex2) -> dict:
    return {
        "vertices": list(complex_.vertices),
        "edges": [list(e) for e in complex_.edges],
        "triangles": [list(t) for t in complex_.triangles],
        "edge_lengths": {f"{a}-{b}": l for (a, b), l in complex_.edge_lengths.items()},
        "vertex_positions": (
            {str(v): list(p) for v, p in complex_.vertex_positions.items()}
            if complex_.vertex_positions
            else None
        ),
    }


def complex_from_json(data: dict) -> SimplicialComplex2:
    lengths = {
        tuple(int(x) for x in key.split("-")): float(l)
        for key, l in (data.get("edge_lengths") or {}).items()
    }
    positions = data.get("vertex_positions")
    if positions:
        positions = {int(v): tuple(p) for v, p in positions.items()}
    return SimplicialComplex2(
        data["vertices"], data["edges"], data.get("triangles", ()), lengths, positions
    )


def import_off_like(text: str) -> SimplicialComplex2:
    """Plain-text import: counts line, vertex coordinate lines, face lines."""
    lines = [l.strip() for l in text.splitlines() if l.strip() and not l.startswith("#")]
    if lines and lines[0].upper() == "OFF":
        lines = lines[1:]
    nv, nf = (int(x) for x in lines[0].split()[:2])
    coords = [tuple(float(x) for x in lines[1 + i].split()[:2]) for i in range(nv)]
    edges, triangles = [], []
    for i in range(nf):
        parts = [int(x) for x in lines[1 + nv + i].split()]
        arity, ids = parts[0], parts[1:]
        if arity == 2:
            edges.append(ids)
        elif arity == 3:
            triangles.append(ids)
            for pair in itertools.combinations(ids, 2):
                edges.append(list(pair))
        else:
            raise StructureError("only dimension <= 2 faces are supported")
    lengths = {}
    for e in edges:
        a, b = sorted(e)
        lengths[(a, b)] = float(
            np.linalg.norm(np.asarray(coords[a]) - np.asarray(coords[b]))
        )
    return SimplicialComplex2(
        range(nv), edges, triangles, lengths, {i: coords[i] for i in range(nv)}
    )
