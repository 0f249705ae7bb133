"""Triangulations of convex regions with tree duals, and redrawing them.

The machinery here mirrors the proof pipelines: fan-triangulate a convex
chain, subdivide a triangle with boundary Steiner vertices, redraw the whole
set on another surface with every side length copied verbatim, and read the
boundary back off as a chain.

All triangulations keep every vertex on the region boundary, which is
exactly the condition making the dual graph a tree; a tree dual is what lets
a triangulation be redrawn on any surface where the individual triangles fit,
since an edge-to-edge layout over a tree never meets a closure constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import ConvexChain, embed, is_convex
from .errors import DomainError, EmbeddabilityError
from .kernel import (
    Curvature,
    Heading,
    SurfacePoint,
    Triangle,
    canonical_start,
    geodesic_distance,
    rotate_tangent,
    solve_sss,
    tangent_toward,
    walk,
)

# Vertex-count guard for the subdivision polygon; beyond this the minmax DP
# would dominate runtime without a matching use case.
_MAX_POLYGON_VERTICES = 600


def _edge(u: int, v: int) -> frozenset:
    return frozenset((u, v))


@dataclass(frozen=True)
class BoundaryChain:
    """Raw chain read off a triangulation boundary; angles may be reflex."""

    edge_lengths: tuple[float, ...]
    interior_angles: tuple[float, ...]
    convex: bool

    def to_chain(self) -> ConvexChain:
        if not self.convex:
            raise DomainError("boundary chain is not convex")
        return ConvexChain(self.edge_lengths, self.interior_angles)


class Triangulation:
    """Triangles over shared vertex ids, with a tree dual and a boundary cycle.

    Side lengths live in a single per-edge map, so shared edges are equal by
    construction and redraws copy lengths without recomputation.  The boundary
    cycle is stored so that walking forward from ``start`` reaches ``end``
    along the primary chain route; the remaining arc is the closure route.
    """

    def __init__(self, triangles, edge_lengths, boundary, start, end, curvature,
                 side_labels=None):
        self.triangles = tuple(tuple(t) for t in triangles)
        self.edge_lengths = dict(edge_lengths)
        self.boundary = tuple(boundary)
        self.start = start
        self.end = end
        self.curvature = curvature
        self.side_labels = dict(side_labels) if side_labels else {}
        self._validate()

    # -- validation ---------------------------------------------------------

    def _validate(self):
        if not self.triangles:
            raise DomainError("triangulation needs at least one triangle")
        incidence: dict[frozenset, list[int]] = {}
        for idx, tri in enumerate(self.triangles):
            if len(set(tri)) != 3:
                raise DomainError(f"triangle #{idx} has repeated vertices: {tri}")
            for u, v in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                e = _edge(u, v)
                if e not in self.edge_lengths:
                    raise DomainError(f"triangle #{idx} references unknown edge {set(e)}")
                incidence.setdefault(e, []).append(idx)
            self.triangle_sides(idx)  # feasibility on self.curvature
        shared = 0
        for e, tris in incidence.items():
            if len(tris) > 2:
                raise DomainError(f"edge {set(e)} belongs to {len(tris)} triangles")
            shared += len(tris) == 2
        if shared != len(self.triangles) - 1 or not self._dual_connected(incidence):
            raise DomainError("dual adjacency is not a tree")
        boundary_edges = {e for e, tris in incidence.items() if len(tris) == 1}
        cycle_edges = {
            _edge(self.boundary[i], self.boundary[(i + 1) % len(self.boundary)])
            for i in range(len(self.boundary))
        }
        if len(cycle_edges) != len(self.boundary) or cycle_edges != boundary_edges:
            raise DomainError("boundary map does not traverse the outer cycle")
        if self.start not in self.boundary or self.end not in self.boundary:
            raise DomainError("designated endpoints are not boundary vertices")
        self._incidence = incidence

    def _dual_connected(self, incidence) -> bool:
        n = len(self.triangles)
        adj: list[list[int]] = [[] for _ in range(n)]
        for tris in incidence.values():
            if len(tris) == 2:
                i, j = tris
                adj[i].append(j)
                adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n

    # -- accessors ----------------------------------------------------------

    def triangle_sides(self, idx: int) -> Triangle:
        """The idx-th triangle as side lengths bound to this curvature."""
        i, j, k = self.triangles[idx]
        try:
            return Triangle(
                (
                    self.edge_lengths[_edge(j, k)],
                    self.edge_lengths[_edge(k, i)],
                    self.edge_lengths[_edge(i, j)],
                ),
                self.curvature,
            )
        except DomainError as exc:
            raise EmbeddabilityError(
                f"triangle #{idx} (vertices {self.triangles[idx]}) infeasible on "
                f"kappa={self.curvature.kappa}: {exc}"
            ) from exc

    def dual_edges(self) -> list[tuple[int, int, frozenset]]:
        """Dual tree edges as (triangle, triangle, shared vertex-pair)."""
        out = []
        for e, tris in self._incidence.items():
            if len(tris) == 2:
                out.append((tris[0], tris[1], e))
        return out

    def corner_angle(self, idx: int, vertex: int) -> float:
        """Angle of triangle idx at one of its vertices, on this surface."""
        tri = self.triangles[idx]
        if vertex not in tri:
            raise DomainError(f"vertex {vertex} is not a corner of triangle #{idx}")
        angles = solve_sss(self.triangle_sides(idx))
        return angles[tri.index(vertex)]

    def vertex_angle_sums(self) -> dict[int, float]:
        """Accumulated triangle angles at every vertex."""
        sums: dict[int, float] = {}
        for idx, tri in enumerate(self.triangles):
            angles = solve_sss(self.triangle_sides(idx))
            for v, ang in zip(tri, angles):
                sums[v] = sums.get(v, 0.0) + ang
        return sums

    def boundary_route(self, complement: bool = False) -> list[int]:
        """Boundary vertices from start to end (or the closure arc back)."""
        cycle = list(self.boundary)
        i0 = cycle.index(self.start)
        order = cycle[i0:] + cycle[:i0]
        i1 = order.index(self.end)
        if complement:
            return order[i1:] + [order[0]]
        return order[: i1 + 1]

    def export_record(self) -> dict:
        """JSON-able debugging record: triangles, dual edges, boundary cycle."""
        return {
            "kappa": self.curvature.kappa,
            "triangles": [
                {
                    "vertices": list(t),
                    "sides": list(self.triangle_sides(i).sides),
                }
                for i, t in enumerate(self.triangles)
            ],
            "dual_edges": sorted((i, j) for i, j, _ in self.dual_edges()),
            "boundary": {
                "cycle": list(self.boundary),
                "start": self.start,
                "end": self.end,
            },
        }


# ---------------------------------------------------------------------------
# Fan triangulation of a convex chain
# ---------------------------------------------------------------------------

def fan_triangulate(chain: ConvexChain, curv: Curvature) -> Triangulation:
    """Triangulate the closed convex chain by diagonals from its first vertex."""
    if chain.n_edges < 2:
        raise DomainError("fan triangulation needs a chain with at least two edges")
    if not is_convex(chain, curv):
        raise DomainError("fan triangulation requires a convex chain")
    emb = embed(chain, curv)
    n = chain.n_edges
    edge_lengths = {}
    side_labels = {}
    for i, e in enumerate(chain.edge_lengths):
        edge_lengths[_edge(i, i + 1)] = e
        side_labels[_edge(i, i + 1)] = f"chain[{i}]"
    for i in range(2, n + 1):
        edge_lengths[_edge(0, i)] = geodesic_distance(
            emb.vertices[0], emb.vertices[i], curv
        )
    side_labels[_edge(0, n)] = "closing"
    triangles = [(0, i, i + 1) for i in range(1, n)]
    return Triangulation(
        triangles,
        edge_lengths,
        boundary=range(n + 1),
        start=0,
        end=n,
        curvature=curv,
        side_labels=side_labels,
    )


# ---------------------------------------------------------------------------
# Steiner subdivision of a single triangle
# ---------------------------------------------------------------------------

def _embed_triangle(tri: Triangle) -> list[SurfacePoint]:
    """Corners [a, b, c] placed at the canonical origin, CCW."""
    A, B, C = tri.sides
    alpha = solve_sss(tri).alpha
    h = canonical_start(tri.curvature)
    pa = h.point
    pb, _ = walk(pa, h, C, tri.curvature)
    vec = rotate_tangent(pa, h.vec, alpha)
    pc, _ = walk(pa, Heading(pa, vec), B, tri.curvature)
    return [pa, pb, pc]


def _between(p: SurfacePoint, q: SurfacePoint, frac: float) -> SurfacePoint:
    """Point a fraction of the way along the minimal geodesic from p to q."""
    curv = p.curvature
    if curv.is_flat:
        return SurfacePoint((1.0 - frac) * p.coords + frac * q.coords, curv)
    omega = math.atan2(
        np.linalg.norm(np.cross(p.coords, q.coords)), float(np.dot(p.coords, q.coords))
    )
    if omega == 0.0:
        return p
    coords = (
        math.sin((1.0 - frac) * omega) * p.coords + math.sin(frac * omega) * q.coords
    ) / math.sin(omega)
    return SurfacePoint(coords / np.linalg.norm(coords), curv)


def _minmax_triangulation(dist, neighbors_forbidden):
    """Interval DP: triangulation of a convex polygon minimizing the longest edge.

    dist is the full vertex-to-vertex distance matrix in cycle order;
    neighbors_forbidden(i, k, j) masks degenerate splits (three collinear
    boundary points).  Returns (max_edge, list of index triangles).
    """
    m = dist.shape[0]
    diag = dist.copy()
    for i in range(m):
        diag[i, (i + 1) % m] = 0.0
        diag[(i + 1) % m, i] = 0.0
    best = np.zeros((m, m))
    split = -np.ones((m, m), dtype=int)
    for span in range(2, m):
        for i in range(0, m - span):
            j = i + span
            ks = np.arange(i + 1, j)
            cand = np.maximum(best[i, i + 1 : j], best[i + 1 : j, j])
            cand = np.maximum(cand, diag[i, i + 1 : j])
            cand = np.maximum(cand, diag[i + 1 : j, j])
            bad = neighbors_forbidden(i, ks, j)
            if bad.any():
                cand = np.where(bad, np.inf, cand)
            pick = int(np.argmin(cand))
            best[i, j] = cand[pick]
            split[i, j] = ks[pick]
    triangles = []
    stack = [(0, m - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        k = int(split[i, j])
        triangles.append((i, k, j))
        stack.append((i, k))
        stack.append((k, j))
    return float(best[0, m - 1]), triangles


def steiner_subdivide(tri: Triangle, ell: float) -> Triangulation:
    """Subdivide a triangle so every edge is at most 2*ell, dual kept a tree.

    Steiner vertices go on the original sides only (interior vertices would
    put a cycle in the dual and block redrawing), each side split into
    ceil(side/ell) equal geodesic pieces, and the resulting convex polygon is
    triangulated to minimize its longest edge.  If even the optimal
    triangulation exceeds 2*ell the bound is unreachable without interior
    vertices and an embeddability error is raised.

    When no side exceeds 2*ell the triangle is returned as is.
    """
    if not (math.isfinite(ell) and ell > 0.0):
        raise DomainError(f"subdivision length must be positive, got {ell}")
    A, B, C = tri.sides
    curv = tri.curvature
    base_idx = min(range(3), key=lambda i: tri.sides[i])
    corners = _embed_triangle(tri)
    # Route the boundary so start -> apex -> end walks the two legs and the
    # closure arc runs along the shortest (base) side.
    apex = base_idx
    u, w = (base_idx + 1) % 3, (base_idx + 2) % 3

    if max(A, B, C) <= 2.0 * ell:
        edge_lengths = {
            _edge(1, 2): A,
            _edge(0, 2): B,
            _edge(0, 1): C,
        }
        side_labels = {_edge(1, 2): "A", _edge(0, 2): "B", _edge(0, 1): "C"}
        return Triangulation(
            [(0, 1, 2)],
            edge_lengths,
            boundary=[u, apex, w],
            start=u,
            end=w,
            curvature=curv,
            side_labels=side_labels,
        )

    side_names = {_edge(1, 2): "A", _edge(0, 2): "B", _edge(0, 1): "C"}
    side_lengths = {_edge(1, 2): A, _edge(0, 2): B, _edge(0, 1): C}

    points: list[SurfacePoint] = []
    sides_of: list[set] = []     # original side membership per polygon vertex
    labels: list[str | None] = []  # side label of the piece starting here
    piece_lengths: list[float] = []
    cycle_corner_index = {}

    for va, vb in ((u, apex), (apex, w), (w, u)):
        e = _edge(va, vb)
        name = side_names[e]
        length = side_lengths[e]
        k = max(1, math.ceil(length / ell))
        cycle_corner_index[va] = len(points)
        points.append(corners[va])
        sides_of.append({n for key, n in side_names.items() if va in key})
        labels.append(name)
        piece_lengths.append(length / k)
        for step in range(1, k):
            points.append(_between(corners[va], corners[vb], step / k))
            sides_of.append({name})
            labels.append(name)
            piece_lengths.append(length / k)

    m = len(points)
    if m > _MAX_POLYGON_VERTICES:
        raise DomainError(
            f"subdivision polygon has {m} vertices; ell={ell} is too fine"
        )

    coords = np.array([p.coords for p in points])
    if curv.is_flat:
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=-1))
    else:
        dots = np.clip(coords @ coords.T, -1.0, 1.0)
        dist = np.arccos(dots) / curv.sqrt_kappa

    def forbidden(i, ks, j):
        common_ij = sides_of[i] & sides_of[j]
        if not common_ij:
            return np.zeros(len(ks), dtype=bool)
        return np.array([bool(common_ij & sides_of[int(k)]) for k in ks])

    max_edge, idx_triangles = _minmax_triangulation(dist, forbidden)
    if max_edge > 2.0 * ell * (1.0 + 1e-12):
        raise EmbeddabilityError(
            f"no boundary-vertex triangulation of sides {tri.sides} reaches the "
            f"edge bound {2.0 * ell}; optimum is {max_edge}. Interior Steiner "
            f"vertices would break the tree dual."
        )

    edge_lengths = {}
    side_labels = {}
    for i in range(m):
        j = (i + 1) % m
        e = _edge(i, j)
        edge_lengths[e] = piece_lengths[i]
        side_labels[e] = labels[i]
    for (i, k, j) in idx_triangles:
        for x, y in ((i, k), (k, j), (i, j)):
            e = _edge(x, y)
            if e not in edge_lengths:
                edge_lengths[e] = float(dist[x, y])

    return Triangulation(
        idx_triangles,
        edge_lengths,
        boundary=range(m),
        start=cycle_corner_index[u],
        end=cycle_corner_index[w],
        curvature=curv,
        side_labels=side_labels,
    )


def fan_over_base(tri: Triangle, pieces: int, base: int = 0) -> Triangulation:
    """Fan triangulation from the vertex opposite one side, subdividing that side.

    This is the construction used to compare a straight side against its bent
    image on another sphere: the chosen base splits into equal subsegments and
    every subsegment spans a thin triangle with the opposite vertex.
    """
    if pieces < 1:
        raise DomainError(f"need at least one base piece, got {pieces}")
    if base not in (0, 1, 2):
        raise DomainError(f"base side index must be 0, 1 or 2, got {base}")
    sides = tri.sides
    curv = tri.curvature
    apex = base
    u, w = (base + 1) % 3, (base + 2) % 3
    # Embed with the apex role rotated so corner placement matches labels.
    rotated = Triangle((sides[base], sides[(base + 1) % 3], sides[(base + 2) % 3]), curv)
    pa, pb, pc = _embed_triangle(rotated)
    corner_pts = {apex: pa, u: pb, w: pc}

    base_len = sides[base]
    leg_u = sides[(base + 2) % 3]  # |u - apex|
    leg_w = sides[(base + 1) % 3]  # |w - apex|

    points = {0: corner_pts[u], 1: corner_pts[apex], 2: corner_pts[w]}
    base_ids = [0]
    for j in range(1, pieces):
        vid = 2 + j
        points[vid] = _between(corner_pts[u], corner_pts[w], j / pieces)
        base_ids.append(vid)
    base_ids.append(2)

    edge_lengths = {_edge(0, 1): leg_u, _edge(1, 2): leg_w}
    side_labels = {_edge(0, 1): "leg_u", _edge(1, 2): "leg_w"}
    for i in range(pieces):
        e = _edge(base_ids[i], base_ids[i + 1])
        edge_lengths[e] = base_len / pieces
        side_labels[e] = "base"
    for j in range(1, pieces):
        vid = base_ids[j]
        edge_lengths[_edge(1, vid)] = geodesic_distance(points[1], points[vid], curv)

    triangles = [(1, base_ids[i], base_ids[i + 1]) for i in range(pieces)]
    boundary = [0, 1, 2] + list(reversed(base_ids[1:-1]))
    return Triangulation(
        triangles,
        edge_lengths,
        boundary=boundary,
        start=0,
        end=2,
        curvature=curv,
        side_labels=side_labels,
    )


# ---------------------------------------------------------------------------
# Redraw and layout
# ---------------------------------------------------------------------------

def redraw(tri_set: Triangulation, target: Curvature) -> Triangulation:
    """Same triangles, same adjacency, same lengths, on another surface.

    Every side length is copied, never recomputed; feasibility of each
    triangle on the target surface is checked up front, and the edge-to-edge
    layout is exercised to certify the redraw is realizable.
    """
    redrawn = Triangulation(
        tri_set.triangles,
        tri_set.edge_lengths,
        tri_set.boundary,
        tri_set.start,
        tri_set.end,
        target,
        side_labels=tri_set.side_labels,
    )
    layout(redrawn)
    return redrawn


def layout(tri_set: Triangulation) -> dict[int, SurfacePoint]:
    """Place all vertices by walking the dual tree edge-to-edge from the root.

    The root triangle sits at the canonical origin; each child triangle is
    attached across its shared edge by an SAS construction on the side
    opposite its parent.  With a tree dual there is no cycle to close, so the
    placement always exists when the triangles individually fit.
    """
    curv = tri_set.curvature
    pos: dict[int, SurfacePoint] = {}

    i0, i1, i2 = tri_set.triangles[0]
    pa, pb, pc = _embed_triangle(tri_set.triangle_sides(0))
    pos[i0], pos[i1], pos[i2] = pa, pb, pc

    adj: dict[int, list[tuple[int, frozenset]]] = {}
    for i, j, e in tri_set.dual_edges():
        adj.setdefault(i, []).append((j, e))
        adj.setdefault(j, []).append((i, e))

    placed = {0}
    stack = [0]
    while stack:
        parent = stack.pop()
        for child, shared in adj.get(parent, []):
            if child in placed:
                continue
            placed.add(child)
            stack.append(child)
            tri = tri_set.triangles[child]
            (wv,) = [v for v in tri if v not in shared]
            if wv in pos:
                continue
            uv, vv = tuple(shared)
            ref = [v for v in tri_set.triangles[parent] if v not in shared][0]
            pos[wv] = _place_apex(
                pos[uv],
                pos[vv],
                tri_set.edge_lengths[_edge(uv, wv)],
                tri_set.edge_lengths[_edge(vv, wv)],
                pos[ref],
                curv,
            )

    for e, length in tri_set.edge_lengths.items():
        u, v = tuple(e)
        if u in pos and v in pos:
            d = geodesic_distance(pos[u], pos[v], curv)
            if abs(d - length) > 1e-9 * max(1.0, length):
                raise EmbeddabilityError(
                    f"layout failed to reproduce edge {set(e)}: {d} vs {length}"
                )
    return pos


def _place_apex(pu, pv, lu, lv, ref, curv):
    """Third vertex at distances (lu, lv) from (pu, pv), on the side away from ref."""
    base = geodesic_distance(pu, pv, curv)
    # Angle at pu between the edges toward pv and toward the new vertex.
    ang = solve_sss(Triangle((lv, base, lu), curv)).alpha
    direction = tangent_toward(pu, pv)
    candidates = []
    for sign in (1.0, -1.0):
        vec = rotate_tangent(pu, direction, sign * ang)
        cand, _ = walk(pu, Heading(pu, vec), lu, curv)
        candidates.append(cand)
    first, second = candidates
    if geodesic_distance(first, ref, curv) >= geodesic_distance(second, ref, curv):
        return first
    return second


# ---------------------------------------------------------------------------
# Boundary extraction
# ---------------------------------------------------------------------------

def boundary_chain(tri_set: Triangulation, complement: bool = False,
                   raw: bool = False):
    """Chain along the boundary from start to end, angles summed per vertex.

    The designated endpoints contribute no angle.  With raw=True the result
    is returned even when some accumulated angle reaches pi or beyond (a bent
    or reflex image), flagged instead of rejected.
    """
    route = tri_set.boundary_route(complement=complement)
    if len(route) < 2:
        raise DomainError("boundary route has no edges")
    sums = tri_set.vertex_angle_sums()
    lengths = tuple(
        tri_set.edge_lengths[_edge(route[i], route[i + 1])]
        for i in range(len(route) - 1)
    )
    angles = tuple(sums[v] for v in route[1:-1])
    convex = all(0.0 < t < math.pi for t in angles)
    result = BoundaryChain(lengths, angles, convex)
    if raw:
        return result
    return result.to_chain()
