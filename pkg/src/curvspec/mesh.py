"""Graded straight-edge triangulations of geodesic triangles.

Meshes live in the Poincare chart of a *frame*: an isometry moving a chosen
anchor vertex to the chart origin.  The generator places boundary nodes by
integrating a size function along each geodesic edge, fills the interior by
repeated circumcentre insertion on a Delaunay triangulation, then smooths
interior nodes.  Domain tests go through the Klein chart, where the triangle
is a straight-edged convex polygon.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from . import geometry as geo
from .exceptions import DomainError, MeshFailure

EDGE_SLACK = 0.05  # allowed relative overshoot of the element diameter over h
_SIZE_SCALE = 1.0 / 1.15  # internal target length relative to the local size
_INSIDE_TOL = 1e-12


def default_grading(t: geo.GeodesicTriangle, g: float = 2.0) -> np.ndarray:
    """Grade obtuse vertices and vertices where a Dirichlet edge meets a Neumann edge."""
    ang = t.angles()
    out = np.ones(3)
    for v in range(3):
        adjacent = [t.bc[(v + 1) % 3], t.bc[(v + 2) % 3]]
        mixed = adjacent[0] != adjacent[1]
        if ang[v] > math.pi / 2 + geo.ANGLE_TOL or mixed:
            out[v] = g
    return out


def choose_frame(t: geo.GeodesicTriangle) -> geo.Isometry:
    """Frame isometry: anchor vertex at the origin where possible."""
    dirichlet = [i for i, b in enumerate(t.bc) if b == geo.DIRICHLET]
    if len(dirichlet) == 1:
        anchor = dirichlet[0]
    else:
        anchor = int(np.argmax(t.angles()))
    if t.kappa > 0:
        sides = t.sides()
        reach = max(sides[(anchor + 1) % 3], sides[(anchor + 2) % 3])
        if reach >= 0.45 * math.pi / math.sqrt(t.kappa):
            return geo.centroid_isometry(t)
    return geo.frame_isometry(t, anchor)


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    nodes: np.ndarray
    elements: np.ndarray
    boundary: np.ndarray  # rows (i, j, edge index)
    vertex_nodes: np.ndarray
    h: float
    grading: np.ndarray
    kappa: float
    frame: geo.Isometry
    frame_klein: np.ndarray  # triangle vertices in frame Klein coordinates
    triangle: geo.GeodesicTriangle
    level: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    # -- basic geometry ---------------------------------------------------
    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def bc(self) -> tuple:
        return self.triangle.bc

    def klein_nodes(self) -> np.ndarray:
        return geo.poincare_to_klein(self.nodes, self.kappa)

    def element_areas(self) -> np.ndarray:
        p = self.nodes[self.elements]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def element_diameters(self) -> np.ndarray:
        p = self.nodes[self.elements]
        lens = np.stack([np.linalg.norm(p[:, (i + 1) % 3] - p[:, i], axis=1) for i in range(3)], axis=1)
        return lens.max(axis=1)

    def quality(self) -> np.ndarray:
        """Inradius over diameter per element."""
        p = self.nodes[self.elements]
        lens = np.stack([np.linalg.norm(p[:, (i + 1) % 3] - p[:, i], axis=1) for i in range(3)], axis=1)
        area = np.abs(self.element_areas())
        return 2.0 * area / lens.sum(axis=1) / lens.max(axis=1)

    def max_diameter(self) -> float:
        return float(self.element_diameters().max())

    def node_edge_mask(self) -> np.ndarray:
        """Boolean ``(n, 3)``: node lies on triangle edge ``i``."""
        if "edge_mask" not in self._cache:
            mask = np.zeros((self.n_nodes, 3), dtype=bool)
            for i, j, e in self.boundary:
                mask[i, e] = True
                mask[j, e] = True
            self._cache["edge_mask"] = mask
        return self._cache["edge_mask"]

    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.node_edge_mask().any(axis=1))

    def interior_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.node_edge_mask().any(axis=1))

    def edge_chain(self, e: int) -> np.ndarray:
        """Ordered node indices along edge ``e`` from vertex ``e+1`` to vertex ``e+2``."""
        key = ("chain", e)
        if key not in self._cache:
            rows = self.boundary[self.boundary[:, 2] == e]
            nbr: dict = {}
            for i, j, _ in rows:
                nbr.setdefault(int(i), []).append(int(j))
                nbr.setdefault(int(j), []).append(int(i))
            start = int(self.vertex_nodes[(e + 1) % 3])
            chain = [start]
            prev = -1
            cur = start
            while True:
                nxt = [n for n in nbr.get(cur, []) if n != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                chain.append(cur)
                if cur == int(self.vertex_nodes[(e + 2) % 3]):
                    break
            self._cache[key] = np.array(chain, dtype=int)
        return self._cache[key]

    def neighbors(self) -> list:
        """Node adjacency lists (sorted)."""
        if "nbrs" not in self._cache:
            edges = self.edges()
            nb = [[] for _ in range(self.n_nodes)]
            for a, b in edges:
                nb[a].append(b)
                nb[b].append(a)
            self._cache["nbrs"] = [np.array(sorted(x), dtype=int) for x in nb]
        return self._cache["nbrs"]

    def edges(self) -> np.ndarray:
        if "edges" not in self._cache:
            e = np.concatenate([self.elements[:, [0, 1]], self.elements[:, [1, 2]], self.elements[:, [2, 0]]])
            e = np.sort(e, axis=1)
            self._cache["edges"] = np.unique(e, axis=0)
        return self._cache["edges"]

    def metric_area(self) -> float:
        from .fem import assemble_mass
        return float(assemble_mass(self).sum())

    # -- chart plumbing ---------------------------------------------------
    def to_original(self, xy, chart: str = geo.KLEIN) -> np.ndarray:
        """Map frame Poincare coordinates to the triangle's own chart (or ``chart``)."""
        k = geo.poincare_to_klein(np.asarray(xy, float), self.kappa)
        k = self.frame.inverse().apply(k)
        return geo.from_klein(k, chart, self.kappa)

    def from_original(self, xy, chart: str = geo.KLEIN) -> np.ndarray:
        k = geo.to_klein(np.asarray(xy, float), chart, self.kappa)
        return geo.klein_to_poincare(self.frame.apply(k), self.kappa)

    def contains(self, xy, tol: float = 1e-9) -> np.ndarray:
        return _inside_klein(geo.poincare_to_klein(np.asarray(xy, float), self.kappa), self.frame_klein, tol)

    def barycentric(self, xy) -> np.ndarray:
        return _barycentric(geo.poincare_to_klein(np.asarray(xy, float), self.kappa), self.frame_klein)

    def project_to_edge(self, xy, e: int) -> np.ndarray:
        k = geo.poincare_to_klein(np.asarray(xy, float), self.kappa)
        a = self.frame_klein[(e + 1) % 3]
        b = self.frame_klein[(e + 2) % 3]
        d = b - a
        s = np.clip(((k - a) @ d) / (d @ d), 0.0, 1.0)
        return geo.klein_to_poincare(a + s[..., None] * d, self.kappa)

    def with_kappa(self, kappa: float) -> "TriangleMesh":
        """Same Klein node set and connectivity reinterpreted at another curvature."""
        kappa = geo.check_kappa(kappa)
        kn = self.klein_nodes()
        nodes = geo.klein_to_poincare(kn, kappa)
        M = self.frame.matrix
        if np.allclose(M[0], [1, 0, 0]) and np.allclose(M[:, 0], [1, 0, 0]):
            # rotations and flips act identically on Klein coordinates for every curvature
            frame = geo.Isometry(kappa, M)
            orig = frame.inverse().apply(self.frame_klein)
        else:
            # other frames are curvature dependent, so the frame chart itself becomes the original chart
            frame = geo.Isometry.identity(kappa)
            orig = self.frame_klein
        tri = geo.GeodesicTriangle(kappa, orig, geo.KLEIN, self.bc)
        return TriangleMesh(nodes, self.elements, self.boundary, self.vertex_nodes, self.h,
                            self.grading, kappa, frame, self.frame_klein, tri, self.level)

    def to_json(self) -> dict:
        return {
            "nodes": self.nodes.tolist(),
            "elements": self.elements.tolist(),
            "boundary": self.boundary.tolist(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# ---------------------------------------------------------------------------
# helpers


def _barycentric(k: np.ndarray, verts: np.ndarray) -> np.ndarray:
    a, b, c = verts
    T = np.array([[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]])
    sol = np.linalg.solve(T, (np.asarray(k) - a).reshape(-1, 2).T).T
    lam = np.column_stack([1 - sol.sum(axis=1), sol])
    return lam.reshape(np.shape(k)[:-1] + (3,))


def _inside_klein(k: np.ndarray, verts: np.ndarray, tol: float = _INSIDE_TOL) -> np.ndarray:
    return np.all(_barycentric(k, verts) >= -tol, axis=-1)


class _Sizer:
    """Local target size in Poincare chart units."""

    def __init__(self, h: float, vertices: np.ndarray, grading: np.ndarray, radii: np.ndarray):
        self.h = h
        self.vertices = vertices
        self.grading = np.asarray(grading, float)
        self.radii = radii

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, float)
        s = np.full(xy.shape[:-1], self.h)
        for v in range(3):
            g = self.grading[v]
            if g <= 1.0:
                continue
            R = self.radii[v]
            r = np.linalg.norm(xy - self.vertices[v], axis=-1)
            floor = max(self.h * (self.h / R) ** (g - 1.0), self.h / 40.0)
            sv = self.h * np.power(np.maximum(r / R, 1e-300), 1.0 - 1.0 / g)
            s = np.minimum(s, np.maximum(sv, floor))
        return s


def _place_edge(kv_a, kv_b, kappa: float, sizer: _Sizer, n_samples: int = 4000) -> np.ndarray:
    """Nodes along the geodesic from Klein ``kv_a`` to ``kv_b`` (endpoints included), Poincare coords."""
    t = np.linspace(0.0, 1.0, n_samples)
    pk = kv_a + t[:, None] * (kv_b - kv_a)
    pp = geo.klein_to_poincare(pk, kappa)
    ds = np.linalg.norm(np.diff(pp, axis=0), axis=1)
    mid = 0.5 * (pp[1:] + pp[:-1])
    dens = ds / (sizer(mid) * _SIZE_SCALE)
    F = np.concatenate([[0.0], np.cumsum(dens)])
    n = max(1, int(math.ceil(F[-1] - 1e-9)))
    targets = np.linspace(0.0, F[-1], n + 1)
    ts = np.interp(targets, F, t)
    ts[0], ts[-1] = 0.0, 1.0
    return geo.klein_to_poincare(kv_a + ts[:, None] * (kv_b - kv_a), kappa)


def _triangulate(points: np.ndarray, frame_klein: np.ndarray, kappa: float) -> np.ndarray:
    tri = Delaunay(points, qhull_options="Qbb Qc Qz Q12")
    el = tri.simplices.astype(np.int64)
    cen = points[el].mean(axis=1)
    keep = _inside_klein(geo.poincare_to_klein(cen, kappa), frame_klein, 1e-12)
    el = el[keep]
    p = points[el]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    area = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    el[area < 0] = el[area < 0][:, [0, 2, 1]]
    area = np.abs(area)
    el = el[area > 1e-14 * max(area.max(), 1e-300)] if len(area) else el
    order = np.lexsort((el[:, 2], el[:, 1], el[:, 0])) if len(el) else np.array([], int)
    return el[order]


def _circumcenters(p: np.ndarray) -> np.ndarray:
    a, b, c = p[:, 0], p[:, 1], p[:, 2]
    d = 2 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
    a2, b2, c2 = (np.sum(x * x, axis=1) for x in (a, b, c))
    ux = (a2 * (b[:, 1] - c[:, 1]) + b2 * (c[:, 1] - a[:, 1]) + c2 * (a[:, 1] - b[:, 1])) / d
    uy = (a2 * (c[:, 0] - b[:, 0]) + b2 * (a[:, 0] - c[:, 0]) + c2 * (b[:, 0] - a[:, 0])) / d
    return np.column_stack([ux, uy])


def _greedy_spacing(cands: np.ndarray, radius: np.ndarray, existing: cKDTree) -> np.ndarray:
    """Deterministically keep candidates that are far from existing points and each other."""
    if len(cands) == 0:
        return cands
    d, _ = existing.query(cands)
    ok = d >= radius
    cands = cands[ok]
    radius = radius[ok]
    if len(cands) == 0:
        return cands
    tree = cKDTree(cands)
    taken = np.zeros(len(cands), dtype=bool)
    blocked = np.zeros(len(cands), dtype=bool)
    for i in range(len(cands)):
        if blocked[i]:
            continue
        taken[i] = True
        for j in tree.query_ball_point(cands[i], radius[i]):
            if j > i:
                blocked[j] = True
    return cands[taken]


def _edge_lengths(p: np.ndarray) -> np.ndarray:
    return np.stack([np.linalg.norm(p[:, (i + 1) % 3] - p[:, i], axis=1) for i in range(3)], axis=1)


def _smooth(points: np.ndarray, elements: np.ndarray, n_fixed: int, sizer: _Sizer,
            frame_klein: np.ndarray, kappa: float, iters: int) -> np.ndarray:
    """Optimal-Delaunay smoothing: free nodes move to density-weighted circumcentre averages."""
    pts = points.copy()
    n = len(pts)
    for _ in range(iters):
        p = pts[elements]
        cc = _circumcenters(p)
        cen = p.mean(axis=1)
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        w = area / sizer(cen) ** 2
        acc = np.zeros((n, 2))
        wsum = np.zeros(n)
        for c in range(3):
            np.add.at(acc, elements[:, c], w[:, None] * cc)
            np.add.at(wsum, elements[:, c], w)
        new = pts.copy()
        free = np.arange(n_fixed, n)
        free = free[wsum[free] > 0]
        new[free] = acc[free] / wsum[free, None]
        inside = _inside_klein(geo.poincare_to_klein(new[free], kappa), frame_klein, -1e-9)
        new[free[~inside]] = pts[free[~inside]]
        # reject moves that invert an element in the current connectivity
        p = new[elements]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        bad = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) <= 0
        if np.any(bad):
            revert = np.unique(elements[bad])
            revert = revert[revert >= n_fixed]
            new[revert] = pts[revert]
        pts = new
        elements = _triangulate(pts, frame_klein, kappa)
    return pts


def _prune_flat_boundary(pts: np.ndarray, elements: np.ndarray, n_fixed: int,
                         ratio: float = 0.4) -> np.ndarray:
    """Drop free nodes sitting too close to a boundary segment they form an element with."""
    p = pts[elements]
    fixed = elements < n_fixed
    two = fixed.sum(axis=1) == 2
    drop = set()
    for k in np.flatnonzero(two):
        el = elements[k]
        fr = el[~fixed[k]][0]
        a, b = pts[el[fixed[k]]]
        d = b - a
        L = np.linalg.norm(d)
        r = pts[fr] - a
        dist = abs(d[0] * r[1] - d[1] * r[0]) / L
        if dist < ratio * L:
            drop.add(int(fr))
    del p
    if not drop:
        return pts
    keep = np.ones(len(pts), dtype=bool)
    keep[sorted(drop)] = False
    return pts[keep]


def _check_conforming(elements: np.ndarray, boundary: np.ndarray, n_nodes: int) -> None:
    e = np.concatenate([elements[:, [0, 1]], elements[:, [1, 2]], elements[:, [2, 0]]])
    e = np.sort(e, axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    if np.any(counts > 2):
        raise MeshFailure("an edge is shared by more than two elements")
    mesh_bdry = {tuple(x) for x in uniq[counts == 1]}
    want = {tuple(sorted((int(i), int(j)))) for i, j, _ in boundary}
    if mesh_bdry != want:
        raise MeshFailure("triangulation does not conform to the boundary polyline")
    used = np.zeros(n_nodes, dtype=bool)
    used[elements.ravel()] = True
    if not used.all():
        raise MeshFailure("mesh has orphan nodes")


# ---------------------------------------------------------------------------
# public API


def generate(t: geo.GeodesicTriangle, h: float, grading=None, frame: geo.Isometry | None = None,
             smoothing: int = 6) -> TriangleMesh:
    """Triangulate ``t`` in the Poincare chart of its frame.

    ``grading`` may be a scalar (applied to the vertices that need grading,
    see :func:`default_grading`), a length-3 sequence, or ``None`` for the
    default exponent 2.  ``frame`` overrides the automatic frame choice.
    """
    h = float(h)
    sides_chart = None
    if frame is None:
        frame = choose_frame(t)
    kappa = t.kappa
    fk = frame.apply(t.klein_vertices)
    verts = geo.klein_to_poincare(fk, kappa)
    sides_chart = np.array([np.linalg.norm(verts[(i + 1) % 3] - verts[(i + 2) % 3]) for i in range(3)])
    if not (0 < h <= sides_chart.min() / 4 * (1 + 1e-9)):
        raise DomainError(f"mesh size {h} outside (0, min side/4 = {sides_chart.min() / 4:.6g}]")
    if grading is None:
        gv = default_grading(t)
    elif np.ndim(grading) == 0:
        if float(grading) < 1:
            raise DomainError("grading must be >= 1")
        gv = np.where(default_grading(t) > 1, float(grading), 1.0)
    else:
        gv = np.asarray(grading, float)
        if gv.shape != (3,) or np.any(gv < 1):
            raise DomainError("grading must be >= 1 at every vertex")
    radii = np.array([0.4 * min(sides_chart[(v + 1) % 3], sides_chart[(v + 2) % 3]) for v in range(3)])
    sizer = _Sizer(h, verts, gv, radii)

    # boundary
    pts = [verts[0], verts[1], verts[2]]
    boundary = []
    for e in range(3):
        a, b = (e + 1) % 3, (e + 2) % 3
        chain = _place_edge(fk[a], fk[b], kappa, sizer)
        idx = [a]
        for p in chain[1:-1]:
            idx.append(len(pts))
            pts.append(p)
        idx.append(b)
        for i in range(len(idx) - 1):
            boundary.append((idx[i], idx[i + 1], e))
    pts = np.array(pts)
    boundary = np.array(boundary, dtype=np.int64)
    n_fixed = len(pts)
    bdry_tree = cKDTree(pts)

    def fill(points: np.ndarray, max_rounds: int = 200) -> np.ndarray:
        for _ in range(max_rounds):
            el = _triangulate(points, fk, kappa)
            p = points[el]
            lens = _edge_lengths(p)
            cen = p.mean(axis=1)
            target = sizer(cen) * _SIZE_SCALE
            bad = lens.max(axis=1) > 1.1 * target
            if not np.any(bad):
                return points
            cc = _circumcenters(p[bad])
            tb = target[bad]
            inside = _inside_klein(geo.poincare_to_klein(cc, kappa), fk, -1e-12)
            cc = np.where(inside[:, None], cc, cen[bad])
            order = np.argsort(-lens[bad].max(axis=1) / tb, kind="stable")
            cc = cc[order]
            tb = tb[order]
            tb_all = tb
            db, _ = bdry_tree.query(cc)
            cc, tb = cc[db > 0.6 * tb], tb[db > 0.6 * tb]
            new = _greedy_spacing(cc, 0.55 * tb, cKDTree(points))
            if len(new) == 0:
                # fall back to centroids of the offending elements
                cc = cen[bad][order]
                db, _ = bdry_tree.query(cc)
                keep = db > 0.45 * tb_all
                new = _greedy_spacing(cc[keep], 0.4 * tb_all[keep], cKDTree(points))
                if len(new) == 0:
                    return points
            points = np.vstack([points, new])
        return points

    pts = fill(pts)
    pts = _smooth(pts, _triangulate(pts, fk, kappa), n_fixed, sizer, fk, kappa, smoothing)
    pts = fill(pts)
    pts = _smooth(pts, _triangulate(pts, fk, kappa), n_fixed, sizer, fk, kappa, 2)
    for _ in range(4):
        pruned = _prune_flat_boundary(pts, _triangulate(pts, fk, kappa), n_fixed)
        if len(pruned) == len(pts):
            break
        pts = _smooth(pruned, _triangulate(pruned, fk, kappa), n_fixed, sizer, fk, kappa, 2)
    elements = _triangulate(pts, fk, kappa)
    _check_conforming(elements, boundary, len(pts))
    mesh = TriangleMesh(pts, elements, boundary, np.array([0, 1, 2]), h, gv, kappa, frame, fk, t, 0)
    _validate(mesh)
    return mesh


def refine(m: TriangleMesh) -> TriangleMesh:
    """Uniform quadrisection; boundary midpoints are projected onto the exact edges."""
    el = m.elements
    n = m.n_nodes
    e = np.concatenate([el[:, [0, 1]], el[:, [1, 2]], el[:, [2, 0]]])
    es = np.sort(e, axis=1)
    uniq, inv = np.unique(es, axis=0, return_inverse=True)
    inv = inv.reshape(3, -1).T  # per element: edge ids of (01, 12, 20)
    mids = 0.5 * (m.nodes[uniq[:, 0]] + m.nodes[uniq[:, 1]])
    edge_index = {(int(a), int(b)): i for i, (a, b) in enumerate(uniq)}
    new_boundary = []
    for i, j, tag in m.boundary:
        key = (min(i, j), max(i, j))
        eid = edge_index[key]
        mids[eid] = m.project_to_edge(mids[eid], int(tag))
        new_boundary.append((i, n + eid, tag))
        new_boundary.append((n + eid, j, tag))
    nodes = np.vstack([m.nodes, mids])
    m01, m12, m20 = n + inv[:, 0], n + inv[:, 1], n + inv[:, 2]
    a, b, c = el[:, 0], el[:, 1], el[:, 2]
    new_el = np.concatenate([
        np.column_stack([a, m01, m20]),
        np.column_stack([m01, b, m12]),
        np.column_stack([m20, m12, c]),
        np.column_stack([m01, m12, m20]),
    ])
    out = TriangleMesh(nodes, new_el, np.array(new_boundary, dtype=np.int64), m.vertex_nodes, m.h / 2,
                       m.grading, m.kappa, m.frame, m.frame_klein, m.triangle, m.level + 1)
    _validate(out)
    return out


def _validate(m: TriangleMesh) -> None:
    area = m.element_areas()
    if np.any(area <= 0):
        raise MeshFailure("mesh has non-positively oriented elements")
    kn = m.klein_nodes()
    if not np.all(_inside_klein(kn, m.frame_klein, 1e-9)):
        raise MeshFailure("mesh nodes outside the triangle")
    if not np.all(geo.in_domain(m.nodes, geo.POINCARE, m.kappa)):
        raise MeshFailure("mesh nodes outside the chart domain")


def ladder(t: geo.GeodesicTriangle, h: float, levels: int, grading=None, **kw) -> list:
    """Mesh at ``h`` followed by ``levels - 1`` uniform refinements."""
    meshes = [generate(t, h, grading, **kw)]
    for _ in range(levels - 1):
        meshes.append(refine(meshes[-1]))
    return meshes


def boundary_deviation(m: TriangleMesh) -> float:
    """Largest Klein-chart distance of a boundary node from its parent edge line."""
    kn = m.klein_nodes()
    worst = 0.0
    for i, j, e in m.boundary:
        a = m.frame_klein[(e + 1) % 3]
        b = m.frame_klein[(e + 2) % 3]
        d = b - a
        nrm = np.linalg.norm(d)
        for q in (i, j):
            r = kn[q] - a
            worst = max(worst, abs(d[0] * r[1] - d[1] * r[0]) / nrm)
    return worst
