"""Post-processing of discrete eigenfunctions.

Gradients are recovered by polynomial-preserving recovery: a least-squares
quadratic is fitted on each node patch, with patches next to the boundary
completed by reflecting nodes across the adjacent geodesic edge (even
extension on Neumann edges, odd on Dirichlet edges).  All locations handled
here are frame Poincare coordinates of the mesh unless stated otherwise;
reports also carry positions in the triangle's own chart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import geometry as geo
from .exceptions import DomainError, RadiiOutsideTriangle, ShapeMismatch
from .killing import KillingField
from .mesh import TriangleMesh

EMPTY, SIMPLE_ARC, LOOP, GRAPH = "Empty", "SimpleArc", "Loop", "Graph"
CONTINUUM_FACTOR = 10.0


def _nodal_values(eig, m: TriangleMesh) -> np.ndarray:
    v = np.asarray(getattr(eig, "vector", eig), dtype=float)
    if v.shape != (m.n_nodes,):
        raise ShapeMismatch(f"vector of length {v.shape} does not match {m.n_nodes} mesh nodes")
    return v


# ---------------------------------------------------------------------------
# mesh helpers


def _adjacency(m: TriangleMesh) -> sp.csr_matrix:
    if "adj" not in m._cache:
        e = m.edges()
        n = m.n_nodes
        A = sp.coo_matrix((np.ones(2 * len(e)), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])), shape=(n, n))
        A = (A.tocsr() + sp.identity(n, format="csr")).astype(bool).astype(np.int8).tocsr()
        m._cache["adj"] = A
    return m._cache["adj"]


def _two_ring(m: TriangleMesh) -> sp.csr_matrix:
    if "ring2" not in m._cache:
        A = _adjacency(m).astype(np.int32)
        R = (A @ A).astype(bool).tocsr()
        R.sort_indices()
        m._cache["ring2"] = R
    return m._cache["ring2"]


def edge_tangents(m: TriangleMesh, e: int, idx: np.ndarray) -> np.ndarray:
    """Unit chart tangents of geodesic edge ``e`` (direction vertex e+1 -> e+2) at nodes ``idx``."""
    d = m.frame_klein[(e + 2) % 3] - m.frame_klein[(e + 1) % 3]
    J = geo.poincare_to_klein_jacobian(m.nodes[idx], m.kappa)
    t = np.linalg.solve(J, np.broadcast_to(d, (len(idx), 2))[..., None])[..., 0]
    return t / np.linalg.norm(t, axis=1)[:, None]


def _edge_reflections(m: TriangleMesh) -> list:
    if "refl" not in m._cache:
        out = []
        for e in range(3):
            a = m.frame_klein[(e + 1) % 3]
            b = m.frame_klein[(e + 2) % 3]
            out.append(geo.Isometry.reflection(m.kappa, a, b))
        m._cache["refl"] = out
    return m._cache["refl"]


def _reflect_points(m: TriangleMesh, e: int, xy: np.ndarray) -> np.ndarray:
    iso = _edge_reflections(m)[e]
    k = geo.poincare_to_klein(xy, m.kappa)
    return geo.klein_to_poincare(iso.apply(k), m.kappa)


def vertex_exclusion_radii(m: TriangleMesh, factor: float = 3.0) -> np.ndarray:
    """Chart radius around each triangle vertex inside which nothing is reported."""
    diam = m.element_diameters()
    out = np.empty(3)
    for v in range(3):
        node = m.vertex_nodes[v]
        touching = np.any(m.elements == node, axis=1)
        out[v] = factor * diam[touching].max()
    return out


def flat_corner_radii(m: TriangleMesh, low: np.ndarray, r_excl: np.ndarray) -> np.ndarray:
    """Grow each exclusion disk through connected interior nodes whose gradient is below tolerance.

    Near a corner whose local exponent makes the gradient vanish to high order, the
    discrete gradient sits under the tolerance on a whole neighbourhood of the vertex.
    That flat zone belongs to the vertex, which is never reported.
    """
    vx = m.nodes[m.vertex_nodes]
    d = np.linalg.norm(m.nodes[:, None, :] - vx[None], axis=2)
    seeds = d < r_excl[None, :]
    interior = ~m.node_edge_mask().any(axis=1)
    keep = (low & interior) | seeds.any(axis=1)
    idx = np.flatnonzero(keep)
    sub = _adjacency(m)[idx][:, idx]
    _, lab = connected_components(sub, directed=False)
    out = np.array(r_excl, dtype=float)
    h = m.max_diameter()
    for v in range(3):
        comp = set(lab[seeds[idx, v]].tolist())
        members = idx[np.isin(lab, list(comp))]
        grown = d[members, v].max() if len(members) else 0.0
        if grown > r_excl[v]:
            out[v] = grown + h
    return out


# ---------------------------------------------------------------------------
# gradient recovery


def _fit_quadratics(centers: np.ndarray, pts: np.ndarray, vals: np.ndarray, mask: np.ndarray):
    """Batched least-squares quadratic fits; returns coefficients in scaled coordinates and scales."""
    d = pts - centers[:, None, :]
    d = np.where(mask[..., None], d, 0.0)
    scale = np.sqrt(np.max(np.sum(d * d, axis=2), axis=1))
    scale = np.where(scale > 0, scale, 1.0)
    x = d[..., 0] / scale[:, None]
    y = d[..., 1] / scale[:, None]
    A = np.stack([np.ones_like(x), x, y, x * x, x * y, y * y], axis=2)
    A = A * mask[..., None]
    b = vals * mask
    coef = np.einsum("nij,nj->ni", np.linalg.pinv(A), b)
    return coef, scale


def recover_gradient(eig, m: TriangleMesh) -> np.ndarray:
    """Recovered nodal gradient (frame Poincare chart components), shape ``(n, 2)``."""
    u = _nodal_values(eig, m)
    key = ("grad", u.tobytes().__hash__())
    if key in m._cache:
        return m._cache[key]
    n = m.n_nodes
    R1 = _adjacency(m)
    R2 = _two_ring(m)
    edge_mask = m.node_edge_mask()
    on_bdry = edge_mask.any(axis=1)
    vertex = np.zeros(n, dtype=bool)
    vertex[m.vertex_nodes] = True
    sizes1 = np.diff(R1.indptr)
    use2 = on_bdry | (sizes1 < 7)
    patches = []
    for i in range(n):
        R = R2 if use2[i] else R1
        patches.append(R.indices[R.indptr[i]:R.indptr[i + 1]])
    grad = np.zeros((n, 2))
    # interior nodes: plain patches
    groups: dict = {}
    for i in np.flatnonzero(~on_bdry):
        groups.setdefault(len(patches[i]), []).append(i)
    for size, ids in sorted(groups.items()):
        ids = np.array(ids)
        P = np.stack([patches[i] for i in ids])
        coef, scale = _fit_quadratics(m.nodes[ids], m.nodes[P], u[P], np.ones(P.shape, bool))
        grad[ids] = coef[:, 1:3] / scale[:, None]
    # boundary non-vertex nodes: patch plus its mirror image across the edge
    bd = np.flatnonzero(on_bdry & ~vertex)
    if len(bd):
        maxlen = 2 * max(len(patches[i]) for i in bd)
        pts = np.zeros((len(bd), maxlen, 2))
        vals = np.zeros((len(bd), maxlen))
        mask = np.zeros((len(bd), maxlen), dtype=bool)
        for r, i in enumerate(bd):
            P = patches[i]
            e = int(np.flatnonzero(edge_mask[i])[0])
            sign = 1.0 if m.bc[e] == geo.NEUMANN else -1.0
            k = len(P)
            pts[r, :k] = m.nodes[P]
            vals[r, :k] = u[P]
            try:
                pts[r, k:2 * k] = _reflect_points(m, e, m.nodes[P])
                vals[r, k:2 * k] = sign * u[P]
                mask[r, :2 * k] = True
            except DomainError:
                mask[r, :k] = True
        coef, scale = _fit_quadratics(m.nodes[bd], pts, vals, mask)
        grad[bd] = coef[:, 1:3] / scale[:, None]
        for e in range(3):
            idx = bd[edge_mask[bd, e]]
            if len(idx) == 0:
                continue
            t = edge_tangents(m, e, idx)
            gt = np.sum(grad[idx] * t, axis=1)
            if m.bc[e] == geo.NEUMANN:
                grad[idx] = gt[:, None] * t
            else:
                grad[idx] = grad[idx] - gt[:, None] * t
    grad[vertex] = 0.0
    m._cache[key] = grad
    return grad


# ---------------------------------------------------------------------------
# point location and interpolation


def locate(m: TriangleMesh, pts) -> tuple:
    """Element index and barycentric coordinates of frame Poincare points (-1 if outside)."""
    pts = np.atleast_2d(np.asarray(pts, float))
    if "ctree" not in m._cache:
        m._cache["ctree"] = cKDTree(m.nodes[m.elements].mean(axis=1))
    tree = m._cache["ctree"]
    el_out = np.full(len(pts), -1)
    lam_out = np.full((len(pts), 3), np.nan)
    todo = np.arange(len(pts))
    for k in (8, 32, 128):
        if len(todo) == 0:
            break
        k = min(k, m.n_elements)
        _, cand = tree.query(pts[todo], k=k)
        cand = np.atleast_2d(cand).reshape(len(todo), -1)
        P = m.nodes[m.elements[cand]]  # (t, k, 3, 2)
        a, b, c = P[..., 0, :], P[..., 1, :], P[..., 2, :]
        v0, v1 = b - a, c - a
        v2 = pts[todo][:, None, :] - a
        den = v0[..., 0] * v1[..., 1] - v0[..., 1] * v1[..., 0]
        l1 = (v2[..., 0] * v1[..., 1] - v2[..., 1] * v1[..., 0]) / den
        l2 = (v0[..., 0] * v2[..., 1] - v0[..., 1] * v2[..., 0]) / den
        lam = np.stack([1 - l1 - l2, l1, l2], axis=-1)
        worst = lam.min(axis=-1)
        best = np.argmax(worst, axis=1)
        ok = worst[np.arange(len(todo)), best] >= -1e-9
        sel = todo[ok]
        el_out[sel] = cand[ok, best[ok]]
        lam_out[sel] = lam[ok, best[ok]]
        todo = todo[~ok]
    return el_out, lam_out


def interpolate(m: TriangleMesh, values: np.ndarray, pts) -> np.ndarray:
    """P1 interpolation of nodal ``values`` (scalar or vector per node); NaN outside."""
    el, lam = locate(m, pts)
    values = np.asarray(values, float)
    out_shape = (len(el),) + values.shape[1:]
    out = np.full(out_shape, np.nan)
    ok = el >= 0
    nodes = m.elements[el[ok]]
    out[ok] = np.einsum("pk,pk...->p...", lam[ok], values[nodes])
    return out


# ---------------------------------------------------------------------------
# nodal sets


@dataclass
class NodalSet:
    polylines: list  # in the triangle's own chart
    frame_polylines: list = field(repr=False)
    topology: str = EMPTY
    endpoints: list = field(default_factory=list)
    degree_sequence: list = field(default_factory=list)

    def distinct_edge_closures(self) -> bool:
        """For a simple arc: no single closed edge contains both endpoints."""
        if self.topology != SIMPLE_ARC or len(self.endpoints) != 2:
            return False
        a, b = (set(ep["closure"]) for ep in self.endpoints)
        return len(a & b) == 0

    def to_json(self) -> dict:
        return {
            "topology": self.topology,
            "endpoints": self.endpoints,
            "degree_sequence": self.degree_sequence,
            "polylines": [np.asarray(p).tolist() for p in self.polylines],
            "distinct_edge_closures": self.distinct_edge_closures(),
        }


def _boundary_edge_tags(m: TriangleMesh) -> dict:
    if "btags" not in m._cache:
        m._cache["btags"] = {(min(i, j), max(i, j)): int(e) for i, j, e in m.boundary}
    return m._cache["btags"]


def extract_nodal_set(eig, m: TriangleMesh) -> NodalSet:
    u = _nodal_values(eig, m)
    pos = u >= 0
    el = m.elements
    seg_pts: dict = {}
    segments = []
    for a_, b_ in ((0, 1), (1, 2), (2, 0)):
        pass
    pa = pos[el]
    mixed = np.flatnonzero(~(pa.all(axis=1) | (~pa).all(axis=1)))
    for k in mixed:
        tri = el[k]
        cross = []
        for i in range(3):
            a, b = int(tri[i]), int(tri[(i + 1) % 3])
            if pos[a] != pos[b]:
                key = (min(a, b), max(a, b))
                if key not in seg_pts:
                    ua, ub = u[a], u[b]
                    s = ua / (ua - ub)
                    seg_pts[key] = m.nodes[a] + s * (m.nodes[b] - m.nodes[a])
                cross.append(key)
        if len(cross) == 2:
            segments.append((cross[0], cross[1]))
    if not segments:
        return NodalSet([], [], EMPTY, [], [])
    keys = sorted(seg_pts)
    index = {k: i for i, k in enumerate(keys)}
    nbrs = [[] for _ in keys]
    for a, b in segments:
        nbrs[index[a]].append(index[b])
        nbrs[index[b]].append(index[a])
    deg = np.array([len(x) for x in nbrs])
    seen = np.zeros(len(keys), dtype=bool)
    chains = []
    closed = []
    # paths first (start at degree-1 points), then cycles
    for start in list(np.flatnonzero(deg == 1)) + list(range(len(keys))):
        if seen[start]:
            continue
        chain = [start]
        seen[start] = True
        prev, cur = -1, start
        is_loop = False
        while True:
            nxt = [x for x in nbrs[cur] if x != prev]
            if not nxt:
                break
            if nxt[0] == start:
                is_loop = True
                break
            if seen[nxt[0]]:
                break
            prev, cur = cur, nxt[0]
            seen[cur] = True
            chain.append(cur)
        chains.append(chain)
        closed.append(is_loop or (deg[start] == 2 and len(chain) > 2 and start in nbrs[chain[-1]]))
    pts = np.array([seg_pts[k] for k in keys])
    frame_polys = []
    polys = []
    for chain, cl in zip(chains, closed):
        p = pts[chain]
        if cl:
            p = np.vstack([p, p[:1]])
        frame_polys.append(p)
        polys.append(m.to_original(p, m.triangle.chart))
    btags = _boundary_edge_tags(m)
    h = m.max_diameter()
    endpoints = []
    if len(chains) == 1 and not closed[0]:
        topology = SIMPLE_ARC
        for end in (chains[0][0], chains[0][-1]):
            key = keys[end]
            xy = seg_pts[key]
            tag = btags.get(key)
            d = np.linalg.norm(m.nodes[m.vertex_nodes] - xy, axis=1)
            v = int(np.argmin(d))
            if d[v] <= 0.5 * h or tag is None and d[v] <= 2 * h:
                closure = [(v + 1) % 3, (v + 2) % 3]
                endpoints.append({"kind": "vertex", "index": v, "closure": sorted(closure),
                                  "location": m.to_original(xy, m.triangle.chart).tolist()})
            elif tag is not None:
                endpoints.append({"kind": "edge", "index": tag, "closure": [tag],
                                  "location": m.to_original(xy, m.triangle.chart).tolist()})
            else:
                endpoints.append({"kind": "interior", "index": -1, "closure": [],
                                  "location": m.to_original(xy, m.triangle.chart).tolist()})
    elif len(chains) == 1:
        topology = LOOP
    else:
        topology = GRAPH
    degree_sequence = sorted((int(x) for x in deg), reverse=True) if topology == GRAPH else []
    return NodalSet(polys, frame_polys, topology, endpoints, degree_sequence)


def nodal_domain_count(eig, m: TriangleMesh) -> int:
    """Connected components of the strict sign pattern along mesh edges."""
    u = _nodal_values(eig, m)
    e = m.edges()
    same = np.sign(u[e[:, 0]]) == np.sign(u[e[:, 1]])
    same &= u[e[:, 0]] != 0
    e = e[same]
    nz = np.flatnonzero(u != 0)
    A = sp.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(m.n_nodes, m.n_nodes))
    ncomp, labels = connected_components(A, directed=False)
    return len(np.unique(labels[nz]))


# ---------------------------------------------------------------------------
# critical points


@dataclass
class CriticalPoint:
    location: list  # own chart of the triangle
    frame_location: np.ndarray = field(repr=False)
    grad_norm: float = 0.0
    kind: str = "degenerate"
    edge: int = -1
    sign_change: str = ""

    def to_json(self) -> dict:
        out = {"location": [float(x) for x in self.location], "grad_norm": self.grad_norm, "kind": self.kind}
        if self.edge >= 0:
            out["edge"] = self.edge
            out["sign_change"] = self.sign_change
        return out


@dataclass
class CriticalReport:
    interior_points: list
    edge_points: list
    continuum: list  # dicts with edge index (or -1) and cluster diameter
    tol: float
    r_excl: list
    h: float

    @property
    def counts(self) -> dict:
        return {"interior": len(self.interior_points), "edge": len(self.edge_points),
                "continuum": len(self.continuum)}

    @property
    def total(self) -> int:
        return len(self.interior_points) + len(self.edge_points)

    @property
    def has_continuum(self) -> bool:
        return len(self.continuum) > 0

    def to_json(self) -> dict:
        return {
            "interior_points": [p.to_json() for p in self.interior_points],
            "edge_points": [p.to_json() for p in self.edge_points],
            "continuum": self.continuum,
            "counts": self.counts,
            "tolerances": {"grad_tol": self.tol, "r_excl": list(map(float, self.r_excl)), "h": self.h},
        }


def _local_quadratic(m: TriangleMesh, u: np.ndarray, x0: np.ndarray):
    """Quadratic fit of ``u`` around ``x0``; returns value, gradient and Hessian at ``x0``."""
    node = int(np.argmin(np.linalg.norm(m.nodes - x0, axis=1)))
    P = _two_ring(m)
    idx = P.indices[P.indptr[node]:P.indptr[node + 1]]
    d = m.nodes[idx] - x0
    s = max(np.max(np.linalg.norm(d, axis=1)), 1e-300)
    x, y = d[:, 0] / s, d[:, 1] / s
    A = np.column_stack([np.ones_like(x), x, y, x * x, x * y, y * y])
    c = np.linalg.lstsq(A, u[idx], rcond=None)[0]
    g = np.array([c[1], c[2]]) / s
    H = np.array([[2 * c[3], c[4]], [c[4], 2 * c[5]]]) / s**2
    return c[0], g, H


def _classify(H: np.ndarray, scale: float) -> str:
    w = np.linalg.eigvalsh(H)
    small = 1e-6 * max(scale, 1e-300)
    if np.min(np.abs(w)) < small:
        return "degenerate"
    if w[0] > 0:
        return "min"
    if w[1] < 0:
        return "max"
    return "saddle"


def _cluster(points: np.ndarray, radius: float) -> list:
    if len(points) == 0:
        return []
    pairs = cKDTree(points).query_pairs(radius, output_type="ndarray")
    A = sp.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])) if len(pairs) else ([], ([], [])),
                      shape=(len(points), len(points)))
    _, labels = connected_components(A, directed=False)
    return [np.flatnonzero(labels == c) for c in range(labels.max() + 1)]


def _diameter(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    d = points[:, None, :] - points[None, :, :]
    return float(np.sqrt(np.max(np.sum(d * d, axis=2))))


def detect_critical_points(eig, m: TriangleMesh, tol: float | None = None, tol_rel: float = 1e-3) -> CriticalReport:
    """Interior and Neumann-edge critical points of the eigenfunction (vertices excluded)."""
    u = _nodal_values(eig, m)
    G = recover_gradient(u, m)
    gn = np.linalg.norm(G, axis=1)
    gmax = float(gn.max())
    tol_abs = tol_rel * gmax if tol is None else float(tol)
    h = m.max_diameter()
    r_excl = flat_corner_radii(m, gn < tol_abs, vertex_exclusion_radii(m))
    chart = m.triangle.chart
    edge_mask = m.node_edge_mask()
    on_bdry = edge_mask.any(axis=1)

    def excluded(xy: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(xy[:, None, :] - m.nodes[m.vertex_nodes][None], axis=2)
        return np.any(d < r_excl[None, :], axis=1)

    if gmax == 0:
        return CriticalReport([], [], [], tol_abs, r_excl.tolist(), h)

    # -- interior candidates: zeros of the linear interpolant of the recovered gradient
    el = m.elements
    Ge = G[el]  # (ne, 3, 2)
    A = np.stack([Ge[:, :, 0], Ge[:, :, 1], np.ones((len(el), 3))], axis=1)  # (ne, 3, 3)
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-300
    lam = np.full((len(el), 3), np.nan)
    rhs = np.array([0.0, 0.0, 1.0])
    lam[ok] = np.linalg.solve(A[ok], np.broadcast_to(rhs, (ok.sum(), 3))[..., None])[..., 0]
    inside = ok & np.all(lam >= -1e-12, axis=1)
    cand_el = np.flatnonzero(inside)
    cands = np.einsum("ek,ekd->ed", lam[cand_el], m.nodes[el[cand_el]]) if len(cand_el) else np.zeros((0, 2))
    low_nodes = np.flatnonzero((gn < tol_abs) & ~on_bdry)
    cands = np.vstack([cands, m.nodes[low_nodes]])
    if len(cands):
        cands = cands[~excluded(cands)]
    # candidates hugging a Neumann edge belong to the edge detector
    if len(cands):
        bary = m.barycentric(cands)
        keep = np.ones(len(cands), dtype=bool)
        for e in range(3):
            if m.bc[e] != geo.NEUMANN:
                continue
            near = m.project_to_edge(cands, e)
            dist = np.linalg.norm(near - cands, axis=1)
            keep &= dist > 1.5 * h
        del bary
        cands = cands[keep]

    interior = []
    continuum = []
    for idx in _cluster(cands, 2.0 * h):
        pts = cands[idx]
        diam = _diameter(pts)
        if diam > CONTINUUM_FACTOR * m.h:
            continuum.append({"edge": -1, "diameter": diam})
            continue
        x0 = pts.mean(axis=0)
        _, g, H = _local_quadratic(m, u, x0)
        try:
            step = np.linalg.solve(H, g)
            if np.linalg.norm(step) < 2 * h:
                x0 = x0 - step
        except np.linalg.LinAlgError:
            pass
        if not m.contains(x0[None])[0] or excluded(x0[None])[0]:
            continue
        val, g, H = _local_quadratic(m, u, x0)
        interior.append(CriticalPoint(m.to_original(x0, chart).tolist(), x0, float(np.linalg.norm(g)),
                                      _classify(H, gmax / max(h, 1e-300))))

    # -- edge candidates: sign changes of the tangential derivative on Neumann edges
    edge_pts = []
    for e in range(3):
        if m.bc[e] != geo.NEUMANN:
            continue
        chain = m.edge_chain(e)
        t = edge_tangents(m, e, chain)
        tau = np.sum(G[chain] * t, axis=1)
        xy = m.nodes[chain]
        valid = ~excluded(xy)
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(xy, axis=0), axis=1))])
        roots = []
        flagged = []
        vi = np.flatnonzero(valid)
        for a, b in zip(vi[:-1], vi[1:]):
            if b != a + 1:
                continue
            if tau[a] == 0 or tau[a] * tau[b] < 0:
                lo = max(vi[0], a - 1)
                hi = min(vi[-1], b + 1)
                sl = s[lo:hi + 1]
                tl = tau[lo:hi + 1]
                r = s[a] + (s[b] - s[a]) * tau[a] / (tau[a] - tau[b]) if tau[a] != tau[b] else s[a]
                if len(sl) >= 4:
                    cf = np.polyfit(sl - s[a], tl, 2)
                    rr = np.roots(cf)
                    rr = rr[np.isreal(rr)].real + s[a]
                    rr = rr[(rr >= s[a] - 1e-14) & (rr <= s[b] + 1e-14)]
                    if len(rr):
                        r = float(rr[np.argmin(np.abs(rr - r))])
                direction = "+-" if tau[a] > 0 else "-+"
                roots.append((r, direction))
        flagged = s[valid & (np.abs(tau) < tol_abs)]
        allpos = np.array(sorted([r for r, _ in roots] + list(flagged)))
        if len(allpos) == 0:
            continue
        # cluster along the edge by arclength gaps
        groups = np.split(np.arange(len(allpos)), np.flatnonzero(np.diff(allpos) > 2.0 * h) + 1)
        for g_idx in groups:
            span = float(allpos[g_idx[-1]] - allpos[g_idx[0]])
            members = [(r, d) for r, d in roots if allpos[g_idx[0]] - 1e-15 <= r <= allpos[g_idx[-1]] + 1e-15]
            if span > CONTINUUM_FACTOR * m.h:
                continuum.append({"edge": e, "diameter": span})
                continue
            if not members:
                continue
            # an odd number of sign changes in a tight group is one crossing; an even number cancels
            if len(members) % 2 == 0:
                continue
            r, direction = members[len(members) // 2]
            sk = np.interp(r, s, np.arange(len(s)))
            i0 = min(int(math.floor(sk)), len(chain) - 2)
            w = sk - i0
            p = (1 - w) * xy[i0] + w * xy[i0 + 1]
            p = m.project_to_edge(p[None], e)[0]
            gval = float(abs((1 - w) * tau[i0] + w * tau[i0 + 1]))
            edge_pts.append(CriticalPoint(m.to_original(p, chart).tolist(), p, gval, "edge", e, direction))
    return CriticalReport(interior, edge_pts, continuum, tol_abs, r_excl.tolist(), h)


# ---------------------------------------------------------------------------
# Killing derivatives


@dataclass
class DerivativeField:
    values: np.ndarray
    field: object
    interior: np.ndarray = field(repr=False)
    min_value: float = 0.0
    argmin: int = -1
    max_abs: float = 0.0


def _frame_field(X, m: TriangleMesh):
    if isinstance(X, KillingField):
        if X.kappa != m.kappa:
            X = X.with_kappa(m.kappa)
        return X.transformed(m.frame)
    return X


def killing_derivative(eig, X, m: TriangleMesh) -> DerivativeField:
    """Nodal values of ``X u`` with ``X`` given in the triangle's own Klein coordinates."""
    u = _nodal_values(eig, m)
    G = recover_gradient(u, m)
    Xf = _frame_field(X, m)
    if isinstance(Xf, KillingField):
        V = Xf.poincare_values(m.nodes)
    else:
        V = np.asarray(Xf(m.nodes), float)
    vals = np.sum(G * V, axis=1)
    interior = m.interior_nodes()
    if len(interior):
        j = int(interior[np.argmin(vals[interior])])
        mn = float(vals[j])
    else:
        j, mn = -1, float("nan")
    return DerivativeField(vals, X, interior, mn, j, float(np.max(np.abs(vals))))


@dataclass
class Certification:
    certified: bool
    sign: int = 0
    witness: int = -1
    min_ratio: float = float("nan")
    positive_fraction: float = 0.0

    def to_json(self) -> dict:
        return {"certified": self.certified, "sign": self.sign, "witness": self.witness,
                "min_ratio": self.min_ratio, "positive_fraction": self.positive_fraction}


def certify_monotone(d: DerivativeField, margin: float = 1e-6) -> Certification:
    """``Monotone(sign)`` when ``sign * Xu`` passes the margin and 99% positivity tests."""
    if d.max_abs == 0 or len(d.interior) == 0:
        return Certification(False, 0, d.argmin)
    v = d.values[d.interior]
    best = None
    for sign in (1, -1):
        w = sign * v
        ratio = float(w.min() / d.max_abs)
        frac = float(np.mean(w > 0))
        if ratio > -margin and frac >= 0.99:
            return Certification(True, sign, -1, ratio, frac)
        cand = Certification(False, 0, int(d.interior[np.argmin(w)]), ratio, frac)
        if best is None or ratio > best.min_ratio:
            best = cand
    return best


# ---------------------------------------------------------------------------
# vertex expansions


NEUMANN_V, MIXED_V, DIRICHLET_V = "Neumann", "Mixed", "Dirichlet"


@dataclass
class VertexExpansion:
    vertex: int
    kind: str
    beta: float
    nu: float
    coefficients: dict
    uncertainty: dict
    radii: tuple
    residual: float

    def to_json(self) -> dict:
        return {"vertex": self.vertex, "kind": self.kind, "beta": self.beta, "nu": self.nu,
                "coefficients": self.coefficients, "uncertainty": self.uncertainty,
                "radii": list(self.radii), "residual": self.residual}


def _local_frame(t: geo.GeodesicTriangle, v: int, along: int) -> geo.Isometry:
    """Vertex ``v`` at the origin, the edge towards vertex ``along`` on +x, triangle above."""
    kv = t.klein_vertices
    other = 3 - v - along
    iso = geo.Isometry.translation_to_origin(t.kappa, kv[v])
    img = iso.apply(kv)
    iso = geo.Isometry.rotation(t.kappa, -math.atan2(img[along][1], img[along][0])).compose(iso)
    if iso.apply(kv)[other][1] < 0:
        iso = geo.Isometry.flip_y(t.kappa).compose(iso)
    return iso


def vertex_coefficients(eig, m: TriangleMesh, vertex: int, n_theta: int = 256,
                        radii: tuple | None = None) -> VertexExpansion:
    u = _nodal_values(eig, m)
    t = m.triangle
    v = int(vertex)
    e_next = (v + 2) % 3  # edge joining v and v+1
    e_prev = (v + 1) % 3  # edge joining v and v+2
    tags = (t.bc[e_next], t.bc[e_prev])
    if tags == (geo.NEUMANN, geo.NEUMANN):
        kind, along = NEUMANN_V, (v + 1) % 3
    elif tags == (geo.DIRICHLET, geo.DIRICHLET):
        kind, along = DIRICHLET_V, (v + 1) % 3
    else:
        kind = MIXED_V
        along = (v + 1) % 3 if tags[0] == geo.DIRICHLET else (v + 2) % 3
    beta = float(t.angles()[v])
    nu = math.pi / beta
    loc = _local_frame(t, v, along)
    # distance from the vertex to the opposite edge in the local chart
    kv_loc = loc.apply(t.klein_vertices)
    opp = np.array([kv_loc[(v + 1) % 3] + s * (kv_loc[(v + 2) % 3] - kv_loc[(v + 1) % 3])
                    for s in np.linspace(0, 1, 401)])
    reach = float(np.min(np.linalg.norm(geo.klein_to_poincare(opp, t.kappa), axis=1)))
    r1, r2 = radii if radii is not None else (6 * m.h, 12 * m.h)
    if r2 > 0.5 * reach:
        raise RadiiOutsideTriangle(f"fit radius {r2:.4g} exceeds half the vertex reach {reach:.4g}")
    theta = (np.arange(n_theta) + 0.5) * beta / n_theta
    to_frame = m.frame.compose(loc.inverse())

    def trace(r):
        pl = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        k = to_frame.apply(geo.poincare_to_klein(pl, t.kappa))
        vals = interpolate(m, u, geo.klein_to_poincare(k, t.kappa))
        if np.any(np.isnan(vals)):
            raise RadiiOutsideTriangle("sampling arc leaves the mesh")
        return vals

    def project(vals, basis, norm):
        return norm * np.mean(vals * basis) * 1.0  # mean over [0, beta] = (1/beta) * integral

    coeffs, unc = {}, {}
    traces = {r: trace(r) for r in (r1, r2)}
    if kind == NEUMANN_V:
        channels = {"a0": (np.ones_like(theta), 1.0, 0.0), "a1": (np.cos(nu * theta), 2.0, nu)}
    elif kind == MIXED_V:
        channels = {"b0": (np.sin(0.5 * nu * theta), 2.0, 0.5 * nu)}
    else:
        channels = {"c1": (np.sin(nu * theta), 2.0, nu)}
    resid = 0.0
    for name, (basis, norm, p) in channels.items():
        P1 = project(traces[r1], basis, norm)
        P2 = project(traces[r2], basis, norm)
        A = np.array([[r1**p, r1 ** (p + 2)], [r2**p, r2 ** (p + 2)]])
        c, corr = np.linalg.solve(A, [P1, P2])
        coeffs[name] = float(c)
        unc[name] = float(abs(P1 / r1**p - c))
        resid = max(resid, float(abs(corr) * r2 ** (p + 2)))
    return VertexExpansion(v, kind, beta, nu, coeffs, unc, (float(r1), float(r2)), resid)
