"""Verification suites for the hot-spots style claims on constant-curvature triangles.

Every asserted claim is decided on two meshes (``h`` and its uniform
refinement).  Both levels must agree for a pass or a fail; disagreement is
reported as inconclusive.  Cases outside a theorem's hypotheses run in probe
mode and only report data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import analysis as an
from . import fem
from . import geometry as geo
from . import mesh as msh
from .exceptions import CurvspecError, NoConvergence
from .killing import KillingField, perpendicular_axis

PASS, FAIL, INCONCLUSIVE, REPORT = "pass", "fail", "inconclusive", "report"
ASSERT, PROBE = "assert", "probe"

DEFAULT_SEED = 20240611
DEFAULT_DIVISIONS = 24
GAP_MIN = 0.01
QUARTER_MARGIN = 0.01
LATITUDE_TOL = 1e-3


@dataclass
class ClaimResult:
    claim: str
    status: str
    margin: float | None = None
    tol: float | None = None
    h: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"claim": self.claim, "status": self.status, "margin": self.margin, "tol": self.tol,
                "h": [float(x) for x in self.h], "detail": self.detail}


@dataclass
class VerificationCase:
    case_id: str
    triangle: dict
    mode: str
    claims: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)
    note: str = ""

    @property
    def status(self) -> str:
        st = [c.status for c in self.claims]
        if self.mode == PROBE:
            return REPORT
        if FAIL in st:
            return FAIL
        if INCONCLUSIVE in st:
            return INCONCLUSIVE
        return PASS

    def claim(self, name: str) -> ClaimResult:
        for c in self.claims:
            if c.claim == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"case_id": self.case_id, "triangle": self.triangle, "mode": self.mode, "status": self.status,
                "note": self.note, "claims": [c.to_json() for c in self.claims], "artifacts": self.artifacts}


# ---------------------------------------------------------------------------
# shared machinery


def chart_diameter(t: geo.GeodesicTriangle) -> float:
    frame = msh.choose_frame(t)
    p = geo.klein_to_poincare(frame.apply(t.klein_vertices), t.kappa)
    return max(np.linalg.norm(p[i] - p[j]) for i in range(3) for j in range(i + 1, 3))


def mesh_levels(t: geo.GeodesicTriangle, h: float | None = None, levels: int = 2,
                divisions: int = DEFAULT_DIVISIONS) -> list:
    if h is None:
        h = chart_diameter(t) / divisions
    frame = msh.choose_frame(t)
    p = geo.klein_to_poincare(frame.apply(t.klein_vertices), t.kappa)
    sides = [np.linalg.norm(p[(i + 1) % 3] - p[(i + 2) % 3]) for i in range(3)]
    h = min(h, min(sides) / 4)
    return msh.ladder(t, h, levels)


def _combine(name: str, per_level: list, tol=None, margin_key: str = "margin") -> ClaimResult:
    """Two-level decision: all pass -> pass, all fail -> fail, else inconclusive."""
    oks = [r["ok"] for r in per_level]
    status = PASS if all(oks) else FAIL if not any(oks) else INCONCLUSIVE
    margins = [r.get(margin_key) for r in per_level]
    margin = margins[-1] if margins and margins[-1] is not None else None
    return ClaimResult(name, status, None if margin is None else float(margin), tol,
                       [r["h"] for r in per_level], {"levels": [_jsonable(r) for r in per_level]})


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        elif isinstance(v, np.ndarray):
            v = v.tolist()
        elif isinstance(v, (bool, np.bool_)):
            v = bool(v)
        out[k] = v
    return out


def _inconclusive_case(case: VerificationCase, claims: list, reason: str) -> VerificationCase:
    for c in claims:
        case.claims.append(ClaimResult(c, INCONCLUSIVE, detail={"reason": reason}))
    return case


def _search_killing(u, m: TriangleMeshLike, fields: list, margin: float = 1e-6):
    """First field (in the given order) that certifies ``u``; returns (label, cert) or (None, best)."""
    best = None
    for label, X in fields:
        d = an.killing_derivative(u, X, m)
        cert = an.certify_monotone(d, margin)
        if cert.certified:
            return label, cert
        if best is None or cert.min_ratio > best[1].min_ratio:
            best = (None, cert)
    return best if best is not None else (None, an.Certification(False))


TriangleMeshLike = msh.TriangleMesh


def edge_axes(t: geo.GeodesicTriangle, longest_first: bool = True) -> list:
    kv = t.klein_vertices
    sides = t.sides()
    order = np.argsort(-sides, kind="stable") if longest_first else range(3)
    out = []
    for e in order:
        a, b = kv[(e + 1) % 3], kv[(e + 2) % 3]
        out.append((f"edge{e}", KillingField(  # loxodromic along the geodesic through edge e
            "loxodromic", t.kappa, np.array([a, b]), 1)))
    return out


# ---------------------------------------------------------------------------
# Neumann: non-acute hyperbolic triangles


def verify_hotspots_neumann(t: geo.GeodesicTriangle, h: float | None = None, levels: int = 2,
                            divisions: int = DEFAULT_DIVISIONS, case_id: str = "case") -> VerificationCase:
    t = t.with_bc(("N", "N", "N"))
    cls = t.classify()
    mode = ASSERT if (t.kappa < 0 and cls in (geo.RIGHT, geo.OBTUSE)) else PROBE
    case = VerificationCase(case_id, t.to_spec(), mode)
    case.artifacts["classification"] = cls
    claims = ["no_critical_points", "extrema_at_acute_vertices", "killing_certified", "nodal_simple_arc",
              "eigen_gap"]
    try:
        meshes = mesh_levels(t, h, levels, divisions)
    except CurvspecError as exc:
        return _inconclusive_case(case, claims, f"mesh: {exc}")
    rows = {c: [] for c in claims}
    angles = t.angles()
    acute = {v for v in range(3) if angles[v] < math.pi / 2 - geo.ANGLE_TOL}
    spectra = []
    for m in meshes:
        try:
            s = fem.solve(m, 4)
        except NoConvergence as exc:
            return _inconclusive_case(case, claims, f"solver: {exc}")
        spectra.append(s.values.tolist())
        u = s.pairs[1]
        cr = an.detect_critical_points(u, m)
        rows["no_critical_points"].append({"ok": cr.total == 0 and not cr.has_continuum, "h": m.h,
                                           "margin": float(-cr.total), **cr.counts})
        vmax = int(np.argmax(u.vector))
        vmin = int(np.argmin(u.vector))
        vnodes = {int(n): v for v, n in enumerate(m.vertex_nodes)}
        ok = vmax in vnodes and vmin in vnodes and vnodes[vmax] in acute and vnodes[vmin] in acute
        rows["extrema_at_acute_vertices"].append({"ok": ok, "h": m.h, "argmax_vertex": vnodes.get(vmax, -1),
                                                  "argmin_vertex": vnodes.get(vmin, -1)})
        label, cert = _search_killing(u, m, edge_axes(t))
        rows["killing_certified"].append({"ok": cert.certified, "h": m.h, "field": label,
                                          "orientation": cert.sign, "margin": cert.min_ratio})
        ns = an.extract_nodal_set(u, m)
        rows["nodal_simple_arc"].append({"ok": ns.topology == an.SIMPLE_ARC and ns.distinct_edge_closures(),
                                         "h": m.h, "topology": ns.topology,
                                         "endpoints": [(e["kind"], e["index"]) for e in ns.endpoints]})
        gap = fem.eigen_gap(s)
        rows["eigen_gap"].append({"ok": gap > GAP_MIN, "h": m.h, "margin": gap - GAP_MIN, "gap": gap})
    tols = {"no_critical_points": 1e-3, "killing_certified": 1e-6, "eigen_gap": GAP_MIN}
    for c in claims:
        res = _combine(c, rows[c], tols.get(c))
        if mode == PROBE:
            res.detail["observed"], res.status = res.status, REPORT
        case.claims.append(res)
    case.artifacts["spectra"] = spectra
    return case


# ---------------------------------------------------------------------------
# mixed problems


def mixed_hypothesis(t: geo.GeodesicTriangle) -> tuple:
    """``(branch, ok)`` with branch in {"single", "double", None}."""
    d = [i for i, b in enumerate(t.bc) if b == geo.DIRICHLET]
    ang = t.angles()
    lim = math.pi / 2 + geo.ANGLE_TOL
    if len(d) == 1:
        return "single", bool(ang[d[0]] <= lim)
    if len(d) == 2:
        n = 3 - sum(d)
        return "double", bool(ang[(n + 1) % 3] <= lim and ang[(n + 2) % 3] <= lim)
    return None, False


def _mixed_fields(t: geo.GeodesicTriangle, branch: str) -> list:
    kv = t.klein_vertices
    fields = []
    if branch == "single":
        dedge = t.bc.index(geo.DIRICHLET)
        a, b = kv[(dedge + 1) % 3], kv[(dedge + 2) % 3]
        axis = perpendicular_axis(t.kappa, a, b, kv[dedge])
        fields.append(("perp_dirichlet", KillingField("loxodromic", t.kappa, axis, 1)))
    else:
        nedge = t.bc.index(geo.NEUMANN)
        a, b = kv[(nedge + 1) % 3], kv[(nedge + 2) % 3]
        axis = perpendicular_axis(t.kappa, a, b, kv[nedge])
        fields.append(("perp_neumann_through_dirichlet_vertex", KillingField("loxodromic", t.kappa, axis, 1)))
    fields += edge_axes(t)
    for v in range(3):
        e = v
        a, b = kv[(e + 1) % 3], kv[(e + 2) % 3]
        try:
            axis = perpendicular_axis(t.kappa, a, b, kv[v])
            fields.append((f"altitude{v}", KillingField("loxodromic", t.kappa, axis, 1)))
        except CurvspecError:
            pass
    for v in range(3):
        fields.append((f"rotation{v}", KillingField("elliptic", t.kappa, kv[v][None], 1)))
    return fields


def verify_mixed(t: geo.GeodesicTriangle, h: float | None = None, levels: int = 2,
                 divisions: int = DEFAULT_DIVISIONS, case_id: str = "case") -> VerificationCase:
    branch, ok = mixed_hypothesis(t)
    mode = ASSERT if ok else PROBE
    case = VerificationCase(case_id, t.to_spec(), mode, note="" if ok else "hypothesis not met")
    case.artifacts["branch"] = branch
    if branch == "single":
        claims = ["no_critical_points", "neumann_vertex_max", "killing_certified"]
    else:
        claims = ["one_critical_point_on_neumann_edge", "killing_certified"]
    try:
        meshes = mesh_levels(t, h, levels, divisions)
    except CurvspecError as exc:
        return _inconclusive_case(case, claims, f"mesh: {exc}")
    rows = {c: [] for c in claims}
    locations = []
    for m in meshes:
        try:
            s = fem.solve(m, 2)
        except NoConvergence as exc:
            return _inconclusive_case(case, claims, f"solver: {exc}")
        u = s.pairs[0]
        cr = an.detect_critical_points(u, m)
        if branch == "single":
            rows["no_critical_points"].append({"ok": cr.total == 0 and not cr.has_continuum, "h": m.h,
                                               "margin": float(-cr.total), **cr.counts})
            nv = t.bc.index(geo.DIRICHLET)
            node = int(m.vertex_nodes[nv])
            okmax = int(np.argmax(u.vector)) == node and u.vector.min() >= -1e-8 * u.vector.max()
            rows["neumann_vertex_max"].append({"ok": bool(okmax), "h": m.h,
                                               "margin": float(u.vector[node] - np.delete(u.vector, node).max())})
        else:
            nedge = t.bc.index(geo.NEUMANN)
            on_n = len(cr.edge_points) == 1 and cr.edge_points[0].edge == nedge and len(cr.interior_points) == 0
            okc = on_n and not cr.has_continuum
            loc = cr.edge_points[0].location if cr.edge_points else None
            locations.append(loc)
            rows["one_critical_point_on_neumann_edge"].append({"ok": okc, "h": m.h, "location": loc, **cr.counts})
        label, cert = _search_killing(u, m, _mixed_fields(t, branch))
        rows["killing_certified"].append({"ok": cert.certified, "h": m.h, "field": label,
                                          "orientation": cert.sign, "margin": cert.min_ratio})
    for c in claims:
        res = _combine(c, rows[c], 1e-6 if c == "killing_certified" else None)
        if mode == PROBE:
            res.detail["observed"], res.status = res.status, REPORT
        case.claims.append(res)
    case.artifacts["eigenvalue"] = float(s.values[0])
    if locations:
        case.artifacts["critical_locations"] = locations
    return case


# ---------------------------------------------------------------------------
# finiteness and the hemispherical exception


def is_exception_shape(t: geo.GeodesicTriangle, tol: float = 1e-6) -> int | None:
    """Apex index of a spherical isosceles triangle with two right base angles, else None."""
    if t.kappa <= 0:
        return None
    ang = t.angles()
    right = [v for v in range(3) if abs(ang[v] - math.pi / 2) < tol]
    if len(right) == 2:
        return 3 - sum(right)
    return None


def latitude_variation(u, m: msh.TriangleMesh, apex: int, n_curves: int = 8, n_samples: int = 64) -> float:
    """Max over latitude curves (equidistant to the base) of the spread of ``u``, relative to max |u|."""
    t = m.triangle
    vals = np.asarray(getattr(u, "vector", u), float)
    amb = geo.klein_to_ambient(t.klein_vertices, t.kappa)
    a = amb[apex]
    tb = amb[(apex + 1) % 3] - (a @ amb[(apex + 1) % 3]) * a
    tb /= np.linalg.norm(tb)
    tc = amb[(apex + 2) % 3] - (a @ amb[(apex + 2) % 3]) * a
    nrm = tc - (tc @ tb) * tb
    nrm /= np.linalg.norm(nrm)
    beta = float(t.angles()[apex])
    pad = 0.05 * beta
    th = np.linspace(pad, beta - pad, n_samples)
    dirs = np.cos(th)[:, None] * tb + np.sin(th)[:, None] * nrm
    worst = 0.0
    for ang in np.linspace(0.1, 0.9, n_curves) * (math.pi / 2):
        pts = math.cos(ang) * a + math.sin(ang) * dirs
        fk = m.frame.apply(geo.ambient_to_klein(pts, t.kappa))
        w = an.interpolate(m, vals, geo.klein_to_poincare(fk, t.kappa))
        w = w[~np.isnan(w)]
        if len(w):
            worst = max(worst, float(w.max() - w.min()))
    return worst / float(np.max(np.abs(vals)))


def verify_finiteness(t: geo.GeodesicTriangle, h: float | None = None, levels: int = 2,
                      divisions: int = 40, case_id: str = "case") -> VerificationCase:
    t = t.with_bc(("N", "N", "N"))
    apex = is_exception_shape(t)
    mode = ASSERT if t.kappa != 0 else PROBE
    case = VerificationCase(case_id, t.to_spec(), mode)
    case.artifacts["exception_shape"] = apex is not None
    claims = ["continuum_on_base", "latitude_constant"] if apex is not None else ["no_continuum"]
    try:
        meshes = mesh_levels(t, h, levels, divisions)
    except CurvspecError as exc:
        return _inconclusive_case(case, claims, f"mesh: {exc}")
    rows = {c: [] for c in claims}
    for m in meshes:
        try:
            s = fem.solve(m, 4)
        except NoConvergence as exc:
            return _inconclusive_case(case, claims, f"solver: {exc}")
        u = s.pairs[1]
        cr = an.detect_critical_points(u, m)
        if apex is not None:
            on_base = any(c["edge"] == apex for c in cr.continuum)
            rows["continuum_on_base"].append({"ok": on_base, "h": m.h, "continuum": cr.continuum})
            var = latitude_variation(u, m, apex)
            rows["latitude_constant"].append({"ok": var < LATITUDE_TOL, "h": m.h, "margin": LATITUDE_TOL - var,
                                              "variation": var})
        else:
            rows["no_continuum"].append({"ok": not cr.has_continuum, "h": m.h, "continuum": cr.continuum,
                                         "count": cr.total})
    for c in claims:
        res = _combine(c, rows[c], LATITUDE_TOL if c == "latitude_constant" else None)
        if mode == PROBE:
            res.detail["observed"], res.status = res.status, REPORT
        case.claims.append(res)
    return case


# ---------------------------------------------------------------------------
# eigenvalue inequalities


def _ladder_values(t: geo.GeodesicTriangle, bc, which: int, k: int, h, levels, divisions) -> tuple:
    tb = t.with_bc(bc)
    vals, hs = [], []
    for m in mesh_levels(tb, h, levels, divisions):
        vals.append(float(fem.solve(m, k).values[which]))
        hs.append(m.h)
    return vals, hs


def mixed_margin_rows(t: geo.GeodesicTriangle, h=None, levels: int = 2, divisions: int = DEFAULT_DIVISIONS) -> list:
    """Per edge ``e``: margin ``lambda_1(D = boundary minus e) - mu_2`` with Richardson error bars."""
    mu, hs = _ladder_values(t, ("N", "N", "N"), 1, 3, h, levels, divisions)
    mu_err = fem.richardson_error(mu[-2], mu[-1])
    rows = []
    for e in range(3):
        bc = tuple("N" if i == e else "D" for i in range(3))
        lam, _ = _ladder_values(t, bc, 0, 1, h, levels, divisions)
        lam_err = fem.richardson_error(lam[-2], lam[-1])
        rows.append({"edge": e, "mu2": mu[-1], "lambda1": lam[-1], "margin": lam[-1] - mu[-1],
                     "err": mu_err + lam_err, "eps_disc": max(mu_err, lam_err), "mu2_levels": mu,
                     "lambda1_levels": lam, "h": hs})
    return rows


def verify_mixed_inequality(t: geo.GeodesicTriangle, h=None, levels: int = 2,
                            divisions: int = DEFAULT_DIVISIONS, case_id: str = "case") -> VerificationCase:
    mode = ASSERT if t.kappa < 0 else PROBE
    case = VerificationCase(case_id, t.to_spec(), mode)
    try:
        rows = mixed_margin_rows(t, h, levels, divisions)
    except CurvspecError as exc:
        return _inconclusive_case(case, [f"mixed_ineq_edge{e}" for e in range(3)], str(exc))
    for r in rows:
        name = f"mixed_ineq_edge{r['edge']}"
        if mode == ASSERT:
            # mu_2 <= lambda_1 + eps, where eps bounds the discretisation error of the larger value
            status = PASS if r["margin"] >= -r["eps_disc"] else FAIL
        else:
            status = INCONCLUSIVE if abs(r["margin"]) <= r["err"] else REPORT
        case.claims.append(ClaimResult(name, status, r["margin"], r["eps_disc"], r["h"], _jsonable(r)))
    return case


def probe_sphere_mixed_inequality(family: list, h=None, levels: int = 2,
                                  divisions: int = DEFAULT_DIVISIONS) -> list:
    """Table rows of margins ``lambda_1 - mu_2`` per triangle and edge; never asserts for kappa > 0."""
    table = []
    for i, t in enumerate(family):
        try:
            rows = mixed_margin_rows(t, h, levels, divisions)
        except CurvspecError as exc:
            table.append({"case": i, "kappa": t.kappa, "edge": -1, "status": INCONCLUSIVE, "reason": str(exc)})
            continue
        for r in rows:
            if t.kappa < 0:
                status = PASS if r["margin"] >= -r["eps_disc"] else FAIL
            else:
                status = INCONCLUSIVE if abs(r["margin"]) <= r["err"] else REPORT
            table.append({"case": i, "kappa": t.kappa, **_jsonable(r), "status": status})
    return table


def verify_one_quarter(t: geo.GeodesicTriangle, h=None, levels: int = 2, divisions: int = DEFAULT_DIVISIONS,
                       case_id: str = "case", threshold: float = 0.25 + QUARTER_MARGIN) -> VerificationCase:
    mode = ASSERT if t.kappa < 0 else PROBE
    case = VerificationCase(case_id, t.to_spec(), mode)
    try:
        vals, hs = _ladder_values(t, ("N", "N", "N"), 1, 2, h, levels, divisions)
    except CurvspecError as exc:
        return _inconclusive_case(case, ["mu2_above_quarter"], str(exc))
    rows = [{"ok": v > threshold, "h": hh, "margin": v - 0.25, "mu2": v} for v, hh in zip(vals, hs)]
    res = _combine("mu2_above_quarter", rows, threshold)
    if mode == PROBE:
        res.detail["observed"], res.status = res.status, REPORT
    case.claims.append(res)
    case.artifacts["mu2"] = vals
    return case


# ---------------------------------------------------------------------------
# triangle families


def _sobol(n: int, d: int, seed: int) -> np.ndarray:
    # draw a power-of-two block and keep its prefix (same points as random(n), without the balance warning)
    m = max(int(math.ceil(math.log2(max(n, 1)))), 0)
    return qmc.Sobol(d, scramble=True, seed=seed).random_base2(m)[:n]


def nonacute_hyperbolic_family(n: int = 20, seed: int = DEFAULT_SEED, kappa: float = -1.0) -> list:
    """Right or obtuse hyperbolic triangles; the largest angle sits at vertex 0."""
    pts = _sobol(n, 3, seed)
    out = []
    for a, f, w in pts:
        alpha = math.pi / 2 + a * 0.2 * math.pi
        budget = (math.pi - alpha) * (0.5 + 0.4 * f)
        beta = budget * (0.35 + 0.3 * w)
        out.append(geo.triangle_from_angles([alpha, beta, budget - beta], kappa))
    out[0] = geo.triangle_from_angles([math.pi / 2, math.pi / 5, math.pi / 6], kappa)
    return out


def hyperbolic_family(n: int = 20, seed: int = DEFAULT_SEED, kappa: float = -1.0) -> list:
    """Generic hyperbolic triangles (acute and obtuse), angles at least pi/12."""
    pts = _sobol(n, 3, seed + 1)
    out = []
    lo = math.pi / 12
    for a, b, f in pts:
        total = math.pi * (0.45 + 0.5 * f)
        w = np.array([0.5 + a, 0.5 + b, 1.0])
        ang = lo + (total - 3 * lo) * w / w.sum()
        out.append(geo.triangle_from_angles(ang, kappa))
    return out


def mixed_single_family(n: int = 10, seed: int = DEFAULT_SEED, kappa: float = -1.0) -> list:
    """One Dirichlet edge (edge 0) with the opposite vertex acute or right."""
    pts = _sobol(n, 3, seed + 2)
    out = []
    for a, f, w in pts:
        alpha = math.pi / 6 + a * (math.pi / 3)
        budget = (math.pi - alpha) * (0.55 + 0.4 * f)
        beta = budget * (0.3 + 0.4 * w)
        t = geo.triangle_from_angles([alpha, beta, budget - beta], kappa, bc=("D", "N", "N"))
        out.append(t)
    return out


def mixed_double_family(n: int = 10, seed: int = DEFAULT_SEED, kappa: float = -1.0) -> list:
    """Neumann edge 0 with both mixed vertices (1, 2) acute or right; vertex 0 is the Dirichlet vertex."""
    pts = _sobol(n, 3, seed + 3)
    out = []
    for a, f, w in pts:
        beta = math.pi / 6 + a * (math.pi / 4)
        gamma = math.pi / 6 + w * (math.pi / 4)
        room = 0.9 * (math.pi - beta - gamma)
        alpha = math.pi / 12 + f * (room - math.pi / 12)
        out.append(geo.triangle_from_angles([alpha, beta, gamma], kappa, bc=("N", "D", "D")))
    return out


def spherical_family(n: int = 6, seed: int = DEFAULT_SEED) -> list:
    pts = _sobol(max(n, 2), 3, seed + 4)[:n]
    out = []
    for a, b, f in pts:
        total = math.pi * (1.05 + 0.4 * f)
        w = np.array([0.6 + a, 0.6 + b, 1.0])
        out.append(geo.triangle_from_angles(total * w / w.sum(), 1.0))
    if n:
        out[0] = geo.triangle_from_angles([math.pi / 2] * 3, 1.0)
    return out


def exception_triangle(apex: float = math.pi / 3, base: float = math.pi / 2) -> geo.GeodesicTriangle:
    """Spherical isosceles triangle, apex at vertex 0."""
    return geo.triangle_from_angles([apex, base, base], 1.0)


def finiteness_family() -> list:
    return [
        ("hyperbolic_generic", geo.triangle_from_angles([0.3 * math.pi, 0.25 * math.pi, 0.2 * math.pi], -1.0)),
        ("hyperbolic_obtuse", geo.triangle_from_angles([0.6 * math.pi, 0.15 * math.pi, 0.12 * math.pi], -1.0)),
        ("spherical_generic", geo.triangle_from_angles([0.45 * math.pi, 0.35 * math.pi, 0.4 * math.pi], 1.0)),
        ("spherical_exception", exception_triangle()),
        ("spherical_perturbed", exception_triangle(base=0.45 * math.pi)),
    ]


SUITES = ("neumann_nonacute", "mixed_single", "mixed_double", "finiteness", "sphere_probe", "onequarter",
          "mixed_ineq")


def suite_cases(name: str, seed: int = DEFAULT_SEED, counts: dict | None = None) -> list:
    """``(case_id, kind, triangle)`` tuples for a named suite."""
    counts = counts or {}
    if name == "neumann_nonacute":
        fam = nonacute_hyperbolic_family(counts.get("nonacute", 20), seed)
        return [(f"nonacute_{i:02d}", "neumann", t) for i, t in enumerate(fam)]
    if name == "onequarter":
        fam = hyperbolic_family(counts.get("hyperbolic", 20), seed)
        return [(f"hyperbolic_{i:02d}", "quarter", t) for i, t in enumerate(fam)]
    if name == "mixed_ineq":
        fam = hyperbolic_family(counts.get("hyperbolic", 20), seed)
        return [(f"hyperbolic_{i:02d}", "mixed_ineq", t) for i, t in enumerate(fam)]
    if name == "mixed_single":
        fam = mixed_single_family(counts.get("mixed", 10), seed)
        return [(f"single_{i:02d}", "mixed", t) for i, t in enumerate(fam)]
    if name == "mixed_double":
        fam = mixed_double_family(counts.get("mixed", 10), seed)
        cases = [(f"double_{i:02d}", "mixed", t) for i, t in enumerate(fam)]
        cases.append(("double_flat_control", "mixed",
                      geo.GeodesicTriangle(0.0, [[0, 0], [1, 0], [1, 1]], geo.KLEIN, ("D", "N", "D"))))
        cases.append(("double_octant", "mixed", geo.triangle_from_angles([math.pi / 2] * 3, 1.0,
                                                                         bc=("N", "D", "D"))))
        return cases
    if name == "finiteness":
        return [(cid, "finiteness", t) for cid, t in finiteness_family()]
    if name == "sphere_probe":
        fam = spherical_family(counts.get("spherical", 6), seed)
        ctrl = hyperbolic_family(2, seed)
        return ([(f"sphere_{i:02d}", "sphere_probe", t) for i, t in enumerate(fam)]
                + [(f"control_{i:02d}", "sphere_probe", t) for i, t in enumerate(ctrl)])
    raise ValueError(f"unknown suite {name!r}")


def run_case(kind: str, case_id: str, t: geo.GeodesicTriangle, divisions: int | None = None) -> VerificationCase:
    kw = {} if divisions is None else {"divisions": divisions}
    if kind == "neumann":
        return verify_hotspots_neumann(t, case_id=case_id, **kw)
    if kind == "mixed":
        return verify_mixed(t, case_id=case_id, **kw)
    if kind == "finiteness":
        return verify_finiteness(t, case_id=case_id, **kw)
    if kind == "quarter":
        return verify_one_quarter(t, case_id=case_id, **kw)
    if kind in ("mixed_ineq", "sphere_probe"):
        case = verify_mixed_inequality(t, case_id=case_id, **kw)
        return case
    raise ValueError(f"unknown case kind {kind!r}")


def summary_rows(cases: list) -> list:
    rows = []
    for c in cases:
        for cl in c.claims:
            rows.append((c.case_id, cl.claim, cl.status, cl.margin, cl.h[-1] if cl.h else None))
    return rows


def suite_status(cases: list) -> str:
    st = [c.status for c in cases]
    if FAIL in st:
        return FAIL
    if INCONCLUSIVE in st:
        return INCONCLUSIVE
    return PASS
