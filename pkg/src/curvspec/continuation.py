"""Curvature sweeps over a fixed Klein triangle with overlap-matched eigenvalue branches."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import analysis as an
from . import fem
from . import geometry as geo
from . import mesh as msh
from .exceptions import CurvspecError, DomainError, StepFailure

log = logging.getLogger(__name__)

OVERLAP_MIN = 0.9
MIN_DT = 1e-4
MATCH_RADIUS = 5.0


@dataclass
class BranchData:
    t: np.ndarray
    kappa: np.ndarray
    values: np.ndarray  # (steps, k) in branch order
    permutations: np.ndarray  # permutations[i, j] = sorted index of branch j at step i
    overlaps: np.ndarray  # matched overlap of each branch with the previous step
    overlap_matrices: list
    reports: list  # CriticalReport of the tracked branch per step
    events: list = field(default_factory=list)
    tracked: int = 1
    tol: float = 1e-8
    h: float = 0.0

    @property
    def n_steps(self) -> int:
        return len(self.t)

    def branch(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def sorted_values(self) -> np.ndarray:
        return np.sort(self.values, axis=1)

    def crossings(self, branch: int | None = None) -> list:
        ev = [e for e in self.events if e["type"] == "crossing"]
        if branch is not None:
            ev = [e for e in ev if branch in e["branches"]]
        return ev

    def crit_counts(self) -> list:
        return [None if r is None else r.total + len(r.continuum) for r in self.reports]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "kappa", "branch", "value", "overlap", "crit_count"])
        counts = self.crit_counts()
        for i in range(self.n_steps):
            for j in range(self.values.shape[1]):
                cc = counts[i] if j == self.tracked and counts[i] is not None else ""
                w.writerow([fem.fmt(self.t[i]), fem.fmt(self.kappa[i]), j, fem.fmt(self.values[i, j]),
                            fem.fmt(self.overlaps[i, j]), cc])
        return buf.getvalue()


def _check_path(tri_klein: np.ndarray, k0: float, k1: float) -> None:
    for k in (k0, k1):
        geo.check_kappa(k)
        if k < 0:
            r2 = np.max(np.sum(tri_klein ** 2, axis=1))
            if r2 * abs(k) >= 1:
                raise DomainError(f"Klein vertices leave the chart domain at kappa={k}")


def _solve_step(m0: msh.TriangleMesh, kappa: float, k: int, tol: float):
    m = m0.with_kappa(kappa)
    P = fem.assemble(m, kappa, m.bc)
    return m, fem.solve_smallest(P, k, tol), P


def _overlap(prev_vecs: np.ndarray, vecs: np.ndarray, M) -> np.ndarray:
    """|<v_i, w_j>_M| with both sets normalised in the current mass inner product."""
    MV = M @ vecs
    pn = np.sqrt(np.einsum("ij,ij->j", prev_vecs, M @ prev_vecs))
    vn = np.sqrt(np.einsum("ij,ij->j", vecs, MV))
    return np.abs(prev_vecs.T @ MV) / np.outer(pn, vn)


def sweep(tri_klein, kappa_path=(0.0, -1.0), steps: int = 10, k: int = 4, h: float | None = None,
          bc=("N", "N", "N"), tracked: int | None = None, tol: float = 1e-8, min_dt: float = MIN_DT,
          divisions: int = 24, track: bool = True) -> BranchData:
    """Follow the first ``k`` eigenpairs along the straight curvature path."""
    tri_klein = np.asarray(tri_klein, float)
    k0, k1 = map(float, kappa_path)
    _check_path(tri_klein, k0, k1)
    # the node set is built at the path curvature closest to zero, so reversed paths share it
    k_ref = 0.0 if k0 * k1 <= 0 else min(k0, k1, key=abs)
    t0 = geo.GeodesicTriangle(k_ref, tri_klein, geo.KLEIN, bc)
    if tracked is None:
        tracked = 1 if all(b == geo.NEUMANN for b in t0.bc) else 0
    frame = geo.Isometry.identity(k_ref)
    verts = geo.klein_to_poincare(tri_klein, k_ref)
    sides = [np.linalg.norm(verts[(i + 1) % 3] - verts[(i + 2) % 3]) for i in range(3)]
    if h is None:
        h = max(sides) / divisions
    h = min(h, min(sides) / 4)
    base = msh.generate(t0, h, frame=frame)

    def kap(t):
        return k0 + t * (k1 - k0)

    ts, values, perms, overlaps, mats, reports, events = [], [], [], [], [], [], []
    prev = None
    t_cur = 0.0
    target_steps = np.linspace(0.0, 1.0, max(int(steps), 1) + 1)
    queue = list(target_steps)

    def attempt(t):
        try:
            return _solve_step(base, kap(t), k, tol)
        except CurvspecError as exc:
            err = StepFailure(f"step failed at t={t:.6g}: {exc}", t)
            if ts:
                err.partial = BranchData(np.array(ts), kap(np.array(ts)), np.array(values), np.array(perms),
                                         np.array(overlaps), mats, reports, events, tracked, tol, base.h)
            raise err from exc

    while queue:
        t_next = queue.pop(0)
        m, s, P = attempt(t_next)
        V = s.vectors
        if prev is None:
            perm = np.arange(k)
            ov = np.ones(k)
            O = np.eye(k)
        else:
            O = _overlap(prev, V, P.mass)
            rows, cols = linear_sum_assignment(-O)
            perm = np.empty(k, int)
            perm[rows] = cols
            ov = O[rows, cols]
            if ov.min() < OVERLAP_MIN:
                gap = t_next - t_cur
                if gap / 2 >= min_dt:
                    queue.insert(0, t_next)
                    queue.insert(0, t_cur + gap / 2)
                    log.debug("bisecting at t=%g (overlap %.3f)", t_next, ov.min())
                    continue
                events.append({"type": "overlap_dip", "t": float(t_next), "kappa": float(kap(t_next)),
                               "overlap": float(ov.min())})
        # branch j follows sorted index perm[j]; align signs with the previous step
        Vb = V[:, perm]
        if prev is not None:
            sg = np.sign(np.einsum("ij,ij->j", prev, P.mass @ Vb))
            sg[sg == 0] = 1
            Vb = Vb * sg
            prev_order = np.argsort(values[-1], kind="stable")
            cur_vals = s.values[perm]
            cur_order = np.argsort(cur_vals, kind="stable")
            if not np.array_equal(prev_order, cur_order):
                swapped = [int(j) for j in range(k) if prev_order[j] != cur_order[j]]
                events.append({"type": "crossing", "t": float(t_next), "kappa": float(kap(t_next)),
                               "branches": swapped})
        ts.append(float(t_next))
        values.append(s.values[perm])
        perms.append(perm)
        overlaps.append(ov)
        mats.append(O)
        if track:
            pair = s.pairs[int(perm[tracked])]
            reports.append(an.detect_critical_points(pair, m))
        else:
            reports.append(None)
        prev = Vb
        t_cur = t_next
    return BranchData(np.array(ts), kap(np.array(ts)), np.array(values), np.array(perms), np.array(overlaps),
                      mats, reports, events, tracked, tol, base.h)


@dataclass
class PersistenceTable:
    t: np.ndarray
    counts: list
    matches: list  # per step: list of (previous index, current index, distance)
    events: list

    @property
    def identically_zero(self) -> bool:
        return all(c == 0 for c in self.counts)


def _points(rep) -> np.ndarray:
    pts = [p.frame_location for p in rep.interior_points + rep.edge_points]
    return np.array(pts, float).reshape(-1, 2)


def track_critical_points(b: BranchData) -> PersistenceTable:
    counts, matches, events = [], [], []
    prev_pts = None
    for i, rep in enumerate(b.reports):
        if rep is None:
            counts.append(None)
            matches.append([])
            continue
        cnt = rep.total + len(rep.continuum)
        pts = _points(rep)
        pairs = []
        if prev_pts is not None and len(prev_pts) and len(pts):
            D = np.linalg.norm(prev_pts[:, None] - pts[None], axis=2)
            r, c = linear_sum_assignment(D)
            pairs = [(int(a), int(bb), float(D[a, bb])) for a, bb in zip(r, c) if D[a, bb] <= MATCH_RADIUS * b.h]
        if counts and counts[-1] is not None and counts[-1] != cnt:
            events.append({"type": "count_change", "t": float(b.t[i]), "kappa": float(b.kappa[i]),
                           "from": counts[-1], "to": cnt})
        counts.append(cnt)
        matches.append(pairs)
        prev_pts = pts
    return PersistenceTable(b.t, counts, matches, events)


def step_halving_discrepancy(tri_klein, kappa_path=(0.0, -1.0), steps: int = 4, k: int = 4, **kw) -> float:
    """Largest difference between branch values at the shared ``t`` of a sweep and its step-halved rerun."""
    a = sweep(tri_klein, kappa_path, steps, k, track=False, **kw)
    b = sweep(tri_klein, kappa_path, 2 * steps, k, track=False, **kw)
    worst = 0.0
    for i, t in enumerate(a.t):
        j = int(np.argmin(np.abs(b.t - t)))
        if abs(b.t[j] - t) < 1e-12:
            worst = max(worst, float(np.max(np.abs(np.sort(a.values[i]) - np.sort(b.values[j])))))
    return worst


def events_json(b: BranchData, table: PersistenceTable | None = None) -> dict:
    return {"crossings": b.crossings(), "overlap_dips": [e for e in b.events if e["type"] == "overlap_dip"],
            "critical_count_changes": [] if table is None else table.events}
