"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line in ``RESULTS``; the terminal summary
hook in conftest prints them after the run.
"""
import json
import math
import time

import numpy as np
import pytest

from curvspec import analysis as an
from curvspec import cli
from curvspec import continuation as ct
from curvspec import fem
from curvspec import geometry as geo
from curvspec import mesh as msh
from curvspec import theorems as th

RESULTS = {}


def record(n, ok, text):
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}"
    print(RESULTS[n])
    assert ok, text


def run_suite(name, **kw):
    return [th.run_case(kind, cid, t, **kw) for cid, kind, t in th.suite_cases(name)]


def ladder_errors(t, exact, h, levels=3):
    errs = []
    for m in msh.ladder(t, h, levels):
        errs.append(abs(fem.solve(m, 3).values[1] - exact) / exact)
    return np.array(errs)


def test_c01_euclidean_oracles():
    cases = {
        "right isosceles": (geo.GeodesicTriangle(0.0, [[0, 0], [1, 0], [0, 1]]), math.pi ** 2),
        "equilateral": (geo.GeodesicTriangle(0.0, [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]), 16 * math.pi ** 2 / 9),
    }
    parts, ok = [], True
    for name, (t, exact) in cases.items():
        err = ladder_errors(t, exact, 0.05)
        order = fem.observed_order(err)
        good = err[-1] < 1e-3 and np.all((order >= 1.8) & (order <= 2.2))
        ok &= bool(good)
        parts.append(f"{name}: rel err {err[-1]:.2e}, orders {np.round(order, 2).tolist()}")
    record(1, ok, "; ".join(parts))


def test_c02_one_quarter():
    start = time.perf_counter()
    cases = run_suite("onequarter")
    elapsed = time.perf_counter() - start
    mu2 = [v for c in cases for v in c.artifacts["mu2"]]
    ok = all(c.status == th.PASS for c in cases) and min(mu2) > 0.26 and elapsed <= 180
    record(2, ok, f"{len(cases)} triangles, min mu2 {min(mu2):.4f} over both levels, {elapsed:.1f} s")


def test_c03_mixed_inequality():
    cases = run_suite("mixed_ineq")
    claims = [cl for c in cases for cl in c.claims]
    bad = [cl for cl in claims if cl.status != th.PASS]
    worst = min(cl.margin + cl.tol for cl in claims)
    record(3, not bad and len(claims) == 3 * len(cases),
           f"{len(claims)} (triangle, edge) rows, {len(bad)} violations, min margin + eps {worst:.3e}")


def test_c04_w_test_function():
    mu = 0.3
    s = 0.5 + 0.5j * math.sqrt(4 * mu - 1)
    t = geo.GeodesicTriangle(-1.0, [[0, 1], [0, 2.5], [0.8, 1.6]], chart=geo.HALFPLANE)
    err = []
    for m in msh.ladder(t, 0.04, 2):
        w = m.to_original(m.nodes, geo.HALFPLANE)[:, 1] ** s
        q = fem.rayleigh_quotient_complex(fem.assemble(m), w.real, w.imag)
        err.append(abs(q - mu))
    ratio = err[0] / err[1]
    record(4, ratio >= 3, f"errors {err[0]:.2e} -> {err[1]:.2e}, ratio {ratio:.2f}")


@pytest.fixture(scope="module")
def neumann_cases():
    return run_suite("neumann_nonacute")


def test_c05_neumann_nonacute(neumann_cases):
    bad = [c.case_id for c in neumann_cases if c.status != th.PASS]
    levels_ok = all(lv["interior"] == 0 and lv["edge"] == 0
                    for c in neumann_cases for lv in c.claim("no_critical_points").detail["levels"])
    margins = [c.claim("killing_certified").margin for c in neumann_cases]
    gaps = [c.claim("eigen_gap").detail["levels"][-1]["gap"] for c in neumann_cases]
    record(5, not bad and levels_ok and len(neumann_cases) == 20,
           f"{len(neumann_cases) - len(bad)}/{len(neumann_cases)} pass, min Killing ratio {min(margins):.3f}, "
           f"min gap {min(gaps):.3f}")


def test_c06_mixed():
    single = run_suite("mixed_single")
    double = run_suite("mixed_double")
    bad = [c.case_id for c in single + double if c.status != th.PASS]
    exact_one = all(lv["edge"] == 1 and lv["interior"] == 0
                    for c in double for lv in c.claim("one_critical_point_on_neumann_edge").detail["levels"])
    ctrl = next(c for c in double if c.case_id == "double_flat_control")
    hs = ctrl.claim("one_critical_point_on_neumann_edge").h
    dev = [float(np.max(np.abs(np.array(p) - 0.5))) for p in ctrl.artifacts["critical_locations"]]
    located = all(d <= h for d, h in zip(dev, hs))
    record(6, not bad and exact_one and located,
           f"single {len(single)}, double {len(double)}, failing {bad}, control offset {max(dev):.1e} (h {hs[-1]:.3f})")


def test_c07_exception():
    exc = th.verify_finiteness(th.exception_triangle())
    pert = th.verify_finiteness(th.exception_triangle(base=0.45 * math.pi))
    var = max(lv["variation"] for lv in exc.claim("latitude_constant").detail["levels"])
    ok = (exc.claim("continuum_on_base").status == th.PASS and var < 1e-3
          and pert.claim("no_continuum").status == th.PASS)
    record(7, ok, f"continuum on base {exc.claim('continuum_on_base').status}, latitude variation {var:.1e}, "
                  f"perturbed {pert.claim('no_continuum').status}")


def test_c08_continuation():
    tri = [[0.0, 0.0], [0.5, 0.0], [-0.2, 0.4]]
    t = geo.GeodesicTriangle(-1.0, tri)
    b = ct.sweep(tri, (0.0, -1.0), steps=10)
    table = ct.track_critical_points(b)
    tol = 1e-8
    disc = ct.step_halving_discrepancy(tri, (0.0, -1.0), steps=5, tol=tol)
    bound = 2 * tol * (1 + b.values.max())
    ok = (t.classify() != geo.ACUTE and not b.crossings(1) and table.identically_zero and disc <= bound)
    record(8, ok, f"{b.n_steps} steps, {len(b.crossings(1))} mu2 crossings, counts {set(table.counts)}, "
                  f"halving discrepancy {disc:.1e} (bound {bound:.1e})")


def test_c09_gradient_and_mass():
    t = geo.GeodesicTriangle(0.0, [[0, 0], [1, 0], [0, 1]])
    gerr = []
    for m in msh.ladder(t, 0.05, 3, grading=1):
        xy = m.nodes
        u = np.cos(math.pi * xy[:, 0]) - np.cos(math.pi * xy[:, 1])
        exact = np.column_stack([-math.pi * np.sin(math.pi * xy[:, 0]), math.pi * np.sin(math.pi * xy[:, 1])])
        inner = m.interior_nodes()
        gerr.append(np.abs(an.recover_gradient(u, m)[inner] - exact[inner]).max())
    h = geo.GeodesicTriangle(-1.0, [[0, 0], [0.5, 0], [-0.2, 0.4]])
    merr = []
    for m in msh.ladder(h, 0.04, 3):
        merr.append(abs(fem.assemble_mass(m, h.kappa).sum() - h.area()))
    go, mo = fem.observed_order(gerr), fem.observed_order(merr)
    ok = bool(np.all(go >= 1.5) and np.all(mo >= 1.8))
    record(9, ok, f"gradient orders {np.round(go, 2).tolist()}, mass orders {np.round(mo, 2).tolist()}")


def test_c10_determinism(tmp_path):
    outs = {}
    for name in ("neumann_nonacute", "finiteness"):
        cfg = tmp_path / f"{name}.json"
        cfg.write_text(json.dumps({"suite": {"name": name}}))
        for tag, jobs in (("a", 1), ("b", 1), ("c", 8)):
            out = tmp_path / f"{name}_{tag}"
            cli.main(["verify", "--config", str(cfg), "--out", str(out), "--jobs", str(jobs)])
            outs[name, tag] = {f: (out / f).read_bytes() for f in ("suite.json", "summary.csv")}
    same = all(outs[n, "a"] == outs[n, "b"] == outs[n, "c"] for n in ("neumann_nonacute", "finiteness"))
    record(10, same, "suite.json and summary.csv byte-identical across repeated runs and --jobs 1 vs 8")
