"""Command line front end: ``curvspec solve|verify|sweep --config PATH --out DIR``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from . import analysis as an
from . import continuation as cont
from . import fem
from . import geometry as geo
from . import mesh as msh
from . import theorems as th
from .exceptions import ConfigError, CurvspecError, NoConvergence, StepFailure

log = logging.getLogger("curvspec")

EXIT_OK, EXIT_FAIL, EXIT_SOLVER, EXIT_CONFIG, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_bc = {"type": "array", "items": {"enum": ["N", "D", "Neumann", "Dirichlet"]}, "minItems": 3, "maxItems": 3}
_point = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

TRIANGLE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "curvature": _num,
        "chart": {"type": "string"},
        "vertices": {"type": "array", "items": _point, "minItems": 3, "maxItems": 3},
        "angles": {"type": "array", "items": _pos, "minItems": 3, "maxItems": 3},
        "bc": _bc,
    },
    "required": ["curvature"],
    "oneOf": [{"required": ["vertices"]}, {"required": ["angles"]}],
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "triangle": TRIANGLE_SCHEMA,
        "mesh": {
            "type": "object", "additionalProperties": False,
            "properties": {"h": _pos, "grading": {"type": "number", "minimum": 1},
                           "divisions": {"type": "integer", "minimum": 4}, "levels": {"type": "integer", "minimum": 1}},
        },
        "solver": {
            "type": "object", "additionalProperties": False,
            "properties": {"k": {"type": "integer", "minimum": 1}, "tol": _pos,
                           "max_iter": {"type": "integer", "minimum": 1}, "shift": _num},
        },
        "analysis": {
            "type": "object", "additionalProperties": False,
            "properties": {"crit_tol_rel": _pos, "nodal": {"type": "boolean"}},
        },
        "sweep": {
            "type": "object", "additionalProperties": False,
            "properties": {"kappa_start": _num, "kappa_end": _num, "steps": {"type": "integer", "minimum": 1},
                           "k": {"type": "integer", "minimum": 1}},
        },
        "suite": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "name": {"enum": list(th.SUITES)},
                "seed": {"type": "integer"},
                "divisions": {"type": "integer", "minimum": 4},
                "counts": {
                    "type": "object", "additionalProperties": False,
                    "properties": {c: {"type": "integer", "minimum": 1}
                                   for c in ("nonacute", "hyperbolic", "mixed", "spherical")},
                },
            },
            "required": ["name"],
        },
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {"spectrum": {"type": "string"}, "report": {"type": "string"}},
        },
    },
}

REQUIRED = {"solve": ["triangle"], "verify": ["suite"], "sweep": ["triangle"]}


def load_config(path, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    missing = [k for k in REQUIRED[command] if k not in cfg]
    if missing:
        raise ConfigError(f"config for {command!r} needs {', '.join(missing)}")
    return cfg


def triangle_from_config(spec: dict) -> geo.GeodesicTriangle:
    bc = tuple(spec.get("bc", ("N", "N", "N")))
    try:
        if "angles" in spec:
            return geo.triangle_from_angles(spec["angles"], spec["curvature"], bc=bc)
        return geo.GeodesicTriangle(spec["curvature"], spec["vertices"], spec.get("chart", geo.KLEIN), bc)
    except CurvspecError as exc:
        raise ConfigError(f"invalid triangle: {exc}") from exc


# ---------------------------------------------------------------------------
# serialisation


def clean(obj):
    """Plain JSON types; floats are kept as Python floats (shortest round-trip repr)."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dump_json(obj) -> str:
    return json.dumps(clean(obj), indent=2) + "\n"


def _write(out: Path, name: str, text: str) -> None:
    (out / name).write_text(text, encoding="utf-8")


def _meta(out: Path, command: str, config: str, jobs: int, started: float, extra: dict | None = None) -> None:
    meta = {"command": command, "config": str(config), "jobs": jobs, "version": __version__,
            "python": platform.python_version(), "numpy": np.__version__,
            "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime(started)),
            "elapsed_s": round(time.time() - started, 3)}
    meta.update(extra or {})
    _write(out, "meta.json", json.dumps(meta, indent=2) + "\n")


# ---------------------------------------------------------------------------
# svg


def _svg_transform(pts: np.ndarray, lo: np.ndarray, scale: float, size: float, pad: float) -> np.ndarray:
    p = (pts - lo) * scale + pad
    p[:, 1] = size - p[:, 1]
    return p


def _poly(pts: np.ndarray) -> str:
    return " ".join(f"{x:.3f},{y:.3f}" for x, y in pts)


def contour_segments(m: msh.TriangleMesh, u: np.ndarray, level: float) -> list:
    """Line segments of the level set of the P1 interpolant."""
    segs = []
    for el in m.elements:
        vals = u[el] - level
        pts = []
        for a, b in ((0, 1), (1, 2), (2, 0)):
            va, vb = vals[a], vals[b]
            if (va < 0) != (vb < 0):
                s = va / (va - vb)
                pts.append(m.nodes[el[a]] + s * (m.nodes[el[b]] - m.nodes[el[a]]))
        if len(pts) == 2:
            segs.append(np.array(pts))
    return segs


def render_svg(m: msh.TriangleMesh, u: np.ndarray, nodal: an.NodalSet | None, crit: an.CriticalReport | None,
               size: float = 480.0, levels: int = 10) -> str:
    """Triangle boundary, contours, nodal polylines and critical points, drawn in the triangle's own chart."""
    t = m.triangle
    chart = t.chart
    orig = lambda xy: np.asarray(m.to_original(np.asarray(xy, float), chart), float).reshape(-1, 2)  # noqa: E731
    verts = t.vertices
    bnd = [orig(m.nodes[m.edge_chain(e)]) for e in range(3)]
    allpts = np.vstack(bnd + [verts])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    pad = 16.0
    scale = (size - 2 * pad) / max(float((hi - lo).max()), 1e-12)
    tr = lambda p: _svg_transform(np.asarray(p, float).reshape(-1, 2), lo, scale, size, pad)  # noqa: E731
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}" '
           f'viewBox="0 0 {size:.0f} {size:.0f}">']
    out.append('<g id="contours" fill="none" stroke="#bbbbbb" stroke-width="0.6">')
    lv = np.linspace(u.min(), u.max(), levels + 2)[1:-1]
    for c in lv:
        if abs(c) < 1e-12 * max(abs(u.max()), abs(u.min()), 1.0):
            continue
        for seg in contour_segments(m, u, c):
            out.append(f'<polyline points="{_poly(tr(orig(seg)))}"/>')
    out.append("</g>")
    colors = {geo.NEUMANN: "#1f77b4", geo.DIRICHLET: "#d62728"}
    out.append('<g id="boundary" fill="none" stroke-width="2">')
    for e in range(3):
        out.append(f'<polyline stroke="{colors[t.bc[e]]}" points="{_poly(tr(bnd[e]))}"/>')
    out.append("</g>")
    if nodal is not None:
        out.append('<g id="nodal" fill="none" stroke="black" stroke-width="1.5">')
        for line in nodal.polylines:
            p = tr(np.asarray(line, float))
            if len(p) < 2:
                continue
            d = f"M {p[0, 0]:.3f} {p[0, 1]:.3f} " + " ".join(f"L {x:.3f} {y:.3f}" for x, y in p[1:])
            out.append(f'<path d="{d}"/>')
        out.append("</g>")
    if crit is not None:
        out.append('<g id="critical" fill="#2ca02c">')
        for cp in crit.interior_points + crit.edge_points:
            x, y = tr(np.asarray(cp.location, float))[0]
            out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="4"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands


def _mesh_for(t: geo.GeodesicTriangle, cfg: dict) -> msh.TriangleMesh:
    mc = cfg.get("mesh", {})
    h = mc.get("h")
    if h is None:
        h = th.chart_diameter(t) / mc.get("divisions", 32)
    frame = msh.choose_frame(t)
    p = geo.klein_to_poincare(frame.apply(t.klein_vertices), t.kappa)
    sides = [np.linalg.norm(p[(i + 1) % 3] - p[(i + 2) % 3]) for i in range(3)]
    if h > min(sides) / 4:
        raise ConfigError(f"mesh.h = {h} exceeds a quarter of the shortest side ({min(sides) / 4:.6g})")
    return msh.generate(t, h, grading=mc.get("grading"))


def solve_report(t: geo.GeodesicTriangle, m: msh.TriangleMesh, s: fem.Spectrum, cfg: dict) -> tuple:
    ac = cfg.get("analysis", {})
    u = s.principal()
    crit = an.detect_critical_points(u, m, tol_rel=ac.get("crit_tol_rel", 1e-3))
    nodal = an.extract_nodal_set(u, m) if ac.get("nodal", True) else None
    expansions = []
    for v in range(3):
        try:
            expansions.append(an.vertex_coefficients(u, m, v).to_json())
        except CurvspecError as exc:
            expansions.append({"vertex": v, "error": str(exc)})
    branch, _ = th.mixed_hypothesis(t)
    fields = th._mixed_fields(t, branch) if branch else th.edge_axes(t)
    label, cert = th._search_killing(u, m, fields)
    report = {
        "triangle": t.to_spec(),
        "classification": t.classify(),
        "mesh": {"h": m.h, "n_nodes": m.n_nodes, "n_elements": m.n_elements},
        "spectrum": [{"index": p.index, "value": p.value, "residual": p.residual} for p in s.pairs],
        "principal_index": u.index,
        "critical_points": crit.to_json(),
        "nodal_set": None if nodal is None else nodal.to_json(),
        "vertex_expansions": expansions,
        "killing": {"field": label, "certified": cert.certified, "sign": cert.sign, "min_ratio": cert.min_ratio},
    }
    return report, u, crit, nodal


def cmd_solve(cfg: dict, out: Path, emit_svg: bool = False, jobs: int = 1) -> int:
    t = triangle_from_config(cfg["triangle"])
    m = _mesh_for(t, cfg)
    sc = cfg.get("solver", {})
    p = fem.assemble(m)
    try:
        s = fem.solve_smallest(p, sc.get("k", 4), sc.get("tol", 1e-8), sc.get("max_iter"), sc.get("shift"))
    except NoConvergence as exc:
        log.error("solver did not converge: %s", exc)
        return EXIT_SOLVER
    report, u, crit, nodal = solve_report(t, m, s, cfg)
    oc = cfg.get("output", {})
    _write(out, oc.get("spectrum", "spectrum.csv"), s.to_csv())
    _write(out, oc.get("report", "report.json"), dump_json(report))
    if emit_svg:
        _write(out, "nodal.svg", render_svg(m, u.vector, nodal, crit))
    return EXIT_OK


def _worker_init() -> None:
    threadpool_limits(1)


def _run_case(args: tuple) -> dict:
    kind, case_id, spec, divisions = args
    with threadpool_limits(1):
        t = geo.GeodesicTriangle.from_spec(spec)
        return th.run_case(kind, case_id, t, divisions).to_json()


def run_suite(name: str, seed: int = th.DEFAULT_SEED, counts: dict | None = None, divisions: int | None = None,
              jobs: int = 1) -> list:
    """Case JSON dicts in case order; ``jobs > 1`` fans out to a process pool."""
    cases = th.suite_cases(name, seed, counts)
    tasks = [(kind, cid, t.to_spec(), divisions) for cid, kind, t in cases]
    if jobs <= 1:
        return [_run_case(a) for a in tasks]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init) as pool:
        return list(pool.map(_run_case, tasks))


def summary_csv(cases: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case_id", "claim", "status", "margin", "h_final"])
    for c in cases:
        for cl in c["claims"]:
            margin = "" if cl["margin"] is None else fem.fmt(cl["margin"])
            h = fem.fmt(cl["h"][-1]) if cl["h"] else ""
            w.writerow([c["case_id"], cl["claim"], cl["status"], margin, h])
    return buf.getvalue()


def suite_exit_code(cases: list) -> int:
    asserted = [c for c in cases if c["mode"] == th.ASSERT]
    st = {c["status"] for c in asserted}
    if th.FAIL in st:
        return EXIT_FAIL
    if th.INCONCLUSIVE in st:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_verify(cfg: dict, out: Path, emit_svg: bool = False, jobs: int = 1) -> int:
    sc = cfg["suite"]
    seed = sc.get("seed", th.DEFAULT_SEED)
    cases = run_suite(sc["name"], seed, sc.get("counts"), sc.get("divisions"), jobs)
    doc = {"suite": sc["name"], "seed": seed, "cases": cases}
    _write(out, "suite.json", dump_json(doc))
    _write(out, "summary.csv", summary_csv(cases))
    if sc["name"] == "sphere_probe":
        # a probe never asserts; its hyperbolic controls are still recorded with their status
        return EXIT_OK
    return suite_exit_code(cases)


def cmd_sweep(cfg: dict, out: Path, emit_svg: bool = False, jobs: int = 1) -> int:
    tc = cfg["triangle"]
    if "vertices" not in tc or tc.get("chart", geo.KLEIN) not in (geo.KLEIN, "Klein"):
        raise ConfigError("sweep needs Klein-chart vertices")
    sw = cfg.get("sweep", {})
    mc = cfg.get("mesh", {})
    sc = cfg.get("solver", {})
    path = (sw.get("kappa_start", 0.0), sw.get("kappa_end", -1.0))
    bc = tuple(geo._parse_bc(tc.get("bc", ("N", "N", "N"))))
    try:
        b = cont.sweep(tc["vertices"], path, sw.get("steps", 10), sw.get("k", 4), h=mc.get("h"), bc=bc,
                       tol=sc.get("tol", 1e-8), divisions=mc.get("divisions", 24))
    except StepFailure as exc:
        log.error("%s", exc)
        partial = getattr(exc, "partial", None)
        if partial is not None:
            _write(out, "branches.csv", partial.to_csv())
            _write(out, "events.json", dump_json(cont.events_json(partial, cont.track_critical_points(partial))))
        return EXIT_SOLVER
    except CurvspecError as exc:
        raise ConfigError(str(exc)) from exc
    table = cont.track_critical_points(b)
    _write(out, "branches.csv", b.to_csv())
    _write(out, "events.json", dump_json(cont.events_json(b, table)))
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "sweep": cmd_sweep}


def _setup_logging() -> None:
    level = os.environ.get("CURVSPEC_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvspec", description="Laplace eigenproblems on constant-curvature triangles")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--emit-svg", action="store_true")
    return ap


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    started = time.time()
    try:
        cfg = load_config(args.config, args.command)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        if "triangle" in cfg and args.command == "solve":
            triangle_from_config(cfg["triangle"])
    except ConfigError as exc:
        print(f"curvspec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        with threadpool_limits(1):
            code = COMMANDS[args.command](cfg, out, args.emit_svg, args.jobs)
    except ConfigError as exc:
        print(f"curvspec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergence as exc:
        print(f"curvspec: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _meta(out, args.command, args.config, args.jobs, started, {"exit_code": code})
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
