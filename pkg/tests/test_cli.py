import json
import math
from pathlib import Path

import pytest

from curvspec import cli

ROOT = Path(__file__).resolve().parents[1]


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg) if not isinstance(cfg, str) else cfg)
    return str(p)


def test_solve_right_isosceles(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["solve", "--config", str(ROOT / "configs/solve_right_isosceles.json"), "--out", str(out),
                     "--emit-svg"])
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    lines = (out / "spectrum.csv").read_text().strip().split("\n")
    assert lines[0] == "index,value,residual"
    value = float(lines[2].split(",")[1])
    assert abs(value - math.pi ** 2) / math.pi ** 2 < 5e-3
    assert rep["spectrum"][1]["value"] == pytest.approx(value)
    assert rep["nodal_set"]["topology"] == "SimpleArc"
    svg = (out / "nodal.svg").read_text()
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    assert svg.count("<path") == 1
    meta = json.loads((out / "meta.json").read_text())
    assert meta["exit_code"] == 0


def test_malformed_json_exits_3_without_output(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["solve", "--config", write(tmp_path, "{not json"), "--out", str(out)])
    assert code == 3
    assert not out.exists()


@pytest.mark.parametrize("cfg", [
    {"triangle": {"curvature": 0, "vertices": [[0, 0], [1, 0], [0, 1]]}, "bogus": 1},
    {"triangle": {"curvature": 0, "vertices": [[0, 0], [1, 0]]}},
    {"triangle": {"curvature": -1, "vertices": [[0, 0], [1.5, 0], [0, 0.5]]}},
    {"mesh": {"h": 0.1}},
])
def test_config_errors(tmp_path, cfg):
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", write(tmp_path, cfg), "--out", str(out)]) == 3
    assert not out.exists()


def test_verify_suite_and_summary(tmp_path):
    cfg = {"suite": {"name": "onequarter", "counts": {"hyperbolic": 2}, "divisions": 12}}
    out = tmp_path / "out"
    assert cli.main(["verify", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    doc = json.loads((out / "suite.json").read_text())
    assert doc["seed"] == 20240611 and len(doc["cases"]) == 2
    rows = (out / "summary.csv").read_text().strip().split("\n")
    assert rows[0] == "case_id,claim,status,margin,h_final"
    assert all(float(r.split(",")[3]) > 0.01 for r in rows[1:])


def test_verify_deterministic_across_jobs(tmp_path):
    cfg = write(tmp_path, {"suite": {"name": "mixed_single", "counts": {"mixed": 3}, "divisions": 12}})
    outs = []
    for jobs in (1, 3):
        out = tmp_path / f"j{jobs}"
        cli.main(["verify", "--config", cfg, "--out", str(out), "--jobs", str(jobs)])
        outs.append(out)
    for name in ("suite.json", "summary.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_suite_exit_codes():
    case = {"mode": "assert", "status": "pass", "claims": []}
    assert cli.suite_exit_code([case]) == 0
    assert cli.suite_exit_code([case, dict(case, status="inconclusive")]) == 4
    assert cli.suite_exit_code([case, dict(case, status="fail"), dict(case, status="inconclusive")]) == 1
    assert cli.suite_exit_code([dict(case, mode="probe", status="fail")]) == 0


def test_sweep_outputs(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["sweep", "--config", str(ROOT / "configs/sweep_flat_to_hyperbolic.json"), "--out", str(out)])
    assert code == 0
    head = (out / "branches.csv").read_text().split("\n")[0]
    assert head == "t,kappa,branch,value,overlap,crit_count"
    ev = json.loads((out / "events.json").read_text())
    assert ev["crossings"] == [] and ev["critical_count_changes"] == []


def test_sweep_rejects_non_klein(tmp_path):
    cfg = {"triangle": {"curvature": 0, "angles": [1, 1, 1.14159]}}
    assert cli.main(["sweep", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 3
