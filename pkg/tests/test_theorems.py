import json
import math

import numpy as np
import pytest

from curvspec import geometry as geo
from curvspec import theorems as th


@pytest.fixture(scope="module")
def obtuse_case(obtuse_hyperbolic):
    return th.verify_hotspots_neumann(obtuse_hyperbolic, case_id="obtuse")


def test_obtuse_hyperbolic_all_claims_pass(obtuse_case):
    assert obtuse_case.mode == th.ASSERT
    assert obtuse_case.artifacts["classification"] == geo.OBTUSE
    for c in obtuse_case.claims:
        assert c.status == th.PASS, (c.claim, c.detail)
    assert obtuse_case.status == th.PASS
    assert len(obtuse_case.claim("no_critical_points").h) == 2


def test_case_json_roundtrip(obtuse_case):
    d = json.loads(json.dumps(obtuse_case.to_json()))
    assert d["status"] == th.PASS
    assert {c["claim"] for c in d["claims"]} == {
        "no_critical_points", "extrema_at_acute_vertices", "killing_certified", "nodal_simple_arc", "eigen_gap"}


def test_flat_right_isosceles_is_probe(right_isosceles):
    case = th.verify_hotspots_neumann(right_isosceles, divisions=16)
    assert case.mode == th.PROBE and case.status == th.REPORT
    # the flat right isosceles mode is cos(pi x) - cos(pi y): monotone and vertex extrema
    assert case.claim("no_critical_points").detail["observed"] == th.PASS
    assert case.claim("extrema_at_acute_vertices").detail["observed"] == th.PASS


def test_acute_hyperbolic_is_probe():
    t = geo.triangle_from_angles([math.pi / 4, math.pi / 4, math.pi / 5], -1.0)
    case = th.verify_hotspots_neumann(t, divisions=12)
    assert case.mode == th.PROBE
    assert all(c.status == th.REPORT for c in case.claims)


def test_combine_two_level_rule():
    ok = [{"ok": True, "h": 0.1}, {"ok": True, "h": 0.05}]
    bad = [{"ok": False, "h": 0.1}, {"ok": False, "h": 0.05}]
    mixed = [{"ok": True, "h": 0.1}, {"ok": False, "h": 0.05}]
    assert th._combine("c", ok).status == th.PASS
    assert th._combine("c", bad).status == th.FAIL
    assert th._combine("c", mixed).status == th.INCONCLUSIVE


def test_case_status_priority():
    c = th.VerificationCase("x", {}, th.ASSERT, [th.ClaimResult("a", th.PASS), th.ClaimResult("b", th.INCONCLUSIVE)])
    assert c.status == th.INCONCLUSIVE
    c.claims.append(th.ClaimResult("c", th.FAIL))
    assert c.status == th.FAIL
    assert th.suite_status([c]) == th.FAIL


def test_mixed_hypothesis_branches():
    t = geo.triangle_from_angles([math.pi / 3, math.pi / 4, math.pi / 5], -1.0, bc=("D", "N", "N"))
    assert th.mixed_hypothesis(t) == ("single", True)
    t = geo.triangle_from_angles([math.pi * 0.6, math.pi / 6, math.pi / 8], -1.0, bc=("D", "N", "N"))
    assert th.mixed_hypothesis(t) == ("single", False)
    t = geo.triangle_from_angles([math.pi / 6, math.pi / 3, math.pi / 3], -1.0, bc=("N", "D", "D"))
    assert th.mixed_hypothesis(t) == ("double", True)
    t = geo.triangle_from_angles([math.pi / 8, math.pi * 0.6, math.pi / 6], -1.0, bc=("N", "D", "D"))
    assert th.mixed_hypothesis(t) == ("double", False)
    assert th.mixed_hypothesis(t.with_bc(("N", "N", "N")))[0] is None


def test_mixed_single_hyperbolic_passes():
    t = geo.triangle_from_angles([math.pi / 3, math.pi / 4, math.pi / 5], -1.0, bc=("D", "N", "N"))
    case = th.verify_mixed(t)
    assert case.mode == th.ASSERT
    assert case.status == th.PASS, [c.to_json() for c in case.claims]


def test_flat_double_control_location():
    t = geo.GeodesicTriangle(0.0, [[0, 0], [1, 0], [1, 1]], geo.KLEIN, ("D", "N", "D"))
    case = th.verify_mixed(t)
    assert case.status == th.PASS
    # reflecting across the diagonal gives the Dirichlet square, mode sin(pi x) sin(pi y)
    loc = np.array(case.artifacts["critical_locations"][-1])
    h = case.claim("killing_certified").h[-1]
    assert np.linalg.norm(loc - [0.5, 0.5]) <= 2 * h


def test_octant_double_passes():
    t = geo.triangle_from_angles([math.pi / 2] * 3, 1.0, bc=("N", "D", "D"))
    case = th.verify_mixed(t)
    assert case.status == th.PASS


def test_hypothesis_violation_reports():
    t = geo.triangle_from_angles([math.pi * 0.6, math.pi / 6, math.pi / 8], -1.0, bc=("D", "N", "N"))
    case = th.verify_mixed(t, divisions=12)
    assert case.status == th.REPORT and case.note


def test_exception_shape_detection():
    assert th.is_exception_shape(th.exception_triangle()) == 0
    assert th.is_exception_shape(th.exception_triangle(base=0.45 * math.pi)) is None
    assert th.is_exception_shape(geo.GeodesicTriangle(0.0, [[0, 0], [1, 0], [0, 1]])) is None


@pytest.mark.parametrize("base,claim", [(math.pi / 2, "continuum_on_base"), (0.45 * math.pi, "no_continuum")])
def test_exception_and_perturbation(base, claim):
    case = th.verify_finiteness(th.exception_triangle(base=base))
    assert case.claim(claim).status == th.PASS
    assert case.status == th.PASS


def test_exception_latitude_constant():
    case = th.verify_finiteness(th.exception_triangle())
    var = case.claim("latitude_constant").detail["levels"][-1]["variation"]
    assert var < th.LATITUDE_TOL


def test_one_quarter_on_sample():
    t = geo.triangle_from_angles([math.pi / 3, math.pi / 4, math.pi / 6], -1.0)
    case = th.verify_one_quarter(t, divisions=16)
    assert case.status == th.PASS
    assert min(case.artifacts["mu2"]) > 0.25


def test_mixed_inequality_hyperbolic():
    t = geo.triangle_from_angles([math.pi / 3, math.pi / 4, math.pi / 6], -1.0)
    case = th.verify_mixed_inequality(t, divisions=16)
    assert case.mode == th.ASSERT and case.status == th.PASS
    assert len(case.claims) == 3


def test_sphere_probe_never_asserts(octant):
    case = th.verify_mixed_inequality(octant, divisions=16)
    assert case.mode == th.PROBE and case.status == th.REPORT
    # the octant is extremal: all three margins vanish within the error bars
    assert all(c.status == th.INCONCLUSIVE for c in case.claims)


def test_families_deterministic_and_typed():
    a = th.nonacute_hyperbolic_family(6)
    b = th.nonacute_hyperbolic_family(6)
    for s, t in zip(a, b):
        np.testing.assert_array_equal(s.klein_vertices, t.klein_vertices)
    assert all(t.classify() in (geo.RIGHT, geo.OBTUSE) and t.kappa < 0 for t in a)
    assert all(th.mixed_hypothesis(t)[1] for t in th.mixed_single_family(6))
    assert all(th.mixed_hypothesis(t)[1] for t in th.mixed_double_family(6))
    assert all(t.kappa > 0 for t in th.spherical_family(4))
    c = th.nonacute_hyperbolic_family(6, seed=1)
    assert not np.allclose(a[1].klein_vertices, c[1].klein_vertices)


def test_suite_cases_names():
    for name in th.SUITES:
        cases = th.suite_cases(name, counts={"nonacute": 2, "hyperbolic": 2, "mixed": 2, "spherical": 2})
        assert cases and len({c[0] for c in cases}) == len(cases)
    with pytest.raises(ValueError):
        th.suite_cases("nope")
