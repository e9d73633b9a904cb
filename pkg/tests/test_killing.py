import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvspec import geometry as geo
from curvspec import killing as kf
from curvspec.exceptions import PointNotOnGeodesic, UnsupportedKind

CP = geo.ChartPoint


def test_elliptic_at_origin_values():
    R = kf.KillingField.elliptic(-1.0, [0, 0], chart=geo.POINCARE)
    np.testing.assert_allclose(kf.evaluate(R, CP(geo.POINCARE, 0, 0)), [0, 0], atol=1e-15)
    Rf = kf.KillingField.elliptic(0.0, [0, 0])
    np.testing.assert_allclose(kf.evaluate(Rf, CP(geo.POINCARE, 1, 0)), [0, 1], atol=1e-14)


def test_loxodromic_halfplane_dilation():
    L = kf.KillingField.loxodromic(-1.0, [CP(geo.HALFPLANE, 0, 1), CP(geo.HALFPLANE, 0, 2)])
    np.testing.assert_allclose(kf.evaluate(L, CP(geo.HALFPLANE, 0, 1)), [0, 1], atol=1e-12)
    # L = x d/dx + y d/dy everywhere in the half-plane
    np.testing.assert_allclose(L.values([[0.5, 2.0], [-1.0, 0.3]], geo.HALFPLANE), [[0.5, 2.0], [-1.0, 0.3]],
                               atol=1e-12)


def test_flat_loxodromic_is_translation():
    T = kf.KillingField.loxodromic(0.0, [[0, 0], [1, 1]])
    v = T.values([[0.3, 0.2], [0.9, -0.4]], geo.KLEIN)
    np.testing.assert_allclose(v, np.full((2, 2), 1 / math.sqrt(2)), atol=1e-14)


def test_elliptic_orthogonal_to_geodesics_through_centre():
    c = [0.2, -0.1]
    R = kf.KillingField.elliptic(-1.0, c)
    for d in ([1, 0], [0.3, 0.8], [-0.5, 0.5]):
        a, b = np.array(c), np.array(c) + 0.4 * np.array(d)
        for s in np.linspace(0, 1, 7):
            p = a + s * (b - a)
            ang = kf.angle_with_geodesic(R, [CP(geo.KLEIN, *a), CP(geo.KLEIN, *b)], CP(geo.KLEIN, *p))
            assert kf.is_orthogonal(ang)


def test_loxodromic_tangent_to_axis():
    a, b = [-0.3, 0.1], [0.4, 0.3]
    L = kf.KillingField.loxodromic(-1.0, [a, b])
    for s in np.linspace(0, 1, 5):
        p = np.array(a) + s * (np.array(b) - np.array(a))
        ang = kf.angle_with_geodesic(L, [CP(geo.KLEIN, *a), CP(geo.KLEIN, *b)], CP(geo.KLEIN, *p))
        assert min(ang, math.pi - ang) < 1e-9


def test_non_orthogonal_geodesic_never_orthogonal():
    L = kf.KillingField.loxodromic(-1.0, [[-0.5, 0.0], [0.5, 0.0]])
    a, b = np.array([-0.3, -0.4]), np.array([0.5, 0.5])
    flags = []
    for s in np.linspace(0.0, 1.0, 200):
        p = a + s * (b - a)
        flags.append(kf.is_orthogonal(kf.angle_with_geodesic(L, [CP(geo.KLEIN, *a), CP(geo.KLEIN, *b)],
                                                             CP(geo.KLEIN, *p)), 1e-6))
    assert not any(flags)


def test_point_off_geodesic_rejected():
    L = kf.KillingField.loxodromic(-1.0, [[-0.5, 0.0], [0.5, 0.0]])
    with pytest.raises(PointNotOnGeodesic):
        kf.angle_with_geodesic(L, [CP(geo.KLEIN, 0, 0), CP(geo.KLEIN, 0.5, 0)], CP(geo.KLEIN, 0.2, 0.2))


def test_killing_residual_examples():
    R = kf.KillingField.elliptic(-1.0, [0, 0])
    assert kf.killing_residual(R, CP(geo.POINCARE, 0.3, 0.2), 1e-4) < 1e-6
    L = kf.KillingField.loxodromic(-1.0, [CP(geo.HALFPLANE, 0, 1), CP(geo.HALFPLANE, 0, 2)])
    assert kf.killing_residual(L, CP(geo.HALFPLANE, 0.5, 1.0), 1e-4) < 1e-6

    def not_killing(p):
        p = np.asarray(p, float)
        return np.stack([p[..., 0] ** 2, np.zeros_like(p[..., 0])], axis=-1)

    assert kf.killing_residual(not_killing, CP(geo.POINCARE, 0.3, 0.2), 1e-4, kappa=-1.0) > 1e-2


def test_unsupported_kind():
    with pytest.raises(UnsupportedKind):
        kf.KillingField("parabolic", -1.0, [[0, 0]])


def test_spec_roundtrip():
    L = kf.KillingField.loxodromic(-1.0, [[0.1, 0.0], [0.2, 0.3]], orientation=-1)
    L2 = kf.KillingField.from_spec(L.to_spec(), -1.0)
    np.testing.assert_allclose(L2.points, L.points)
    assert L2.orientation == -1


def test_perpendicular_axis_is_orthogonal():
    a, b, p = np.array([-0.4, -0.2]), np.array([0.5, 0.1]), np.array([0.1, 0.5])
    foot, q = kf.perpendicular_axis(-1.0, a, b, p)
    L = kf.KillingField.loxodromic(-1.0, [foot, q])
    ang = kf.angle_with_geodesic(L, [CP(geo.KLEIN, *a), CP(geo.KLEIN, *b)], CP(geo.KLEIN, *foot))
    assert kf.is_orthogonal(ang, 1e-8)


@given(st.sampled_from([-1.0, -0.4, 0.5, 1.0]), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4),
       st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.booleans())
def test_fields_satisfy_killing_equation(kappa, x, y, u, v, elliptic):
    if elliptic:
        X = kf.KillingField.elliptic(kappa, [x, y])
    else:
        if math.hypot(u - x, v - y) < 0.05:
            return
        X = kf.KillingField.loxodromic(kappa, [[x, y], [u, v]])
    assert kf.killing_residual(X, CP(geo.POINCARE, 0.15, -0.1), 1e-4) < 1e-6


@given(st.floats(-0.5, 0.5), st.floats(0.1, 0.6), st.floats(-1.0, 1.0))
def test_loxodromic_flow_preserves_distance_to_axis(x, d, s):
    kappa = -1.0
    a, b = np.array([-0.5, 0.0]), np.array([0.5, 0.0])
    L = kf.KillingField.loxodromic(kappa, [a, b])
    p = geo.klein_to_poincare(np.array([[x, d * math.sqrt(1 - x * x) * 0.9]]), kappa)
    q = kf.flow(L, p, 0.2 * s)
    dk = [geo.distance_to_geodesic(kappa, a, b, geo.poincare_to_klein(z, kappa)) for z in (p, q)]
    assert abs(float(np.squeeze(dk[0])) - float(np.squeeze(dk[1]))) < 1e-6


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(0, 2 * math.pi))
def test_everywhere_or_nowhere_orthogonal(x, y, theta):
    L = kf.KillingField.loxodromic(-1.0, [[-0.3, 0.2], [0.4, -0.1]])
    a = np.array([x, y]) * 0.6
    b = a + 0.4 * np.array([math.cos(theta), math.sin(theta)])
    if np.sum(b ** 2) >= 0.95:
        return
    flags = {kf.is_orthogonal(kf.angle_with_geodesic(L, [CP(geo.KLEIN, *a), CP(geo.KLEIN, *b)],
                                                      CP(geo.KLEIN, *(a + s * (b - a)))), 1e-7)
             for s in np.linspace(0, 1, 9)}
    assert len(flags) == 1
