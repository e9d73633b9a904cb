import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from curvspec.estimator import TriangleSpectrum, check_bc, check_vertices

TRI = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@pytest.fixture(scope="module")
def fitted():
    return TriangleSpectrum(divisions=24).fit(TRI)


def test_params_roundtrip():
    est = TriangleSpectrum(kappa=-1.0, bc=("D", "N", "N"), k=3)
    p = est.get_params()
    assert p["kappa"] == -1.0 and p["k"] == 3
    c = clone(est)
    assert c.get_params() == p
    est.set_params(k=5)
    assert est.k == 5


def test_predict_matches_closed_form(fitted):
    pts = np.array([[0.2, 0.1], [0.1, 0.6], [0.3, 0.3]])
    u = fitted.predict(pts)
    ref = np.cos(math.pi * pts[:, 0]) - np.cos(math.pi * pts[:, 1])
    # fix the sign and scale with a least-squares fit
    scale = ref @ u / (u @ u)
    np.testing.assert_allclose(scale * u, ref, atol=0.03)
    assert fitted.eigenvalues_[1] == pytest.approx(math.pi ** 2, rel=1e-2)


def test_nan_outside(fitted):
    u = fitted.predict([[0.8, 0.8], [-0.1, 0.2]])
    assert np.isnan(u).all()


def test_not_fitted():
    with pytest.raises(NotFittedError):
        TriangleSpectrum().predict([[0.1, 0.1]])


def test_critical_points_and_nodal(fitted):
    assert fitted.critical_points().total == 0
    assert fitted.nodal_set().topology == "SimpleArc"


def test_validation_helpers():
    with pytest.raises(ValueError):
        check_vertices([[0, 0], [1, 0]])
    with pytest.raises(ValueError):
        check_vertices([[0, 0], [1, np.nan], [0, 1]])
    assert check_bc(["Neumann", "D", "N"]) == ("N", "D", "N")
