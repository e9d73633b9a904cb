import math

import numpy as np
import pytest

from curvspec import fem
from curvspec import geometry as geo
from curvspec import mesh as msh
from curvspec.exceptions import InsufficientPairs, NoConvergence, ShapeMismatch


@pytest.fixture(scope="module")
def ri_mesh(right_isosceles):
    return msh.generate(right_isosceles, 0.025)


@pytest.fixture(scope="module")
def ri_spectrum(ri_mesh):
    return fem.solve(ri_mesh, 4)


def p1_mass_reference(m):
    n = m.n_nodes
    M = np.zeros((n, n))
    local = (np.ones((3, 3)) + np.eye(3)) / 12
    for el, a in zip(m.elements, m.element_areas()):
        M[np.ix_(el, el)] += a * local
    return M


def test_flat_mass_is_classical_p1(right_isosceles):
    m = msh.generate(right_isosceles, 0.2)
    np.testing.assert_allclose(fem.assemble_mass(m).toarray(), p1_mass_reference(m), atol=1e-15)


def test_stiffness_is_curvature_independent(obtuse_hyperbolic):
    m = msh.generate(obtuse_hyperbolic, 0.05)
    K0 = fem.assemble(m, 0.0).stiffness
    K1 = fem.assemble(m, -1.0).stiffness
    assert abs(K0 - K1).max() < 1e-12
    M0 = fem.assemble(m, 0.0).mass
    M1 = fem.assemble(m, -1.0).mass
    assert abs(M0 - M1).max() > 1e-6


def test_fine_rule_switch(obtuse_hyperbolic):
    m = msh.generate(obtuse_hyperbolic, 0.05)
    assert not fem.needs_fine_rule(m, 0.0).any()
    far = geo.GeodesicTriangle(-1.0, [[0.5, 0.5], [0.9, 0.3], [0.6, 0.75]])
    mf = msh.generate(far, 0.02, frame=geo.Isometry.identity(-1.0))
    assert fem.needs_fine_rule(mf, -1.0).any()


def test_right_isosceles_neumann_spectrum(ri_spectrum):
    v = ri_spectrum.values
    assert v[0] == 0.0
    assert v[1] == pytest.approx(math.pi ** 2, rel=1e-3)
    assert v[2] == pytest.approx(2 * math.pi ** 2, rel=2e-3)
    assert fem.eigen_gap(ri_spectrum) == pytest.approx(1.0, abs=2e-3)


def test_mixed_first_eigenvalue_two_pi_squared():
    t = geo.GeodesicTriangle(0.0, [[0, 0], [1, 0], [1, 1]], bc=("D", "N", "D"))
    s = fem.solve(msh.generate(t, 0.02), 2)
    assert s.values[0] == pytest.approx(2 * math.pi ** 2, rel=2e-3)
    assert fem.eigen_gap(s) > 0
    assert np.all(s.pairs[0].vector >= -1e-12)


def test_rayleigh_quotient(ri_mesh, ri_spectrum):
    p = fem.assemble(ri_mesh)
    for pr in ri_spectrum.pairs:
        assert fem.rayleigh_quotient(p, pr.vector) == pytest.approx(pr.value, abs=1e-7 * (1 + pr.value))
    assert fem.rayleigh_quotient(p, np.ones(ri_mesh.n_nodes)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ShapeMismatch):
        fem.rayleigh_quotient(p, np.ones(3))


def test_sign_convention_and_normalisation(ri_mesh, ri_spectrum):
    M = fem.assemble(ri_mesh).mass
    for pr in ri_spectrum.pairs:
        v = pr.vector
        i = int(np.argmax(np.abs(v)))
        assert v[i] > 0
        assert float(v @ (M @ v)) == pytest.approx(1.0)


def test_eigen_gap_needs_two_pairs(right_isosceles):
    t = right_isosceles.with_bc(("D", "D", "D"))
    s = fem.solve(msh.generate(t, 0.1), 1)
    with pytest.raises(InsufficientPairs):
        fem.eigen_gap(s)


def test_unreachable_tolerance_raises(right_isosceles):
    m = msh.generate(right_isosceles, 0.1)
    with pytest.raises(NoConvergence) as info:
        fem.solve_smallest(fem.assemble(m), 3, tol=1e-300)
    assert info.value.values is not None


def test_second_order_convergence(right_isosceles):
    m = msh.generate(right_isosceles, 0.05)
    err = []
    for _ in range(3):
        err.append(abs(fem.solve(m, 3).values[1] - math.pi ** 2))
        m = msh.refine(m)
    ratios = np.array(err[:-1]) / np.array(err[1:])
    assert np.all((ratios >= 3.2) & (ratios <= 4.8))


def test_richardson_and_order():
    assert fem.richardson_error(1.04, 1.01) == pytest.approx(0.01)
    np.testing.assert_allclose(fem.observed_order([1.0, 0.25, 0.0625]), [2.0, 2.0])


def test_csv_format(ri_spectrum):
    lines = ri_spectrum.to_csv().splitlines()
    assert lines[0] == "index,value,residual"
    assert len(lines) == 5
    assert float(lines[2].split(",")[1]) == ri_spectrum.values[1]


def test_w_test_function_quotient():
    mu = 0.3
    s = 0.5 + 0.5j * math.sqrt(4 * mu - 1)
    t = geo.GeodesicTriangle(-1.0, [[0, 1], [0, 2.5], [0.8, 1.6]], chart=geo.HALFPLANE)
    m = msh.generate(t, 0.02)
    err = []
    for _ in range(2):
        y = m.to_original(m.nodes, geo.HALFPLANE)[:, 1]
        w = y ** s
        q = fem.rayleigh_quotient_complex(fem.assemble(m), w.real, w.imag)
        err.append(abs(q - mu))
        m = msh.refine(m)
    assert err[1] < 1e-4 and err[0] / err[1] >= 3
