import numpy as np
import pytest

from curvspec import continuation as ct
from curvspec import fem
from curvspec import geometry as geo
from curvspec import mesh as msh
from curvspec.exceptions import DomainError

TRI = [[0.0, 0.0], [0.5, 0.0], [-0.2, 0.4]]


@pytest.fixture(scope="module")
def forward():
    return ct.sweep(TRI, (0.0, -1.0), steps=10)


def test_no_crossings_and_zero_count(forward):
    assert forward.n_steps >= 11
    assert forward.crossings(1) == []
    table = ct.track_critical_points(forward)
    assert table.identically_zero
    assert table.events == []


def test_overlaps_near_one(forward):
    assert forward.overlaps.min() >= ct.OVERLAP_MIN
    assert forward.overlaps.max() <= 1 + 1e-9


def test_branch_order_matches_direct_solve(forward):
    # the reused node set at the last step equals a fresh solve on the same mesh
    kappa = forward.kappa[-1]
    t0 = geo.GeodesicTriangle(0.0, TRI, geo.KLEIN)
    base = msh.generate(t0, forward.h, frame=geo.Isometry.identity(0.0))
    m = base.with_kappa(kappa)
    direct = fem.solve(m, 4).values
    np.testing.assert_allclose(forward.sorted_values()[-1], direct, rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(forward.values[-1], direct, rtol=1e-8, atol=1e-10)


def test_mu2_decreases_with_curvature(forward):
    mu2 = forward.branch(1)
    assert mu2[0] > mu2[-1]
    assert forward.values[:, 0].max() < 1e-8


def test_reverse_sweep_symmetry(forward):
    back = ct.sweep(TRI, (-1.0, 0.0), steps=10, track=False)
    np.testing.assert_allclose(back.values[::-1], forward.values, rtol=1e-9, atol=1e-9)


def test_constant_path_is_flat():
    b = ct.sweep(TRI, (-0.5, -0.5), steps=4, track=False)
    assert np.ptp(b.values, axis=0).max() < 1e-10


def test_step_halving():
    assert ct.step_halving_discrepancy(TRI, (0.0, -1.0), steps=3) < 1e-9


def test_csv_columns(forward):
    lines = forward.to_csv().strip().split("\n")
    assert lines[0] == "t,kappa,branch,value,overlap,crit_count"
    assert len(lines) == 1 + 4 * forward.n_steps
    row = lines[1 + 4 * 0 + 1].split(",")
    assert row[2] == "1" and row[5] == "0"


def test_events_json(forward):
    ev = ct.events_json(forward, ct.track_critical_points(forward))
    assert set(ev) == {"crossings", "overlap_dips", "critical_count_changes"}


def test_path_leaving_chart_raises():
    with pytest.raises(DomainError):
        ct.sweep([[0, 0], [0.9, 0], [0, 0.9]], (0.0, -2.0), steps=2)
