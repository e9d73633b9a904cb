"""Estimator-style facade: ``fit`` a triangle, ``predict`` eigenfunction values at points."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import analysis as an
from . import fem
from . import geometry as geo
from . import mesh as msh
from .exceptions import DomainError, ShapeMismatch


def check_vertices(X) -> np.ndarray:
    """Three finite chart points as a (3, 2) float array."""
    V = check_array(X, dtype=float, ensure_2d=True)
    if V.shape != (3, 2):
        raise ShapeMismatch(f"expected 3 vertices with 2 coordinates, got shape {V.shape}")
    return V


def check_points(X) -> np.ndarray:
    return check_array(X, dtype=float, ensure_2d=True, ensure_min_samples=1)


def check_bc(bc) -> tuple:
    try:
        return geo._parse_bc(bc)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


class TriangleSpectrum(BaseEstimator):
    """Low eigenpairs of the Laplace-Beltrami operator on one triangle.

    ``fit`` takes the vertex array in ``chart``; ``predict`` interpolates the
    selected mode (by default the principal one: the second Neumann mode, or
    the first mode when a Dirichlet edge is present) at chart points, giving
    NaN outside the triangle.
    """

    def __init__(self, kappa=0.0, chart="klein", bc=("N", "N", "N"), h=None, divisions=32, k=4,
                 mode=None, tol=1e-8):
        self.kappa = kappa
        self.chart = chart
        self.bc = bc
        self.h = h
        self.divisions = divisions
        self.k = k
        self.mode = mode
        self.tol = tol

    def fit(self, X, y=None):
        V = check_vertices(X)
        t = geo.GeodesicTriangle(self.kappa, V, self.chart, check_bc(self.bc))
        h = self.h
        if h is None:
            frame = msh.choose_frame(t)
            p = geo.klein_to_poincare(frame.apply(t.klein_vertices), t.kappa)
            sides = [np.linalg.norm(p[(i + 1) % 3] - p[(i + 2) % 3]) for i in range(3)]
            h = min(max(sides) / self.divisions, min(sides) / 4)
        self.triangle_ = t
        self.mesh_ = msh.generate(t, h)
        self.spectrum_ = fem.solve(self.mesh_, self.k, self.tol)
        self.eigenvalues_ = self.spectrum_.values
        pair = self.spectrum_.principal() if self.mode is None else self.spectrum_.pairs[int(self.mode)]
        self.pair_ = pair
        self.n_nodes_ = self.mesh_.n_nodes
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "pair_")
        P = check_points(X)
        frame_pts = self.mesh_.from_original(P, self.triangle_.chart)
        return an.interpolate(self.mesh_, self.pair_.vector, np.asarray(frame_pts, float).reshape(-1, 2))

    def critical_points(self, tol_rel=1e-3) -> an.CriticalReport:
        check_is_fitted(self, "pair_")
        return an.detect_critical_points(self.pair_, self.mesh_, tol_rel=tol_rel)

    def nodal_set(self) -> an.NodalSet:
        check_is_fitted(self, "pair_")
        return an.extract_nodal_set(self.pair_, self.mesh_)
