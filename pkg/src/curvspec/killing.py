"""Loxodromic and elliptic Killing fields of ``M_kappa``.

Fields are stored as conjugation data: an axis (two points) or a centre,
kept in Klein coordinates.  Evaluation happens in the Poincare chart, where
with ``l = ell(kappa)`` and ``phi_p(z) = (z - p) / (1 + l conj(p) z)``

* the canonical translation along the real axis is ``1 + l z^2``;
* the rotation about ``a`` is ``i (z - a)(1 + l conj(a) z) / (1 + l |a|^2)``.

A general loxodromic field is the canonical one pulled back by
``F = exp(-i theta) phi_p`` which sends the axis onto the real line.  At
``kappa = 0`` the formulas reduce to the unit translation and the planar
rotation, which is the flat limit used by curvature sweeps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import geometry as geo
from .exceptions import DegenerateGeodesic, DomainError, PointNotOnGeodesic, UnsupportedKind

LOXODROMIC = "loxodromic"
ELLIPTIC = "elliptic"
ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class KillingField:
    kind: str
    kappa: float
    points: np.ndarray  # Klein coordinates: (2, 2) axis or (1, 2) centre
    orientation: int = 1

    def __post_init__(self):
        kind = str(self.kind).lower()
        if kind not in (LOXODROMIC, ELLIPTIC):
            raise UnsupportedKind(f"unsupported Killing field kind {self.kind!r}")
        k = geo.check_kappa(self.kappa)
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        if kind == LOXODROMIC:
            if pts.shape[0] != 2:
                raise ValueError("a loxodromic field needs two axis points")
            if np.linalg.norm(pts[0] - pts[1]) < 1e-14:
                raise DegenerateGeodesic("axis points coincide")
        elif pts.shape[0] != 1:
            raise ValueError("an elliptic field needs one centre")
        geo.validate_points(pts, geo.KLEIN, k)
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "points", pts)

    # -- constructors -----------------------------------------------------
    @classmethod
    def loxodromic(cls, kappa: float, axis: Sequence, orientation: int = 1, chart: str = geo.KLEIN):
        pts = np.array([geo._as_xy(a) for a in axis], dtype=float)
        ch = axis[0].chart if isinstance(axis[0], geo.ChartPoint) else chart
        return cls(LOXODROMIC, kappa, geo.to_klein(geo.validate_points(pts, ch, kappa), ch, kappa), orientation)

    @classmethod
    def elliptic(cls, kappa: float, center, orientation: int = 1, chart: str = geo.KLEIN):
        c = geo._as_xy(center)
        ch = center.chart if isinstance(center, geo.ChartPoint) else chart
        return cls(ELLIPTIC, kappa, geo.to_klein(geo.validate_points(c[None], ch, kappa), ch, kappa), orientation)

    @classmethod
    def from_spec(cls, spec: dict, kappa: float):
        chart = spec.get("chart", geo.KLEIN)
        orient = int(spec.get("orientation", 1))
        kind = str(spec.get("kind", "")).lower()
        if kind == LOXODROMIC:
            return cls.loxodromic(kappa, [np.asarray(a, float) for a in spec["axis"]], orient, chart)
        if kind == ELLIPTIC:
            return cls.elliptic(kappa, np.asarray(spec["center"], float), orient, chart)
        raise UnsupportedKind(f"unsupported Killing field kind {kind!r}")

    def to_spec(self) -> dict:
        out = {"kind": self.kind, "chart": geo.KLEIN, "orientation": self.orientation}
        if self.kind == LOXODROMIC:
            out["axis"] = self.points.tolist()
        else:
            out["center"] = self.points[0].tolist()
        return out

    # -- transformations --------------------------------------------------
    def flipped(self) -> "KillingField":
        return KillingField(self.kind, self.kappa, self.points, -self.orientation)

    def transformed(self, iso: geo.Isometry) -> "KillingField":
        """Push the field forward by an isometry given on Klein coordinates."""
        pts = iso.apply(self.points)
        orient = self.orientation
        if self.kind == ELLIPTIC and iso.orientation < 0:
            orient = -orient
        return KillingField(self.kind, self.kappa, pts, orient)

    def with_kappa(self, kappa: float) -> "KillingField":
        return KillingField(self.kind, kappa, self.points, self.orientation)

    # -- evaluation -------------------------------------------------------
    def poincare_values(self, xy) -> np.ndarray:
        """Field components in the Poincare chart at Poincare points ``xy``."""
        xy = np.asarray(xy, dtype=float)
        z = xy[..., 0] + 1j * xy[..., 1]
        l_ = geo.ell(self.kappa)
        anchors = geo.klein_to_poincare(self.points, self.kappa)
        if self.kind == ELLIPTIC:
            a = anchors[0, 0] + 1j * anchors[0, 1]
            w = 1j * (z - a) * (1 + l_ * np.conj(a) * z) / (1 + l_ * abs(a) ** 2)
        else:
            p = anchors[0, 0] + 1j * anchors[0, 1]
            q = anchors[1, 0] + 1j * anchors[1, 1]
            rot = np.exp(-1j * np.angle((q - p) / (1 + l_ * np.conj(p) * q)))
            denom = 1 + l_ * np.conj(p) * z
            F = rot * (z - p) / denom
            dF = rot * (1 + l_ * abs(p) ** 2) / denom**2
            w = (1 + l_ * F**2) / dF / math.sqrt(3 * abs(l_) + 1)
        w = self.orientation * w
        return np.stack([w.real, w.imag], axis=-1)

    def values(self, xy, chart: str = geo.POINCARE) -> np.ndarray:
        """Field components in ``chart`` at points given in that chart."""
        chart = geo._normalize_chart(chart)
        xy = np.asarray(xy, dtype=float)
        if chart == geo.POINCARE:
            return self.poincare_values(xy)
        if chart == geo.KLEIN:
            pp = geo.klein_to_poincare(xy, self.kappa)
            v = self.poincare_values(pp)
            J = geo.poincare_to_klein_jacobian(pp, self.kappa)
            return np.einsum("...ij,...j->...i", J, v)
        geo._require_halfplane(self.kappa)
        zp = geo.halfplane_to_poincare(xy)
        v = self.poincare_values(zp)
        z = zp[..., 0] + 1j * zp[..., 1]
        w = (v[..., 0] + 1j * v[..., 1]) * 2j / (1 - z) ** 2
        return np.stack([w.real, w.imag], axis=-1)

    def __call__(self, xy, chart: str = geo.POINCARE) -> np.ndarray:
        return self.values(xy, chart)


def evaluate(X: KillingField, p: geo.ChartPoint) -> np.ndarray:
    """Value of ``X`` at ``p`` in the components of ``p``'s chart."""
    xy = geo.validate_points(p.xy, p.chart, X.kappa)
    return X.values(xy, p.chart)


def angle_with_geodesic(X: KillingField, geodesic: Sequence[geo.ChartPoint], p: geo.ChartPoint) -> float:
    """Metric angle in ``[0, pi]`` between ``X(p)`` and the geodesic through ``p``.

    A vanishing field value is reported as orthogonal, since its inner product
    with every tangent vector is zero.
    """
    a, b = geodesic
    k = X.kappa
    ak = geo.to_klein(a.xy, a.chart, k)
    bk = geo.to_klein(b.xy, b.chart, k)
    pk = geo.to_klein(geo.validate_points(p.xy, p.chart, k), p.chart, k)
    if np.linalg.norm(ak - bk) < 1e-15:
        raise DegenerateGeodesic("geodesic points coincide")
    if not geo.point_on_geodesic_klein(ak, bk, pk, 1e-9):
        raise PointNotOnGeodesic("point is not on the geodesic")
    v = X.values(pk, geo.KLEIN)
    if np.linalg.norm(v) < 1e-300:
        return math.pi / 2
    g = geo._klein_metric(k, pk)
    return float(geo.metric_angle(g, v, bk - ak))


def is_orthogonal(angle: float, tol: float = ORTHO_TOL) -> bool:
    return abs(angle - math.pi / 2) < tol


def killing_residual(X, p: geo.ChartPoint, h: float = 1e-4, kappa: float | None = None) -> float:
    """Frobenius norm of a central-difference estimate of ``L_X g`` at ``p``.

    ``X`` may be a :class:`KillingField` or any callable mapping chart points
    (shape ``(..., 2)``) to chart components; in the latter case ``kappa`` must
    be given.
    """
    if not (0 < h <= 1e-3):
        raise ValueError("step must lie in (0, 1e-3]")
    k = X.kappa if isinstance(X, KillingField) else kappa
    if k is None:
        raise ValueError("kappa is required for a plain callable field")
    chart = p.chart
    x0 = geo.validate_points(p.xy, chart, k)

    def field(pts):
        if isinstance(X, KillingField):
            return X.values(pts, chart)
        return np.asarray(X(pts), dtype=float)

    offs = np.array([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    pts = x0 + offs
    geo.validate_points(pts, chart, k)
    gs = geo.chart_metric(k, np.vstack([x0[None], pts]), chart)
    Xs = field(np.vstack([x0[None], pts]))
    g0 = gs[0]
    dg = np.stack([(gs[1] - gs[2]) / (2 * h), (gs[3] - gs[4]) / (2 * h)])  # dg[k] = d_k g
    dX = np.stack([(Xs[1] - Xs[2]) / (2 * h), (Xs[3] - Xs[4]) / (2 * h)])  # dX[i, k] = d_i X^k
    X0 = Xs[0]
    lie = np.einsum("k,kij->ij", X0, dg) + np.einsum("kj,ik->ij", g0, dX) + np.einsum("ik,jk->ij", g0, dX)
    return float(np.linalg.norm(lie))


def flow(X: KillingField, xy, t: float, chart: str = geo.POINCARE, steps: int = 16) -> np.ndarray:
    """Integrate the field for time ``t`` with classical RK4."""
    y = np.asarray(xy, dtype=float).copy()
    dt = t / steps
    for _ in range(steps):
        k1 = X.values(y, chart)
        k2 = X.values(y + 0.5 * dt * k1, chart)
        k3 = X.values(y + 0.5 * dt * k2, chart)
        k4 = X.values(y + dt * k3, chart)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def perpendicular_axis(kappa: float, a, b, p) -> np.ndarray:
    """Two Klein points spanning the geodesic through ``p`` orthogonal to line ``ab``.

    If ``p`` lies on the line the perpendicular at ``p`` is returned.  The first
    point is the foot of the perpendicular, the second is ``p`` (or a nearby
    point along the normal when ``p`` is the foot).
    """
    a, b, p = (np.asarray(x, dtype=float) for x in (a, b, p))
    if kappa == 0:
        d = (b - a) / np.linalg.norm(b - a)
        foot = a + d * np.dot(p - a, d)
        if np.linalg.norm(p - foot) < 1e-12:
            return np.array([foot, foot + 0.1 * np.array([-d[1], d[0]])])
        return np.array([foot, p])
    G = geo._form(kappa)
    A = geo.klein_to_ambient(a, kappa)
    B = geo.klein_to_ambient(b, kappa)
    P = geo.klein_to_ambient(p, kappa)
    n = G @ np.cross(A, B)
    # foot of the perpendicular: remove the normal component of P and renormalise
    F = P - (P @ G @ n) / (n @ G @ n) * n
    F = F / math.sqrt(abs(F @ G @ F))
    if F[0] < 0:
        F = -F
    foot = geo.ambient_to_klein(F, kappa)
    if np.linalg.norm(p - foot) > 1e-12:
        return np.array([foot, p])
    # p on the line: second point along the normal direction n
    Q = F + 0.05 * n / math.sqrt(abs(n @ G @ n))
    return np.array([foot, Q[1:] / (math.sqrt(abs(kappa)) * Q[0])])


def as_callable(X) -> Callable:
    if isinstance(X, KillingField):
        return X.values
    return X


def require_supported(kind: str) -> None:
    if str(kind).lower() not in (LOXODROMIC, ELLIPTIC):
        raise UnsupportedKind(f"unsupported Killing field kind {kind!r}")


__all__ = [
    "KillingField", "evaluate", "angle_with_geodesic", "killing_residual", "flow",
    "perpendicular_axis", "is_orthogonal", "LOXODROMIC", "ELLIPTIC", "DomainError",
]
