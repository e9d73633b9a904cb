"""Constant-curvature plane models, chart conversions and geodesic triangles.

Three charts are supported for the simply connected space form ``M_kappa``:

``klein``
    Geodesics are Euclidean straight lines.  Defined on the disk of radius
    ``|kappa|**-0.5`` for ``kappa < 0`` and on the whole plane otherwise
    (for ``kappa > 0`` the plane is the gnomonic image of the open hemisphere).
``poincare``
    Conformal chart ``rho(r) * g_euc`` with
    ``rho = (3|l| + 1) / (1 + l r^2)^2`` and ``l = kappa / (4 - 3|kappa|)``.
    Only defined for ``|kappa| < 4/3``.  For ``kappa > 0`` points are restricted
    to the hemisphere image ``r^2 < 1/l``.
``halfplane``
    Upper half-plane, only for ``kappa = -1``.

Bulk routines work on ``(..., 2)`` arrays; :class:`ChartPoint` wraps a single
point together with its chart for the public scalar API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    DegenerateGeodesic,
    DegenerateTriangle,
    DomainError,
    UnsupportedConversion,
)

KLEIN = "klein"
POINCARE = "poincare"
HALFPLANE = "halfplane"
CHARTS = (KLEIN, POINCARE, HALFPLANE)

KAPPA_LIMIT = 4.0 / 3.0
ANGLE_TOL = 1e-9
_DOMAIN_SLACK = 1e-12

ACUTE, RIGHT, OBTUSE = "Acute", "Right", "Obtuse"
NEUMANN, DIRICHLET = "N", "D"


def _normalize_chart(chart: str) -> str:
    c = str(chart).lower()
    aliases = {"poincaredisk": POINCARE, "poincare_disk": POINCARE, "half_plane": HALFPLANE}
    c = aliases.get(c, c)
    if c not in CHARTS:
        raise ValueError(f"unknown chart {chart!r}")
    return c


def check_kappa(kappa: float) -> float:
    """Validate a curvature value and return it as ``float``."""
    k = float(kappa)
    if not np.isfinite(k) or not (-KAPPA_LIMIT < k < KAPPA_LIMIT):
        raise DomainError(f"curvature {kappa} outside (-4/3, 4/3)")
    return k


def ell(kappa: float) -> float:
    """Curvature parameter of the rescaled Poincare chart."""
    k = check_kappa(kappa)
    return k / (4.0 - 3.0 * abs(k))


def _as_xy(p) -> np.ndarray:
    if isinstance(p, ChartPoint):
        return np.array([p.x, p.y], dtype=float)
    return np.asarray(p, dtype=float)


@dataclass(frozen=True)
class ChartPoint:
    chart: str
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "chart", _normalize_chart(self.chart))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y])


# ---------------------------------------------------------------------------
# domains


def chart_radius2(kappa: float, chart: str) -> float:
    """Squared Euclidean radius bounding the valid chart domain (inf if none)."""
    chart = _normalize_chart(chart)
    k = check_kappa(kappa)
    if chart == KLEIN:
        return 1.0 / abs(k) if k < 0 else np.inf
    if chart == POINCARE:
        l_ = ell(k)
        return 1.0 / abs(l_) if l_ != 0 else np.inf
    return np.inf


def in_domain(xy, chart: str, kappa: float) -> np.ndarray:
    """Boolean mask of points inside the valid chart domain."""
    chart = _normalize_chart(chart)
    xy = np.asarray(xy, dtype=float)
    if chart == HALFPLANE:
        if check_kappa(kappa) != -1.0:
            raise UnsupportedConversion("half-plane chart requires kappa = -1")
        return xy[..., 1] > 0
    r2 = np.sum(xy**2, axis=-1)
    return r2 < chart_radius2(kappa, chart) * (1 - _DOMAIN_SLACK)


def validate_points(xy, chart: str, kappa: float) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    if xy.shape[-1] != 2:
        raise ValueError("points must have trailing dimension 2")
    if not np.all(np.isfinite(xy)):
        raise DomainError("non-finite coordinates")
    if not np.all(in_domain(xy, chart, kappa)):
        raise DomainError(f"point outside the {chart} chart domain for kappa={kappa}")
    return xy


# ---------------------------------------------------------------------------
# metrics


def conformal_factor(kappa: float, p) -> np.ndarray | float:
    """Conformal factor ``rho`` of the Poincare chart at ``p``."""
    if isinstance(p, ChartPoint):
        if p.chart != POINCARE:
            raise DomainError("conformal_factor expects a Poincare chart point")
        xy = validate_points(p.xy, POINCARE, kappa)
        return float(_rho(kappa, xy))
    xy = validate_points(p, POINCARE, kappa)
    return _rho(kappa, xy)


def _rho(kappa: float, xy: np.ndarray) -> np.ndarray:
    l_ = ell(kappa)
    r2 = np.sum(np.asarray(xy) ** 2, axis=-1)
    return (3.0 * abs(l_) + 1.0) / (1.0 + l_ * r2) ** 2


def klein_metric(kappa: float, p) -> np.ndarray:
    """Cartesian components of the Klein metric, shape ``(..., 2, 2)``."""
    xy = validate_points(_as_xy(p), KLEIN, kappa)
    return _klein_metric(float(kappa), xy)


def _klein_metric(kappa: float, xy: np.ndarray) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    r2 = np.sum(xy**2, axis=-1)
    w = 1.0 + kappa * r2
    eye = np.eye(2)
    g = eye / w[..., None, None] - kappa * xy[..., :, None] * xy[..., None, :] / (w**2)[..., None, None]
    return g


def chart_metric(kappa: float, xy, chart: str) -> np.ndarray:
    chart = _normalize_chart(chart)
    xy = np.asarray(xy, dtype=float)
    if chart == KLEIN:
        return _klein_metric(float(kappa), xy)
    if chart == POINCARE:
        return _rho(kappa, xy)[..., None, None] * np.eye(2)
    if float(kappa) != -1.0:
        raise UnsupportedConversion("half-plane chart requires kappa = -1")
    return (1.0 / xy[..., 1] ** 2)[..., None, None] * np.eye(2)


def metric_angle(g: np.ndarray, u, v) -> np.ndarray:
    """Angle in ``[0, pi]`` between tangent vectors ``u``, ``v`` under metric ``g``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    dot = np.einsum("...i,...ij,...j->...", u, g, v)
    cross = np.abs(u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]) * np.sqrt(np.linalg.det(g))
    return np.arctan2(cross, dot)


# ---------------------------------------------------------------------------
# chart conversions (all radial between Klein and Poincare)


def klein_to_poincare(xy, kappa: float) -> np.ndarray:
    k = check_kappa(kappa)
    xy = np.asarray(xy, dtype=float)
    l_ = ell(k)
    c = math.sqrt(4.0 - 3.0 * abs(k))
    r = np.sqrt(np.sum(xy**2, axis=-1))
    a = 0.5 * c * r
    disc = 1.0 + 4.0 * a * a * l_
    if np.any(disc <= 0):
        raise DomainError("point outside the Klein chart domain")
    rp = 2.0 * a / (1.0 + np.sqrt(disc))
    # rp / r is smooth at r = 0 where it tends to c / 2
    ratio = np.where(r > 0, rp / np.where(r > 0, r, 1.0), 0.5 * c)
    return xy * ratio[..., None]


def poincare_to_klein(xy, kappa: float) -> np.ndarray:
    k = check_kappa(kappa)
    xy = np.asarray(xy, dtype=float)
    l_ = ell(k)
    c = math.sqrt(4.0 - 3.0 * abs(k))
    r2 = np.sum(xy**2, axis=-1)
    den = 1.0 - l_ * r2
    if np.any(den <= 0):
        raise DomainError("point outside the hemisphere image of the Poincare chart")
    return xy * (2.0 / (c * den))[..., None]


def poincare_to_klein_jacobian(xy, kappa: float) -> np.ndarray:
    """Jacobian ``d(klein)/d(poincare)`` at Poincare points, shape ``(..., 2, 2)``."""
    k = check_kappa(kappa)
    xy = np.asarray(xy, dtype=float)
    l_ = ell(k)
    c = math.sqrt(4.0 - 3.0 * abs(k))
    r2 = np.sum(xy**2, axis=-1)
    den = 1.0 - l_ * r2
    f_over_r = 2.0 / (c * den)
    # d/dr (f) - f/r, divided by r^2, multiplies x x^T
    extra = 4.0 * l_ / (c * den**2)
    return f_over_r[..., None, None] * np.eye(2) + extra[..., None, None] * xy[..., :, None] * xy[..., None, :]


def poincare_to_halfplane(xy) -> np.ndarray:
    z = _to_complex(xy)
    w = 1j * (1 + z) / (1 - z)
    return _from_complex(w)


def halfplane_to_poincare(xy) -> np.ndarray:
    w = _to_complex(xy)
    z = (w - 1j) / (w + 1j)
    return _from_complex(z)


def _to_complex(xy) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    return xy[..., 0] + 1j * xy[..., 1]


def _from_complex(z) -> np.ndarray:
    z = np.asarray(z)
    return np.stack([z.real, z.imag], axis=-1)


def to_klein(xy, chart: str, kappa: float) -> np.ndarray:
    chart = _normalize_chart(chart)
    if chart == KLEIN:
        return np.asarray(xy, dtype=float)
    if chart == POINCARE:
        return poincare_to_klein(xy, kappa)
    _require_halfplane(kappa)
    return poincare_to_klein(halfplane_to_poincare(xy), kappa)


def from_klein(xy, chart: str, kappa: float) -> np.ndarray:
    chart = _normalize_chart(chart)
    if chart == KLEIN:
        return np.asarray(xy, dtype=float)
    if chart == POINCARE:
        return klein_to_poincare(xy, kappa)
    _require_halfplane(kappa)
    return poincare_to_halfplane(klein_to_poincare(xy, kappa))


def convert(xy, source: str, target: str, kappa: float) -> np.ndarray:
    source = _normalize_chart(source)
    target = _normalize_chart(target)
    if HALFPLANE in (source, target):
        _require_halfplane(kappa)
    if source == target:
        return np.asarray(xy, dtype=float)
    if source == POINCARE and target == HALFPLANE:
        return poincare_to_halfplane(xy)
    if source == HALFPLANE and target == POINCARE:
        return halfplane_to_poincare(xy)
    return from_klein(to_klein(xy, source, kappa), target, kappa)


def _require_halfplane(kappa):
    if float(kappa) != -1.0:
        raise UnsupportedConversion("half-plane chart only exists for kappa = -1")


def chart_convert(p: ChartPoint, target: str, kappa: float) -> ChartPoint:
    """Image of ``p`` under the model isometry into the ``target`` chart."""
    target = _normalize_chart(target)
    xy = validate_points(p.xy, p.chart, kappa)
    out = convert(xy, p.chart, target, kappa)
    return ChartPoint(target, out[0], out[1])


# ---------------------------------------------------------------------------
# ambient (hyperboloid / sphere / affine) model


def _form(kappa: float) -> np.ndarray:
    return np.diag([np.sign(kappa) if kappa != 0 else 1.0, 1.0, 1.0])


def klein_homogeneous(xy) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    return np.concatenate([np.ones(xy.shape[:-1] + (1,)), xy], axis=-1)


def _scale(kappa: float) -> np.ndarray:
    s = math.sqrt(abs(kappa)) if kappa != 0 else 1.0
    return np.diag([1.0, s, s])


def klein_to_ambient(xy, kappa: float) -> np.ndarray:
    """Unit hyperboloid (``kappa < 0``) or sphere (``kappa > 0``) vectors."""
    k = float(kappa)
    h = klein_homogeneous(xy) @ _scale(k).T
    if k == 0:
        return h
    norm2 = 1.0 + k * np.sum(np.asarray(xy, dtype=float) ** 2, axis=-1)
    if np.any(norm2 <= 0):
        raise DomainError("point outside the Klein chart domain")
    return h / np.sqrt(norm2)[..., None]


def ambient_to_klein(v, kappa: float) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    s = math.sqrt(abs(kappa)) if kappa != 0 else 1.0
    if kappa > 0 and np.any(v[..., 0] <= 0):
        raise DomainError("point outside the hemisphere centred at the chart origin")
    return v[..., 1:] / (s * v[..., :1])


# ---------------------------------------------------------------------------
# distances


def _distance_klein(kappa: float, p, q) -> np.ndarray:
    k = float(kappa)
    if k == 0:
        return np.linalg.norm(np.asarray(p, float) - np.asarray(q, float), axis=-1)
    P = klein_to_ambient(p, k)
    Q = klein_to_ambient(q, k)
    d = P - Q
    s = math.sqrt(abs(k))
    if k < 0:
        n2 = -d[..., 0] ** 2 + d[..., 1] ** 2 + d[..., 2] ** 2
        return 2.0 * np.arcsinh(np.sqrt(np.maximum(n2, 0.0)) / 2.0) / s
    n = np.linalg.norm(d, axis=-1)
    return 2.0 * np.arcsin(np.minimum(n / 2.0, 1.0)) / s


def _distance_poincare(kappa: float, p, q) -> np.ndarray:
    k = float(kappa)
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    if k == 0:
        return np.linalg.norm(p - q, axis=-1)
    l_ = ell(k)
    s = math.sqrt(abs(l_))
    z = _to_complex(p) * s
    w = _to_complex(q) * s
    if k < 0:
        den = np.sqrt((1 - np.abs(z) ** 2) * (1 - np.abs(w) ** 2))
        return 2.0 * np.arcsinh(np.abs(z - w) / den) / math.sqrt(-k)
    return 2.0 * np.arctan2(np.abs(z - w), np.abs(1 + np.conj(z) * w)) / math.sqrt(k)


def _distance_halfplane(p, q) -> np.ndarray:
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    return 2.0 * np.arcsinh(np.linalg.norm(p - q, axis=-1) / (2.0 * np.sqrt(p[..., 1] * q[..., 1])))


def distance(kappa: float, p, q, chart: str = KLEIN) -> np.ndarray:
    """Vectorised geodesic distance between chart coordinates ``p`` and ``q``."""
    chart = _normalize_chart(chart)
    validate_points(p, chart, kappa)
    validate_points(q, chart, kappa)
    if chart == KLEIN:
        return _distance_klein(kappa, p, q)
    if chart == POINCARE:
        return _distance_poincare(kappa, p, q)
    return _distance_halfplane(p, q)


def geodesic_distance(kappa: float, p: ChartPoint, q: ChartPoint) -> float:
    if p.chart != q.chart:
        raise DomainError("points must be expressed in the same chart")
    return float(distance(kappa, p.xy, q.xy, p.chart))


def distance_to_geodesic(kappa: float, a, b, p) -> np.ndarray:
    """Distance from Klein points ``p`` to the full geodesic through Klein ``a``, ``b``."""
    k = float(kappa)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    p = np.asarray(p, float)
    if np.allclose(a, b, rtol=0, atol=1e-15):
        raise DegenerateGeodesic("geodesic endpoints coincide")
    if k == 0:
        d = b - a
        return np.abs(d[0] * (p[..., 1] - a[1]) - d[1] * (p[..., 0] - a[0])) / np.linalg.norm(d)
    A = klein_to_ambient(a, k)
    B = klein_to_ambient(b, k)
    G = _form(k)
    n = G @ np.cross(A, B)
    nn = n @ G @ n
    P = klein_to_ambient(p, k)
    val = np.abs(P @ G @ n) / math.sqrt(nn)
    s = math.sqrt(abs(k))
    if k < 0:
        return np.arcsinh(val) / s
    return np.arcsin(np.minimum(val, 1.0)) / s


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True)
class Isometry:
    """Isometry of ``M_kappa`` acting projectively on homogeneous Klein coordinates."""

    kappa: float
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def identity(cls, kappa: float) -> "Isometry":
        return cls(float(kappa), np.eye(3))

    @classmethod
    def from_ambient(cls, kappa: float, a: np.ndarray) -> "Isometry":
        S = _scale(kappa)
        return cls(float(kappa), np.linalg.solve(S, a @ S))

    @classmethod
    def rotation(cls, kappa: float, theta: float) -> "Isometry":
        c, s = math.cos(theta), math.sin(theta)
        return cls(float(kappa), np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=float))

    @classmethod
    def flip_y(cls, kappa: float) -> "Isometry":
        return cls(float(kappa), np.diag([1.0, 1.0, -1.0]))

    @classmethod
    def reflection(cls, kappa: float, a, b) -> "Isometry":
        """Reflection across the geodesic through Klein points ``a`` and ``b``."""
        k = float(kappa)
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        if np.linalg.norm(a - b) < 1e-15:
            raise DegenerateGeodesic("geodesic endpoints coincide")
        if k == 0:
            d = (b - a) / np.linalg.norm(b - a)
            R = 2 * np.outer(d, d) - np.eye(2)
            m = np.eye(3)
            m[1:, 1:] = R
            m[1:, 0] = a - R @ a
            return cls(k, m)
        S = _scale(k)
        A = S @ klein_homogeneous(a)
        B = S @ klein_homogeneous(b)
        G = _form(k)
        n = G @ np.cross(A, B)
        amb = np.eye(3) - 2.0 * np.outer(n, G @ n) / (n @ G @ n)
        return cls.from_ambient(k, amb)

    @classmethod
    def translation_to_origin(cls, kappa: float, c) -> "Isometry":
        """Orientation-preserving isometry sliding Klein point ``c`` to the origin."""
        k = float(kappa)
        c = np.asarray(c, float)
        if np.linalg.norm(c) == 0:
            return cls.identity(k)
        if k == 0:
            m = np.eye(3)
            m[1:, 0] = -c
            return cls(k, m)
        C = klein_to_ambient(c, k)
        e0 = np.array([1.0, 0.0, 0.0])
        G = _form(k)
        n = C - e0
        q = 1.0 + k * float(c @ c)
        n[0] = -k * float(c @ c) / (math.sqrt(q) * (1.0 + math.sqrt(q)))  # C[0] - 1 without cancellation
        first = np.eye(3) - 2.0 * np.outer(n, G @ n) / (n @ G @ n)
        # second reflection: line through the origin orthogonal to the direction of c
        d = np.array([-c[1], c[0]]) / np.linalg.norm(c)
        second = np.eye(3)
        second[1:, 1:] = 2 * np.outer(d, d) - np.eye(2)
        return cls.from_ambient(k, second @ first)

    def compose(self, other: "Isometry") -> "Isometry":
        """``self`` after ``other``."""
        return Isometry(self.kappa, self.matrix @ other.matrix)

    def inverse(self) -> "Isometry":
        return Isometry(self.kappa, np.linalg.inv(self.matrix))

    @property
    def orientation(self) -> int:
        if self.kappa > 0:
            # projective sign ambiguity: fix by the image of the origin lying in front
            m = self.matrix * np.sign(self.matrix[0, 0] if self.matrix[0, 0] != 0 else 1.0)
            return int(np.sign(np.linalg.det(m)))
        m = self.matrix * np.sign(self.matrix[0, 0])
        return int(np.sign(np.linalg.det(m)))

    def apply(self, xy) -> np.ndarray:
        """Apply to Klein coordinates."""
        h = klein_homogeneous(xy) @ self.matrix.T
        if self.kappa > 0:
            # the gnomonic chart identifies antipodes; detect images that left the hemisphere
            ref = self.matrix[0] @ np.array([1.0, 0.0, 0.0])
            sgn = np.sign(ref) if ref != 0 else 1.0
            if np.any(h[..., 0] * sgn <= 0):
                raise DomainError("isometry image leaves the hemisphere around the chart origin")
        return h[..., 1:] / h[..., :1]

    def apply_chart(self, xy, chart: str) -> np.ndarray:
        return from_klein(self.apply(to_klein(xy, chart, self.kappa)), chart, self.kappa)


def reflect_across_geodesic(kappa: float, geodesic: Sequence[ChartPoint], p: ChartPoint) -> ChartPoint:
    """Image of ``p`` under the reflection fixing the geodesic through two points."""
    a, b = geodesic
    chart = a.chart
    if b.chart != chart:
        raise DomainError("geodesic points must share a chart")
    if np.linalg.norm(a.xy - b.xy) == 0:
        raise DegenerateGeodesic("the two points coincide")
    validate_points(np.stack([a.xy, b.xy]), chart, kappa)
    ak = to_klein(a.xy, chart, kappa)
    bk = to_klein(b.xy, chart, kappa)
    pk = to_klein(validate_points(_as_xy(p), p.chart, kappa), p.chart, kappa)
    if float(kappa) > 0:
        # reflection of a hemisphere point may leave the hemisphere; work on the sphere
        S = _scale(kappa)
        iso = Isometry.reflection(kappa, ak, bk)
        amb = klein_to_ambient(pk, kappa)
        G = _form(kappa)
        A = klein_to_ambient(ak, kappa)
        B = klein_to_ambient(bk, kappa)
        n = G @ np.cross(A, B)
        img = amb - 2.0 * (amb @ G @ n) / (n @ G @ n) * n
        if img[0] <= 0:
            raise DomainError("reflected point leaves the hemisphere")
        del S, iso
        out = ambient_to_klein(img, kappa)
    else:
        out = Isometry.reflection(kappa, ak, bk).apply(pk)
    res = from_klein(out, p.chart, kappa)
    return ChartPoint(p.chart, res[0], res[1])


# ---------------------------------------------------------------------------
# triangles


def _parse_bc(bc) -> tuple:
    out = []
    for b in bc:
        s = str(b).upper()[:1]
        if s not in (NEUMANN, DIRICHLET):
            raise ValueError(f"boundary tag {b!r} not in {{N, D}}")
        out.append(s)
    if len(out) != 3:
        raise ValueError("exactly three edge tags are required")
    return tuple(out)


@dataclass(frozen=True)
class GeodesicTriangle:
    """Geodesic triangle with per-edge boundary tags; edge ``i`` is opposite vertex ``i``."""

    kappa: float
    vertices: np.ndarray
    chart: str = KLEIN
    bc: tuple = (NEUMANN, NEUMANN, NEUMANN)

    def __post_init__(self):
        k = check_kappa(self.kappa)
        chart = _normalize_chart(self.chart)
        verts = np.array(self.vertices, dtype=float).reshape(3, 2)
        validate_points(verts, chart, k)
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "bc", _parse_bc(self.bc))
        kv = to_klein(verts, chart, k)
        e1 = kv[1] - kv[0]
        e2 = kv[2] - kv[0]
        scale = max(np.linalg.norm(e1), np.linalg.norm(e2), 1e-300)
        if abs(e1[0] * e2[1] - e1[1] * e2[0]) <= 1e-12 * scale**2:
            raise DegenerateTriangle("vertices are collinear in the Klein chart")
        object.__setattr__(self, "_klein", kv)

    @property
    def klein_vertices(self) -> np.ndarray:
        return self._klein.copy()

    def vertices_in(self, chart: str) -> np.ndarray:
        return from_klein(self._klein, chart, self.kappa)

    def angles(self) -> np.ndarray:
        kv = self._klein
        out = np.empty(3)
        for i in range(3):
            p = kv[i]
            u = kv[(i + 1) % 3] - p
            v = kv[(i + 2) % 3] - p
            out[i] = metric_angle(_klein_metric(self.kappa, p), u, v)
        return out

    def sides(self) -> np.ndarray:
        kv = self._klein
        return np.array([
            float(_distance_klein(self.kappa, kv[(i + 1) % 3], kv[(i + 2) % 3])) for i in range(3)
        ])

    def area(self) -> float:
        return triangle_area(self)

    def classify(self) -> str:
        return classify_triangle(self)

    def with_bc(self, bc) -> "GeodesicTriangle":
        return GeodesicTriangle(self.kappa, self.vertices, self.chart, bc)

    def edge_vertices(self, i: int) -> tuple:
        """Indices of the two vertices bounding edge ``i``."""
        return ((i + 1) % 3, (i + 2) % 3)

    def to_spec(self) -> dict:
        return {
            "curvature": self.kappa,
            "chart": self.chart,
            "vertices": self.vertices.tolist(),
            "bc": list(self.bc),
        }

    @classmethod
    def from_spec(cls, spec: dict) -> "GeodesicTriangle":
        return cls(
            spec["curvature"], spec["vertices"], spec.get("chart", KLEIN),
            tuple(spec.get("bc", ("N", "N", "N"))),
        )


def triangle_angles_and_sides(t: GeodesicTriangle) -> tuple:
    """Return ``(alpha, beta, gamma, a, b, c)``."""
    ang = t.angles()
    if np.any(ang < 1e-9):
        raise DegenerateTriangle("a vertex angle vanishes")
    sides = t.sides()
    return tuple(float(x) for x in np.concatenate([ang, sides]))


def triangle_area(t: GeodesicTriangle) -> float:
    if t.kappa == 0:
        v = t.klein_vertices
        e1, e2 = v[1] - v[0], v[2] - v[0]
        return 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    ang = t.angles()
    if np.any(ang < 1e-9):
        raise DegenerateTriangle("a vertex angle vanishes")
    return float((np.sum(ang) - math.pi) / t.kappa)


def classify_triangle(t: GeodesicTriangle, tol: float = ANGLE_TOL) -> str:
    m = float(np.max(t.angles()))
    if abs(m - math.pi / 2) <= tol:
        return RIGHT
    return OBTUSE if m > math.pi / 2 + tol else ACUTE


def _law_of_cosines_sides(angles, kappa: float) -> np.ndarray:
    A = np.asarray(angles, float)
    s = math.sqrt(abs(kappa))
    sides = np.empty(3)
    for i in range(3):
        a, b, c = A[i], A[(i + 1) % 3], A[(i + 2) % 3]
        val = (math.cos(a) + math.cos(b) * math.cos(c)) / (math.sin(b) * math.sin(c))
        if kappa < 0:
            if val <= 1:
                raise DegenerateTriangle("angles do not define a hyperbolic triangle")
            sides[i] = math.acosh(val) / s
        else:
            if abs(val) >= 1:
                raise DegenerateTriangle("angles do not define a spherical triangle")
            sides[i] = math.acos(val) / s
    return sides


def triangle_from_angles(angles, kappa: float, bc=("N", "N", "N"), scale: float = 1.0,
                         center: str = "auto") -> GeodesicTriangle:
    """Build a Klein-chart triangle with the prescribed vertex angles.

    Vertex 0 is placed at the chart origin with edge ``0 -> 1`` along the
    positive x-axis (``center="vertex"``).  With ``center="centroid"`` the
    normalised ambient centroid is moved to the origin instead, which is needed
    for spherical triangles whose vertices are a quarter circle apart.  For
    ``kappa = 0`` angles only fix the shape; ``scale`` is the length of edge
    ``0 -> 1``.  ``center="auto"`` uses the vertex placement unless a spherical
    triangle would leave the hemisphere around vertex 0.
    """
    k = check_kappa(kappa)
    A = np.asarray(angles, float)
    if A.shape != (3,) or np.any(A <= 0):
        raise DegenerateTriangle("three positive angles are required")
    total = A.sum()
    if k == 0:
        if abs(total - math.pi) > 1e-9:
            raise DegenerateTriangle("Euclidean angles must sum to pi")
        c = scale
        b = c * math.sin(A[1]) / math.sin(A[2])
        verts = np.array([[0, 0], [c, 0], [b * math.cos(A[0]), b * math.sin(A[0])]])
        tri = GeodesicTriangle(0.0, verts, KLEIN, bc)
        if center == "centroid":
            iso = Isometry.translation_to_origin(0.0, verts.mean(axis=0))
            tri = GeodesicTriangle(0.0, iso.apply(verts), KLEIN, bc)
        return tri
    if (k < 0 and total >= math.pi) or (k > 0 and total <= math.pi):
        raise DegenerateTriangle("angle sum incompatible with the sign of the curvature")
    sides = _law_of_cosines_sides(A, k)
    s = math.sqrt(abs(k))
    b, c = sides[1], sides[2]
    if k < 0:
        ch, sh = math.cosh, math.sinh
    else:
        ch, sh = math.cos, math.sin
    V = np.array([
        [1.0, 0.0, 0.0],
        [ch(s * c), sh(s * c), 0.0],
        [ch(s * b), sh(s * b) * math.cos(A[0]), sh(s * b) * math.sin(A[0])],
    ])
    if center == "auto":
        center = "centroid" if (k > 0 and np.any(V[:, 0] <= 0.05)) else "vertex"
    if center == "centroid":
        G = _form(k)
        m = V.sum(axis=0)
        m = m / math.sqrt(abs(m @ G @ m))
        e0 = np.array([1.0, 0.0, 0.0])
        n = m - e0
        if np.linalg.norm(n) > 1e-15:
            refl = np.eye(3) - 2.0 * np.outer(n, G @ n) / (n @ G @ n)
            V = V @ refl.T
            V[:, 2] *= -1.0  # restore orientation
    if k > 0 and np.any(V[:, 0] <= 1e-12):
        raise DomainError("triangle does not fit the hemisphere around the chosen centre")
    verts = ambient_to_klein(V, k)
    return GeodesicTriangle(k, verts, KLEIN, bc)


def frame_isometry(t: GeodesicTriangle, anchor: int) -> Isometry:
    """Isometry placing vertex ``anchor`` at the origin, its next edge on +x, triangle above."""
    kv = t.klein_vertices
    iso = Isometry.translation_to_origin(t.kappa, kv[anchor])
    img = iso.apply(kv)
    nxt = img[(anchor + 1) % 3]
    rot = Isometry.rotation(t.kappa, -math.atan2(nxt[1], nxt[0]))
    iso = rot.compose(iso)
    img = iso.apply(kv)
    if img[(anchor + 2) % 3][1] < 0:
        iso = Isometry.flip_y(t.kappa).compose(iso)
    return iso


def centroid_isometry(t: GeodesicTriangle) -> Isometry:
    """Orientation-preserving isometry moving the ambient centroid to the origin."""
    k = t.kappa
    kv = t.klein_vertices
    if k == 0:
        return Isometry.translation_to_origin(0.0, kv.mean(axis=0))
    V = klein_to_ambient(kv, k)
    G = _form(k)
    m = V.sum(axis=0)
    m = m / math.sqrt(abs(m @ G @ m))
    return Isometry.translation_to_origin(k, ambient_to_klein(m, k))


def point_on_geodesic_klein(a, b, p, tol: float = 1e-9) -> bool:
    a, b, p = (np.asarray(x, float) for x in (a, b, p))
    d = b - a
    return abs(d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])) / np.linalg.norm(d) < tol


def sample_geodesic(kappa: float, a, b, n: int, chart: str = KLEIN) -> np.ndarray:
    """``n`` points on the geodesic segment between chart points ``a`` and ``b``."""
    ak = to_klein(np.asarray(a, float), chart, kappa)
    bk = to_klein(np.asarray(b, float), chart, kappa)
    s = np.linspace(0.0, 1.0, n)[:, None]
    return from_klein(ak + s * (bk - ak), chart, kappa)


def points_from_iterable(pts: Iterable) -> np.ndarray:
    return np.array([_as_xy(p) for p in pts], dtype=float)
