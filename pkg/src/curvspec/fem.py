"""P1 finite elements for the Laplace-Beltrami eigenproblem in the Poincare chart.

The Dirichlet energy is conformally invariant in two dimensions, so the
stiffness matrix is the flat P1 one; only the mass matrix sees the conformal
factor ``rho``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import geometry as geo
from .exceptions import AssemblyError, InsufficientPairs, NoConvergence, ShapeMismatch, ZeroVector
from .mesh import TriangleMesh

V0_SEED = 20240917

# degree-2 edge-midpoint rule and degree-5 seven-point rule (barycentric, weights sum to 1)
_Q3 = (np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]), np.full(3, 1.0 / 3.0))
_a1, _b1 = 0.059715871789770, 0.470142064105115
_a2, _b2 = 0.797426985353087, 0.101286507323456
_Q7 = (
    np.array([
        [1 / 3, 1 / 3, 1 / 3],
        [_a1, _b1, _b1], [_b1, _a1, _b1], [_b1, _b1, _a1],
        [_a2, _b2, _b2], [_b2, _a2, _b2], [_b2, _b2, _a2],
    ]),
    np.array([0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3),
)


def _element_data(m: TriangleMesh):
    p = m.nodes[m.elements]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(np.abs(det) <= 1e-300) or not np.all(np.isfinite(det)):
        raise AssemblyError("singular element Jacobian")
    return p, det


def _scatter(m: TriangleMesh, local: np.ndarray) -> sp.csr_matrix:
    el = m.elements
    rows = np.repeat(el, 3, axis=1).ravel()
    cols = np.tile(el, (1, 3)).ravel()
    n = m.n_nodes
    A = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    A.sum_duplicates()
    A.sort_indices()
    return A


def p1_gradients(m: TriangleMesh):
    """Per-element gradients of the three hat functions, shape ``(ne, 3, 2)``, and areas."""
    p, det = _element_data(m)
    # gradient of barycentric lambda_i = perp(opposite edge) / det
    g = np.empty((len(p), 3, 2))
    for i in range(3):
        a = p[:, (i + 1) % 3]
        b = p[:, (i + 2) % 3]
        g[:, i, 0] = (a[:, 1] - b[:, 1]) / det
        g[:, i, 1] = (b[:, 0] - a[:, 0]) / det
    return g, 0.5 * det


def assemble_stiffness(m: TriangleMesh) -> sp.csr_matrix:
    g, area = p1_gradients(m)
    local = np.einsum("eik,ejk->eij", g, g) * area[:, None, None]
    return _scatter(m, local)


def needs_fine_rule(m: TriangleMesh, kappa: float) -> np.ndarray:
    """Elements where the conformal factor varies strongly."""
    l_ = abs(geo.ell(kappa))
    r2 = np.sum(m.nodes[m.elements] ** 2, axis=2).max(axis=1)
    return l_ * r2 > 0.5


def assemble_mass(m: TriangleMesh, kappa: float | None = None) -> sp.csr_matrix:
    kappa = m.kappa if kappa is None else kappa
    p, det = _element_data(m)
    area = 0.5 * det
    fine = needs_fine_rule(m, kappa)
    local = np.zeros((len(p), 3, 3))
    for rule, mask in ((_Q3, ~fine), (_Q7, fine)):
        if not np.any(mask):
            continue
        lam, w = rule
        pts = np.einsum("qi,eik->eqk", lam, p[mask])
        rho = geo._rho(kappa, pts)  # (e, q)
        local[mask] = np.einsum("eq,q,qi,qj->eij", rho, w, lam, lam) * area[mask, None, None]
    return _scatter(m, local)


@dataclass(eq=False)
class DiscreteProblem:
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    dirichlet_dofs: np.ndarray
    mesh: TriangleMesh
    kappa: float
    bc: tuple

    @property
    def n_dofs(self) -> int:
        return self.stiffness.shape[0]

    @property
    def free_dofs(self) -> np.ndarray:
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.dirichlet_dofs] = False
        return np.flatnonzero(mask)

    @property
    def is_neumann(self) -> bool:
        return len(self.dirichlet_dofs) == 0

    def reduced(self):
        f = self.free_dofs
        return self.stiffness[f][:, f].tocsc(), self.mass[f][:, f].tocsc()


def dirichlet_nodes(m: TriangleMesh, bc) -> np.ndarray:
    bc = geo._parse_bc(bc)
    mask = m.node_edge_mask()
    d = np.zeros(m.n_nodes, dtype=bool)
    for e in range(3):
        if bc[e] == geo.DIRICHLET:
            d |= mask[:, e]
    return np.flatnonzero(d)


def assemble(m: TriangleMesh, kappa: float | None = None, bc=None) -> DiscreteProblem:
    kappa = m.kappa if kappa is None else geo.check_kappa(kappa)
    bc = m.bc if bc is None else geo._parse_bc(bc)
    K = assemble_stiffness(m)
    M = assemble_mass(m, kappa)
    return DiscreteProblem(K, M, dirichlet_nodes(m, bc), m, kappa, bc)


# ---------------------------------------------------------------------------
# eigenpairs


@dataclass(eq=False)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float
    index: int


@dataclass(eq=False)
class Spectrum:
    pairs: list
    bc: tuple
    kappa: float
    mesh: TriangleMesh = field(repr=False)
    tol: float = 1e-8

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.pairs])

    @property
    def vectors(self) -> np.ndarray:
        return np.column_stack([p.vector for p in self.pairs])

    @property
    def is_neumann(self) -> bool:
        return all(b == geo.NEUMANN for b in self.bc)

    def principal(self) -> EigenPair:
        """``u_2`` for pure Neumann problems, ``u_1`` otherwise."""
        return self.pairs[1] if self.is_neumann else self.pairs[0]

    def to_csv(self) -> str:
        return spectrum_csv(self)


def fix_sign(v: np.ndarray) -> np.ndarray:
    """Largest-magnitude entry positive; the lowest index wins ties."""
    a = np.abs(v)
    i = int(np.flatnonzero(a == a.max())[0])
    return -v if v[i] < 0 else v


def _lumped(M: sp.spmatrix) -> np.ndarray:
    return np.asarray(M.sum(axis=1)).ravel()


def residual_norm(K, M, lam: float, v: np.ndarray, lumped: np.ndarray | None = None) -> float:
    r = K @ v - lam * (M @ v)
    lumped = _lumped(M) if lumped is None else lumped
    return float(math.sqrt(np.sum(r * r / lumped)))


def weyl_estimate(area: float, j: int) -> float:
    return 4.0 * math.pi * j / area


def solve_smallest(p: DiscreteProblem, k: int, tol: float = 1e-8, max_iter: int | None = None,
                   shift: float | None = None) -> Spectrum:
    """The ``k`` smallest eigenpairs of ``K v = lambda M v`` on the free dofs.

    Pure Neumann problems use a small negative shift so the factorisation is
    definite; the constant mode then comes out first and is replaced by the
    exact M-normalised constant with value 0.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    Kf, Mf = p.reduced()
    n = Kf.shape[0]
    if k >= n - 1:
        raise ValueError("too many eigenpairs requested for this mesh")
    area = float(Mf.sum()) if p.is_neumann else float(p.mass.sum())
    if shift is None:
        shift = -0.05 * weyl_estimate(area, 1) if p.is_neumann else 0.0
    v0 = np.random.default_rng(V0_SEED).standard_normal(n)
    ncv = min(n - 1, max(2 * k + 1, k + 20))
    try:
        vals, vecs = spla.eigsh(Kf, k=k, M=Mf, sigma=shift, which="LM", v0=v0, ncv=ncv,
                                tol=0.0, maxiter=max_iter)
    except spla.ArpackNoConvergence as exc:
        raise NoConvergence(
            f"eigensolver did not converge: {exc}", max_iterations=max_iter,
            values=np.asarray(exc.eigenvalues), vectors=np.asarray(exc.eigenvectors),
        ) from exc
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    lumped = _lumped(Mf)
    if p.is_neumann:
        c = np.ones(n) / math.sqrt(float(np.ones(n) @ (Mf @ np.ones(n))))
        vals[0] = 0.0
        vecs[:, 0] = c
        # keep the rest M-orthogonal to the exact constant
        for j in range(1, k):
            v = vecs[:, j] - (c @ (Mf @ vecs[:, j])) * c
            vecs[:, j] = v
    pairs = []
    free = p.free_dofs
    residuals = []
    for j in range(k):
        v = vecs[:, j]
        v = v / math.sqrt(float(v @ (Mf @ v)))
        v = fix_sign(v)
        lam = float(v @ (Kf @ v)) if not (p.is_neumann and j == 0) else 0.0
        res = residual_norm(Kf, Mf, lam, v, lumped)
        residuals.append(res)
        full = np.zeros(p.n_dofs)
        full[free] = v
        pairs.append(EigenPair(lam, full, res, j))
    bad = [r > tol * (1 + pr.value) for r, pr in zip(residuals, pairs)]
    if any(bad):
        raise NoConvergence(
            "eigenpair residuals above tolerance", max_iterations=max_iter,
            values=np.array([q.value for q in pairs]), vectors=np.column_stack([q.vector for q in pairs]),
            residuals=np.array(residuals),
        )
    return Spectrum(pairs, p.bc, p.kappa, p.mesh, tol)


def solve(m: TriangleMesh, k: int = 4, tol: float = 1e-8, bc=None) -> Spectrum:
    return solve_smallest(assemble(m, bc=bc), k, tol)


def rayleigh_quotient(p: DiscreteProblem, v) -> float:
    v = np.asarray(v, dtype=float)
    if v.shape != (p.n_dofs,):
        raise ShapeMismatch("vector length does not match the number of dofs")
    if len(p.dirichlet_dofs) and np.any(v[p.dirichlet_dofs] != 0):
        raise ValueError("vector must vanish on Dirichlet dofs")
    den = float(v @ (p.mass @ v))
    if den <= 0 or not np.any(v):
        raise ZeroVector("Rayleigh quotient of the zero vector")
    return float(v @ (p.stiffness @ v)) / den


def rayleigh_quotient_complex(p: DiscreteProblem, v_re, v_im) -> float:
    """Quotient of the Hermitian forms for ``v_re + i v_im`` via the real 2x2 block embedding."""
    a = np.asarray(v_re, float)
    b = np.asarray(v_im, float)
    if a.shape != (p.n_dofs,) or b.shape != (p.n_dofs,):
        raise ShapeMismatch("vector length does not match the number of dofs")
    K, M = p.stiffness, p.mass
    den = float(a @ (M @ a) + b @ (M @ b))
    if den <= 0:
        raise ZeroVector("Rayleigh quotient of the zero vector")
    return float(a @ (K @ a) + b @ (K @ b)) / den


def eigen_gap(s: Spectrum) -> float:
    vals = s.values
    if s.is_neumann:
        if len(vals) < 3:
            raise InsufficientPairs("a Neumann gap needs at least three pairs")
        return float((vals[2] - vals[1]) / vals[1])
    if len(vals) < 2:
        raise InsufficientPairs("a mixed gap needs at least two pairs")
    return float((vals[1] - vals[0]) / vals[0])


def richardson_error(coarse: float, fine: float, order: float = 2.0) -> float:
    """Error estimate of the fine value from two levels with mesh ratio 2."""
    return abs(coarse - fine) / (2.0**order - 1.0)


def observed_order(errors) -> np.ndarray:
    e = np.asarray(errors, float)
    return np.log2(e[:-1] / e[1:])


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def spectrum_csv(s: Spectrum) -> str:
    buf = io.StringIO()
    buf.write("index,value,residual\n")
    for pr in s.pairs:
        buf.write(f"{pr.index},{fmt(pr.value)},{fmt(pr.residual)}\n")
    return buf.getvalue()
