"""Nonconforming Morley discretization of the bending Neumann problem.

Each element carries a full quadratic; degrees of freedom are deflections
at vertices and normal slopes at edge midpoints (along a fixed global
normal per edge, so no orientation bookkeeping).  The element Hessian is
constant, which makes the energy a weighted sum of per-element Voigt
products and keeps clipped integrals exact.

The pure Neumann problem is singular on affine deflections; solves pin
that kernel with three integral constraints through a saddle system.  For
compatible data the multipliers vanish identically, so their size doubles
as a compatibility indicator.

Boundary loads are integrated along the true curved boundary arcs with
the element polynomial extended outward; combined with the curved-segment
area corrections in the mesh this reproduces global quadratics exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .backend import kernels
from .domains import DiscRegion, EmptyRegion, UnionRegion
from .errors import IncompatibleLoad, SolveFailure

_GAUSS8 = np.polynomial.legendre.leggauss(8)


@dataclass
class ElementBasis:
    """Per-element polynomial data produced by the kernel backend."""
    coeff: np.ndarray     # (nt, 6, 6) monomial coefficients per local dof
    cent: np.ndarray      # (nt, 2) local origins
    scale: np.ndarray     # (nt,) local length scales
    areas: np.ndarray     # (nt,) straight areas
    dofs: np.ndarray      # (nt, 6) global dof indices
    B: np.ndarray = field(default=None)   # (nt, 3, 6) Voigt Hessian operator
    n_dofs: int = 0

    def monomials(self, t, pts):
        pts = np.atleast_2d(pts)
        u = (pts[:, 0] - self.cent[t, 0]) / self.scale[t]
        v = (pts[:, 1] - self.cent[t, 1]) / self.scale[t]
        return np.column_stack([np.ones_like(u), u, v, u * u, u * v, v * v])

    def eval_value(self, t, pts):
        """Values of the six local basis functions at pts: (n, 6)."""
        return self.monomials(t, pts) @ self.coeff[t]

    def eval_grad(self, t, pts):
        """Gradients of the six local basis functions at pts: (n, 2, 6)."""
        pts = np.atleast_2d(pts)
        ell = self.scale[t]
        u = (pts[:, 0] - self.cent[t, 0]) / ell
        v = (pts[:, 1] - self.cent[t, 1]) / ell
        n = len(pts)
        dm = np.zeros((n, 2, 6))
        dm[:, 0, 1] = 1.0 / ell
        dm[:, 0, 3] = 2.0 * u / ell
        dm[:, 0, 4] = v / ell
        dm[:, 1, 2] = 1.0 / ell
        dm[:, 1, 4] = u / ell
        dm[:, 1, 5] = 2.0 * v / ell
        return dm @ self.coeff[t]


def element_tensors(mesh, plate, incl_plate=None, incl_region=None):
    """Per-element Voigt plate tensors and the inclusion member mask.

    Tensors are averaged over the three chord midpoints of each element
    (exact for constant and affine coefficient variation).  Elements whose
    centroid lies in ``incl_region`` take the inclusion tensor throughout,
    so the discrete inclusion is exactly a union of elements.
    """
    nt = mesh.n_tris
    mids = mesh.edge_mids[mesh.tri_edges]          # (nt, 3, 2)
    flat = mids.reshape(-1, 2)

    def averaged(p):
        if p.base.is_constant():
            Q = p.voigt(np.zeros(2))
            return np.broadcast_to(Q, (nt, 3, 3)).copy()
        return p.voigt_many(flat).reshape(nt, 3, 3, 3).mean(axis=1)

    qbar = averaged(plate)
    member = None
    if incl_region is not None and incl_plate is not None \
            and not isinstance(incl_region, EmptyRegion):
        member = np.asarray(incl_region.contains(mesh.centroids))
        if member.any():
            qin = averaged(incl_plate)
            qbar[member] = qin[member]
    return qbar, member


def build_basis(mesh):
    """Run the kernel element setup and attach global dof numbering."""
    coeff, cent, scale, areas = kernels.morley_element_setup(
        np.ascontiguousarray(mesh.points),
        np.ascontiguousarray(mesh.tris),
        np.ascontiguousarray(mesh.tri_edges),
        np.ascontiguousarray(mesh.edge_normals),
        np.ascontiguousarray(mesh.edge_mids))
    dofs = np.concatenate(
        [mesh.tris, mesh.n_points + mesh.tri_edges], axis=1).astype(np.int64)
    return ElementBasis(coeff=coeff, cent=cent, scale=scale, areas=areas,
                        dofs=dofs, n_dofs=mesh.n_points + mesh.n_edges)


def assemble(mesh, qbar, basis=None):
    """Stiffness matrix from per-element plate tensors (csr, N x N)."""
    if basis is None:
        basis = build_basis(mesh)
    K, B = kernels.element_stiffness(
        basis.coeff, basis.scale,
        np.ascontiguousarray(mesh.eff_areas), np.ascontiguousarray(qbar))
    basis.B = B
    rows = np.repeat(basis.dofs, 6, axis=1).ravel()
    cols = np.tile(basis.dofs, (1, 6)).ravel()
    A = sp.coo_matrix((K.ravel(), (rows, cols)),
                      shape=(basis.n_dofs, basis.n_dofs)).tocsr()
    return A, basis


def constraint_matrix(mesh, basis):
    """Three functionals pinning the affine kernel: broken integrals of
    the deflection and of both slope components."""
    nt = mesh.n_tris
    rows = np.zeros((nt, 3, 6))
    for t in range(nt):
        mids = mesh.edge_mids[mesh.tri_edges[t]]
        vals = basis.eval_value(t, mids)              # (3, 6)
        grad = basis.eval_grad(t, [mesh.centroids[t]])  # (1, 2, 6)
        a = basis.areas[t]
        rows[t, 0] = a / 3.0 * vals.sum(axis=0)
        rows[t, 1] = a * grad[0, 0]
        rows[t, 2] = a * grad[0, 1]
    r = np.repeat(np.arange(3)[None, :], nt, axis=0)[:, :, None]
    r = np.broadcast_to(r, (nt, 3, 6)).ravel()
    c = np.broadcast_to(basis.dofs[:, None, :], (nt, 3, 6)).ravel()
    return sp.coo_matrix((rows.ravel(), (r, c)),
                         shape=(3, basis.n_dofs)).tocsr()


def load_vector(mesh, basis, couple):
    """Assemble ell(v) over the true boundary arcs with Gauss-8 panels.

    Each boundary edge's arc span is split at the couple field's
    breakpoints; normals and tangents are evaluated on the exact curve
    and the adjacent element polynomial is extended to it.
    """
    curve = mesh.domain.curve
    L = curve.length
    xg, wg = _GAUSS8
    ell = np.zeros(basis.n_dofs)
    breaks = couple.breakpoints()
    for k in range(len(mesh.boundary_edges)):
        sa, sb = mesh.boundary_span[k]
        t = mesh.boundary_tri[k]
        cuts = [sa, sb]
        for b in breaks:
            bb = sa + ((b - sa) % L)
            if sa < bb < sb:
                cuts.append(bb)
        cuts = np.unique(cuts)
        contrib = np.zeros(6)
        for a, b in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (a + b)
            half = 0.5 * (b - a)
            ss = mid + half * xg
            x = np.atleast_2d(curve.point(ss))
            tau = np.atleast_2d(curve.tangent(ss))
            nrm = np.atleast_2d(curve.normal(ss))
            mn, mt = couple.values(ss)
            G = basis.eval_grad(t, x)                  # (8, 2, 6)
            dtau = np.einsum("gki,gk->gi", G, tau)
            dnrm = np.einsum("gki,gk->gi", G, nrm)
            contrib += half * np.einsum(
                "g,gi->i", wg * mt, dtau) - half * np.einsum(
                "g,gi->i", wg * mn, dnrm)
        ell[basis.dofs[t]] += contrib
    return ell


def solve_normalized(A, Bc, ell, residual_tol=1e-8, compat_tol=1e-6):
    """Solve the constrained saddle system; returns (w, lam, info).

    info carries the linear residual and the normalized multiplier size
    ``compat_metric`` = |Bc^T lam| / |ell|.  A large metric means the load
    does not annihilate the affine kernel and raises IncompatibleLoad.
    """
    n = A.shape[0]
    diag = A.diagonal()
    alpha = float(np.abs(diag).mean())
    if alpha == 0.0 or not np.isfinite(alpha):
        raise SolveFailure("stiffness matrix has vanishing diagonal")
    Bs = Bc * alpha
    K = sp.bmat([[A, Bs.T], [Bs, None]], format="csc")
    rhs = np.concatenate([ell, np.zeros(Bc.shape[0])])
    try:
        x = spsolve(K, rhs)
    except Exception as exc:
        raise SolveFailure("sparse solve failed: %s" % exc) from exc
    if not np.all(np.isfinite(x)):
        raise SolveFailure("sparse solve returned non-finite values")
    w = x[:n]
    mu = x[n:]
    lam = alpha * mu
    resid = K @ x - rhs
    scale = max(float(np.linalg.norm(ell)), float(np.linalg.norm(A @ w)), 1e-300)
    rel_resid = float(np.linalg.norm(resid)) / scale
    if rel_resid > residual_tol:
        raise SolveFailure("linear residual %.3e exceeds %.3e"
                           % (rel_resid, residual_tol))
    lam_push = float(np.linalg.norm(Bc.T @ lam))
    compat_metric = lam_push / max(float(np.linalg.norm(ell)), 1e-300)
    if np.linalg.norm(ell) == 0.0:
        compat_metric = 0.0
    info = {"residual": rel_resid, "compat_metric": compat_metric,
            "constraint_residual": float(np.linalg.norm(Bc @ w))}
    if compat_metric > compat_tol:
        raise IncompatibleLoad(
            "multiplier pushback %.3e of load norm indicates incompatible data"
            % compat_metric)
    return w, lam, info


@dataclass
class DiscreteSolution:
    """A solved plate problem with its mesh, data, and derived fields."""
    mesh: object
    basis: ElementBasis
    qbar: np.ndarray
    member: np.ndarray        # inclusion element mask or None
    w: np.ndarray
    ell: np.ndarray
    A: object
    multipliers: np.ndarray
    info: dict
    _hess: np.ndarray = field(default=None)

    def work(self):
        """Boundary work of the data against the solution."""
        return float(self.ell @ self.w)

    def energy(self):
        """Bending energy w^T A w; equals work up to solver roundoff."""
        return float(self.w @ (self.A @ self.w))

    def work_energy_gap(self):
        wv, ev = self.work(), self.energy()
        return abs(wv - ev) / max(abs(wv), abs(ev), 1e-300)

    def hessians(self):
        """Per-element Voigt Hessians (h11, h22, sqrt2 h12), shape (nt, 3)."""
        if self._hess is None:
            wloc = self.w[self.basis.dofs]            # (nt, 6)
            self._hess = np.einsum("tak,tk->ta", self.basis.B, wloc)
        return self._hess

    def hess_sq(self):
        """Squared Frobenius norm of the Hessian per element."""
        h = self.hessians()
        return (h * h).sum(axis=1)

    def moments(self):
        """Per-element Voigt moment tensors Q H."""
        return np.einsum("tab,tb->ta", self.qbar, self.hessians())

    # -- clipped integrals ------------------------------------------------

    def hessian_integral(self, region=None, elements=None):
        """Integral of |Hessian|^2 over a region, the element set, or all.

        ``elements`` (a boolean mask) integrates over exactly those
        elements with curved corrections included; a Region clips straight
        triangles against it (discs exactly, polygons via shapely).
        """
        hsq = self.hess_sq()
        if elements is not None:
            return float((self.mesh.eff_areas * hsq)[elements].sum())
        if region is None:
            return float((self.mesh.eff_areas * hsq).sum())
        return float(self._region_weights(region) @ hsq)

    def _region_weights(self, region):
        mesh = self.mesh
        if isinstance(region, DiscRegion):
            return kernels.tri_disc_areas(
                np.ascontiguousarray(mesh.points),
                np.ascontiguousarray(mesh.tris),
                float(region.center[0]), float(region.center[1]),
                float(region.radius))
        if isinstance(region, UnionRegion):
            w = np.zeros(mesh.n_tris)
            for part in region.parts:
                w += self._region_weights(part)
            return w
        if isinstance(region, EmptyRegion):
            return np.zeros(mesh.n_tris)
        import shapely
        import shapely.geometry as sgeom
        shape = region.to_shapely()
        tree = shapely.STRtree([sgeom.Polygon(p) for p in
                                mesh.points[mesh.tris]])
        w = np.zeros(mesh.n_tris)
        for idx in tree.query(shape):
            w[idx] = tree.geometries[idx].intersection(shape).area
        return w

    def hessian_sup(self, region=None, elements=None, area_tol=1e-12):
        """Max element Hessian norm over a region or element set."""
        hn = np.sqrt(self.hess_sq())
        if elements is not None:
            return float(hn[elements].max()) if elements.any() else 0.0
        if region is None:
            return float(hn.max())
        w = self._region_weights(region)
        live = w > area_tol * np.maximum(self.mesh.areas, 1e-300)
        return float(hn[live].max()) if live.any() else 0.0

    def disc_integrals(self, centers, r):
        """Hessian-square mass in discs of radius r at many centers."""
        return kernels.disc_integrals(
            np.ascontiguousarray(self.mesh.points),
            np.ascontiguousarray(self.mesh.tris),
            np.ascontiguousarray(self.hess_sq()),
            np.ascontiguousarray(np.atleast_2d(centers).astype(float)),
            float(r))


def solve(mesh, plate, couple_field, incl_plate=None, incl_region=None,
          basis=None, compat_tol=1e-6):
    """Assemble and solve; returns a DiscreteSolution.

    ``incl_plate``/``incl_region`` replace the tensor on elements whose
    centroid falls in the region.  The load must annihilate affine
    deflections; the saddle multipliers confirm it a posteriori.
    """
    qbar, member = element_tensors(mesh, plate, incl_plate, incl_region)
    A, basis = assemble(mesh, qbar, basis=basis)
    ell = load_vector(mesh, basis, couple_field)
    Bc = constraint_matrix(mesh, basis)
    w, lam, info = solve_normalized(A, Bc, ell, compat_tol=compat_tol)
    return DiscreteSolution(mesh=mesh, basis=basis, qbar=qbar, member=member,
                            w=w, ell=ell, A=A, multipliers=lam, info=info)
