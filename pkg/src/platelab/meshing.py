"""Triangle meshing of plate domains.

Force-relaxation mesher in the spirit of distmesh: boundary nodes are
placed by arclength and held fixed, interior nodes start on a thinned
hexagonal lattice and relax under repulsive bar forces with repeated
Delaunay retriangulation.  Meshes are deterministic for a given seed.

Boundary fidelity: every boundary vertex lies exactly on the domain
curve and carries its arclength; each boundary edge stores its arc span
and the signed area between chord and true arc.  Element "effective
areas" include those corrections, so integrals of element polynomials
extend over the true curved domain.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from .errors import MeshFailure

_GAUSS16 = np.polynomial.legendre.leggauss(16)


@dataclass
class Mesh:
    domain: object
    points: np.ndarray          # (np, 2)
    tris: np.ndarray            # (nt, 3) int32, ccw
    vertex_s: np.ndarray        # (np,) arclength of boundary vertices, NaN inside
    edges: np.ndarray = field(default=None)        # (ne, 2) int32, v0 < v1
    tri_edges: np.ndarray = field(default=None)    # (nt, 3), edge j opposite vertex j
    edge_normals: np.ndarray = field(default=None) # (ne, 2) global unit normals
    edge_mids: np.ndarray = field(default=None)    # (ne, 2) chord midpoints
    boundary_edges: np.ndarray = field(default=None)   # (nb,) edge indices
    boundary_tri: np.ndarray = field(default=None)     # (nb,) adjacent triangle
    boundary_span: np.ndarray = field(default=None)    # (nb, 2) (s_a, s_a + ds)
    seg_areas: np.ndarray = field(default=None)        # (nb,) chord-to-arc area
    areas: np.ndarray = field(default=None)        # straight triangle areas
    eff_areas: np.ndarray = field(default=None)     # areas + boundary corrections
    centroids: np.ndarray = field(default=None)
    min_angle: float = 0.0
    h_max: float = 0.0

    @property
    def n_points(self):
        return len(self.points)

    @property
    def n_tris(self):
        return len(self.tris)

    @property
    def n_edges(self):
        return len(self.edges)

    def total_area(self):
        return float(self.eff_areas.sum())


def _min_angle_deg(points, tris):
    P = points[tris]
    ang = np.empty((len(tris), 3))
    for k in range(3):
        a = P[:, (k + 1) % 3] - P[:, k]
        b = P[:, (k + 2) % 3] - P[:, k]
        na = np.linalg.norm(a, axis=1)
        nb = np.linalg.norm(b, axis=1)
        cosv = np.clip((a * b).sum(axis=1) / (na * nb), -1.0, 1.0)
        ang[:, k] = np.degrees(np.arccos(cosv))
    return float(ang.min()) if len(tris) else 0.0


def _orient_ccw(points, tris):
    P = points[tris]
    det = ((P[:, 1, 0] - P[:, 0, 0]) * (P[:, 2, 1] - P[:, 0, 1])
           - (P[:, 2, 0] - P[:, 0, 0]) * (P[:, 1, 1] - P[:, 0, 1]))
    flip = det < 0
    tris = tris.copy()
    tris[flip, 1], tris[flip, 2] = tris[flip, 2], tris[flip, 1].copy()
    return tris


def _chord_arc_area(curve, sa, sb):
    # signed area between the chord A->B and the boundary arc, by the
    # shoelace line integral along the arc plus the closing chord term
    xg, wg = _GAUSS16
    mid = 0.5 * (sa + sb)
    half = 0.5 * (sb - sa)
    ss = mid + half * xg
    p = curve.point(ss)
    t = curve.tangent(ss)
    cross = p[:, 0] * t[:, 1] - p[:, 1] * t[:, 0]
    arc_term = 0.5 * (cross * wg).sum() * half
    A = curve.point(sa)
    B = curve.point(sb)
    chord_term = 0.5 * (B[0] * A[1] - B[1] * A[0])
    return arc_term + chord_term


def _build(domain, points, tris, vertex_s, min_angle_req):
    """Assemble connectivity, boundary spans, and area corrections."""
    tris = _orient_ccw(points, np.asarray(tris, dtype=np.int32))
    nt = len(tris)
    # edge table: edge j of a triangle is opposite its local vertex j
    raw = np.concatenate([tris[:, [1, 2]], tris[:, [2, 0]], tris[:, [0, 1]]])
    raw_sorted = np.sort(raw, axis=1)
    edges, inverse, counts = np.unique(
        raw_sorted, axis=0, return_inverse=True, return_counts=True)
    tri_edges = inverse.reshape(3, nt).T.astype(np.int32)
    ev = points[edges[:, 1]] - points[edges[:, 0]]
    elen = np.linalg.norm(ev, axis=1)
    edge_normals = np.column_stack([ev[:, 1], -ev[:, 0]]) / elen[:, None]
    edge_mids = 0.5 * (points[edges[:, 0]] + points[edges[:, 1]])

    P = points[tris]
    areas = 0.5 * ((P[:, 1, 0] - P[:, 0, 0]) * (P[:, 2, 1] - P[:, 0, 1])
                   - (P[:, 2, 0] - P[:, 0, 0]) * (P[:, 1, 1] - P[:, 0, 1]))
    centroids = P.mean(axis=1)
    eff = areas.copy()

    L = domain.curve.length
    b_idx = np.flatnonzero(counts == 1).astype(np.int32)
    b_tri = np.empty(len(b_idx), dtype=np.int32)
    spans = np.empty((len(b_idx), 2))
    seg = np.empty(len(b_idx))
    edge_owner = {}
    for t in range(nt):
        for j in range(3):
            e = tri_edges[t, j]
            if counts[e] == 1:
                edge_owner[e] = t
    for k, e in enumerate(b_idx):
        v0, v1 = edges[e]
        s0 = vertex_s[v0]
        s1 = vertex_s[v1]
        if not (np.isfinite(s0) and np.isfinite(s1)):
            raise MeshFailure("boundary edge with interior endpoint; the "
                              "triangulation lost the boundary polyline")
        fwd = (s1 - s0) % L
        if fwd <= L - fwd:
            sa, ds = s0, fwd
        else:
            sa, ds = s1, L - fwd
        spans[k] = (sa, sa + ds)
        seg[k] = _chord_arc_area(domain.curve, sa, sa + ds)
        t = edge_owner[e]
        b_tri[k] = t
        eff[t] += seg[k]

    covered = spans[:, 1] - spans[:, 0]
    if len(b_idx) and abs(covered.sum() - L) > 1e-9 * L:
        raise MeshFailure("boundary edge spans cover %.12g of perimeter %.12g"
                          % (covered.sum(), L))

    mesh = Mesh(
        domain=domain, points=points, tris=tris, vertex_s=vertex_s,
        edges=edges, tri_edges=tri_edges, edge_normals=edge_normals,
        edge_mids=edge_mids, boundary_edges=b_idx, boundary_tri=b_tri,
        boundary_span=spans, seg_areas=seg, areas=areas, eff_areas=eff,
        centroids=centroids,
        min_angle=_min_angle_deg(points, tris),
        h_max=float(elen.max()) if len(elen) else 0.0)
    if mesh.min_angle < min_angle_req:
        raise MeshFailure("mesh min angle %.2f below required %.2f"
                          % (mesh.min_angle, min_angle_req))
    return mesh


def generate_mesh(dom, target_h, refine_region=None, refine_h=None,
                  seed=0, min_angle=20.0, max_iter=60):
    """Mesh a plate domain with target edge length ``target_h``.

    ``refine_region`` with ``refine_h`` grades the size down near that
    region's boundary (for resolving an inclusion interface).  Raises
    MeshFailure when the required minimum angle cannot be reached.
    """
    if target_h <= 0:
        raise ValueError("target_h must be positive")
    if refine_region is not None and (refine_h is None or refine_h <= 0
                                      or refine_h > target_h):
        raise ValueError("refine_h must be in (0, target_h]")

    def size_h(pts):
        h = np.full(len(pts), target_h)
        if refine_region is not None:
            d = refine_region.boundary_distance(pts)
            h = np.minimum(h, refine_h + 0.35 * d)
        return h

    curve = dom.curve
    L = curve.length

    # boundary nodes: per curvature-breakpoint piece, spacing <= local size
    breaks = np.sort(np.mod(curve.breakpoints(), L))
    if len(breaks) == 0:
        breaks = np.array([0.0])
    s_nodes = []
    for i in range(len(breaks)):
        sa = breaks[i]
        sb = breaks[(i + 1) % len(breaks)]
        plen = (sb - sa) % L
        if plen == 0.0:
            plen = L
        hb = float(size_h(np.atleast_2d(curve.point(sa + 0.5 * plen)))[0])
        n = max(1, int(math.ceil(plen / hb)))
        s_nodes.append(sa + plen * np.arange(n) / n)
    s_nodes = np.unique(np.concatenate(s_nodes) % L)
    bpts = np.atleast_2d(curve.point(s_nodes))

    last_err = None
    for attempt in range(3):
        rng = np.random.default_rng(seed + 1000 * attempt)
        try:
            pts, vs = _relax(dom, bpts, s_nodes, size_h, target_h, rng,
                             max_iter, attempt,
                             pitch=refine_h if refine_region is not None else None)
            tri = Delaunay(pts)
            keep = _interior_tris(dom, pts, tri.simplices, target_h)
            mesh = _build(dom, pts, tri.simplices[keep], vs, min_angle)
            return mesh
        except MeshFailure as err:
            last_err = err
    raise MeshFailure("mesh generation failed after 3 attempts: %s" % last_err)


def _interior_tris(dom, pts, simplices, h):
    cent = pts[simplices].mean(axis=1)
    return dom.signed_distance(cent) < -1e-3 * h


def _relax(dom, bpts, s_nodes, size_h, target_h, rng, max_iter, attempt,
           pitch=None):
    lo, hi = dom.bbox()
    pitch = target_h if pitch is None else pitch
    dx = pitch
    dy = pitch * math.sqrt(3.0) / 2.0
    xs = np.arange(lo[0] - dx, hi[0] + 2 * dx, dx)
    ys = np.arange(lo[1] - dy, hi[1] + 2 * dy, dy)
    X, Y = np.meshgrid(xs, ys)
    X[1::2] += dx / 2.0 + attempt * 0.13 * dx
    seeds = np.column_stack([X.ravel(), Y.ravel()])

    h_seed = size_h(seeds)
    keep = dom.signed_distance(seeds) < -0.55 * h_seed
    seeds = seeds[keep]
    h_seed = h_seed[keep]
    # graded thinning: keep with probability (h_min/h)^2
    prob = (h_seed.min() / h_seed) ** 2
    seeds = seeds[rng.random(len(seeds)) < prob]
    if len(seeds):
        tree = cKDTree(bpts)
        d, _ = tree.query(seeds)
        seeds = seeds[d > 0.7 * size_h(seeds)]

    nb = len(bpts)
    pts = np.vstack([bpts, seeds])
    n = len(pts)
    if n < nb + 1 and dom.area > 3 * target_h ** 2:
        # domain large but no interior points survived: lattice too coarse
        raise MeshFailure("no interior seed points for target_h %.3g" % target_h)

    for it in range(max_iter):
        tri = Delaunay(pts)
        keep = _interior_tris(dom, pts, tri.simplices, target_h)
        simp = tri.simplices[keep]
        bars = np.unique(np.sort(np.concatenate(
            [simp[:, [0, 1]], simp[:, [1, 2]], simp[:, [2, 0]]]), axis=1), axis=0)
        vec = pts[bars[:, 0]] - pts[bars[:, 1]]
        blen = np.linalg.norm(vec, axis=1)
        hbar = size_h(0.5 * (pts[bars[:, 0]] + pts[bars[:, 1]]))
        l0 = hbar * 1.2 * math.sqrt((blen ** 2).sum() / (hbar ** 2).sum())
        fmag = np.maximum(l0 - blen, 0.0) / np.maximum(blen, 1e-300)
        fvec = fmag[:, None] * vec
        force = np.zeros_like(pts)
        np.add.at(force, bars[:, 0], fvec)
        np.add.at(force, bars[:, 1], -fvec)
        force[:nb] = 0.0
        move = 0.2 * force
        pts = pts + move

        # pull escaped or boundary-hugging interior points back inside
        inner = pts[nb:]
        if len(inner):
            hloc = size_h(inner)
            sd = dom.signed_distance(inner)
            bad = sd > -0.25 * hloc
            if bad.any():
                eps = 1e-6 * target_h
                grad = np.empty((bad.sum(), 2))
                pb = inner[bad]
                for k in range(2):
                    e = np.zeros(2)
                    e[k] = eps
                    grad[:, k] = (dom.signed_distance(pb + e)
                                  - dom.signed_distance(pb - e)) / (2 * eps)
                grad /= np.maximum(np.linalg.norm(grad, axis=1), 1e-12)[:, None]
                depth = sd[bad] + 0.45 * hloc[bad]
                inner[bad] = pb - grad * depth[:, None]
                pts[nb:] = inner
        maxmove = np.abs(move[nb:]).max() if n > nb else 0.0
        if maxmove < 1e-3 * target_h:
            break

    vs = np.full(len(pts), np.nan)
    vs[:nb] = s_nodes
    return pts, vs


def refine(mesh):
    """Uniform midpoint refinement keeping boundary midpoints on the curve.

    Interior edges split at the chord midpoint; boundary edges split at
    the true curve point of the middle arclength, so curved geometry is
    preserved under refinement.
    """
    dom = mesh.domain
    L = dom.curve.length
    npts = mesh.n_points
    ne = mesh.n_edges
    mid_pts = mesh.edge_mids.copy()
    mid_s = np.full(ne, np.nan)
    for k, e in enumerate(mesh.boundary_edges):
        sa, sb = mesh.boundary_span[k]
        sm = 0.5 * (sa + sb)
        mid_pts[e] = dom.curve.point(sm)
        mid_s[e] = sm % L
    points = np.vstack([mesh.points, mid_pts])
    vertex_s = np.concatenate([mesh.vertex_s, mid_s])

    tris = np.empty((4 * mesh.n_tris, 3), dtype=np.int32)
    for t in range(mesh.n_tris):
        v0, v1, v2 = mesh.tris[t]
        # edge j is opposite vertex j
        m0 = npts + mesh.tri_edges[t, 0]
        m1 = npts + mesh.tri_edges[t, 1]
        m2 = npts + mesh.tri_edges[t, 2]
        tris[4 * t + 0] = (v0, m2, m1)
        tris[4 * t + 1] = (v1, m0, m2)
        tris[4 * t + 2] = (v2, m1, m0)
        tris[4 * t + 3] = (m0, m1, m2)
    return _build(dom, points, tris, vertex_s, min_angle_req=0.0)
