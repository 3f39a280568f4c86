"""Hot numeric kernels, numba-compiled flavor.

Plain scalar loops under ``@njit``.  The pure-numpy twin in
``_kernels_numpy`` exposes the same callables with vectorized
implementations; tests compare the two on random inputs.  Keep fastmath
off: the clipping kernel feeds monotonicity checks at 1e-12 tolerances.
"""

import math

import numpy as np
from numba import njit

JIT = dict(cache=True, nogil=True)

BACKEND_NAME = "numba"


@njit(**JIT)
def _edge_disc_term(x0, y0, x1, y1, r):
    # Green's theorem contribution of the directed segment (x0,y0)->(x1,y1)
    # to the area of <polygon> ∩ disc(0, r).  Portions of the segment inside
    # the disc contribute a cross-product term, portions outside contribute
    # the circular sector swept between entry and exit directions.
    dx = x1 - x0
    dy = y1 - y0
    a = dx * dx + dy * dy
    if a == 0.0:
        return 0.0
    b = 2.0 * (x0 * dx + y0 * dy)
    c = x0 * x0 + y0 * y0 - r * r
    t1 = 0.0
    t2 = 0.0
    disc = b * b - 4.0 * a * c
    if disc > 0.0:
        sq = math.sqrt(disc)
        t1 = (-b - sq) / (2.0 * a)
        t2 = (-b + sq) / (2.0 * a)
        if t1 < 0.0:
            t1 = 0.0
        elif t1 > 1.0:
            t1 = 1.0
        if t2 < 0.0:
            t2 = 0.0
        elif t2 > 1.0:
            t2 = 1.0
    total = 0.0
    ta = 0.0
    for k in range(3):
        if k == 0:
            tb = t1
        elif k == 1:
            tb = t2
        else:
            tb = 1.0
        if tb > ta:
            ax = x0 + ta * dx
            ay = y0 + ta * dy
            bx = x0 + tb * dx
            by = y0 + tb * dy
            tm = 0.5 * (ta + tb)
            mx = x0 + tm * dx
            my = y0 + tm * dy
            cr = ax * by - ay * bx
            if mx * mx + my * my <= r * r:
                total += 0.5 * cr
            else:
                total += 0.5 * r * r * math.atan2(cr, ax * bx + ay * by)
        ta = tb
    return total


@njit(**JIT)
def tri_disc_areas(pts, tris, cx, cy, r):
    """Area of (triangle ∩ disc) for every triangle.

    ``pts`` is (np, 2), ``tris`` (nt, 3) with ccw orientation; the disc has
    center (cx, cy) and radius r.  Returns an (nt,) array.
    """
    nt = tris.shape[0]
    out = np.empty(nt)
    for t in range(nt):
        i0 = tris[t, 0]
        i1 = tris[t, 1]
        i2 = tris[t, 2]
        x0 = pts[i0, 0] - cx
        y0 = pts[i0, 1] - cy
        x1 = pts[i1, 0] - cx
        y1 = pts[i1, 1] - cy
        x2 = pts[i2, 0] - cx
        y2 = pts[i2, 1] - cy
        s = _edge_disc_term(x0, y0, x1, y1, r)
        s += _edge_disc_term(x1, y1, x2, y2, r)
        s += _edge_disc_term(x2, y2, x0, y0, r)
        tri_area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
        if s < 0.0:
            s = 0.0
        elif s > tri_area:
            s = tri_area
        out[t] = s
    return out


@njit(**JIT)
def disc_integrals(pts, tris, weights, centers, r):
    """Sum of weight * |triangle ∩ disc(center, r)| for many disc centers.

    ``weights`` is (nt,) (typically squared Hessian norm per element),
    ``centers`` (nc, 2).  Returns (nc,).
    """
    nc = centers.shape[0]
    nt = tris.shape[0]
    out = np.empty(nc)
    for c in range(nc):
        cx = centers[c, 0]
        cy = centers[c, 1]
        acc = 0.0
        for t in range(nt):
            w = weights[t]
            if w == 0.0:
                continue
            i0 = tris[t, 0]
            i1 = tris[t, 1]
            i2 = tris[t, 2]
            x0 = pts[i0, 0] - cx
            y0 = pts[i0, 1] - cy
            x1 = pts[i1, 0] - cx
            y1 = pts[i1, 1] - cy
            x2 = pts[i2, 0] - cx
            y2 = pts[i2, 1] - cy
            # cheap reject: triangle bounding circle vs disc
            qx = (x0 + x1 + x2) / 3.0
            qy = (y0 + y1 + y2) / 3.0
            d0 = (x0 - qx) ** 2 + (y0 - qy) ** 2
            d1 = (x1 - qx) ** 2 + (y1 - qy) ** 2
            d2 = (x2 - qx) ** 2 + (y2 - qy) ** 2
            rt = math.sqrt(max(d0, max(d1, d2)))
            if math.sqrt(qx * qx + qy * qy) > r + rt:
                continue
            s = _edge_disc_term(x0, y0, x1, y1, r)
            s += _edge_disc_term(x1, y1, x2, y2, r)
            s += _edge_disc_term(x2, y2, x0, y0, r)
            tri_area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
            if s < 0.0:
                s = 0.0
            elif s > tri_area:
                s = tri_area
            acc += w * s
        out[c] = acc
    return out


@njit(**JIT)
def poly_inside(query, poly):
    """Even-odd point-in-polygon test against a closed polyline.

    ``query`` (m, 2), ``poly`` (n, 2) without a repeated closing vertex.
    Returns a boolean (m,) array.
    """
    m = query.shape[0]
    n = poly.shape[0]
    out = np.zeros(m, dtype=np.bool_)
    for j in range(m):
        px = query[j, 0]
        py = query[j, 1]
        inside = False
        x1 = poly[n - 1, 0]
        y1 = poly[n - 1, 1]
        for i in range(n):
            x2 = poly[i, 0]
            y2 = poly[i, 1]
            if (y1 > py) != (y2 > py):
                xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
                if xint > px:
                    inside = not inside
            x1 = x2
            y1 = y2
        out[j] = inside
    return out


@njit(**JIT)
def poly_distance(query, poly):
    """Distance from each query point to a closed polyline (unsigned)."""
    m = query.shape[0]
    n = poly.shape[0]
    out = np.empty(m)
    for j in range(m):
        px = query[j, 0]
        py = query[j, 1]
        best = 1e300
        x1 = poly[n - 1, 0]
        y1 = poly[n - 1, 1]
        for i in range(n):
            x2 = poly[i, 0]
            y2 = poly[i, 1]
            dx = x2 - x1
            dy = y2 - y1
            L2 = dx * dx + dy * dy
            if L2 > 0.0:
                t = ((px - x1) * dx + (py - y1) * dy) / L2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            ex = x1 + t * dx - px
            ey = y1 + t * dy - py
            d2 = ex * ex + ey * ey
            if d2 < best:
                best = d2
            x1 = x2
            y1 = y2
        out[j] = math.sqrt(best)
    return out


@njit(**JIT)
def morley_element_setup(pts, tris, tri_edges, edge_normals, edge_mids):
    """Per-element Morley basis data.

    Local monomials [1, u, v, u^2, uv, v^2] in coordinates
    u = (x - centroid)/scale with scale = sqrt(element area).  Degrees of
    freedom: values at the three vertices, then normal slopes at the three
    edge midpoints taken along the fixed global edge normal (edge j of a
    triangle is opposite local vertex j).

    Returns (coeff, cent, scale, area): coeff[t] is the 6x6 matrix whose
    column k holds monomial coefficients of local basis function k.
    """
    nt = tris.shape[0]
    coeff = np.empty((nt, 6, 6))
    cent = np.empty((nt, 2))
    scale = np.empty(nt)
    area = np.empty(nt)
    D = np.empty((6, 6))
    for t in range(nt):
        i0 = tris[t, 0]
        i1 = tris[t, 1]
        i2 = tris[t, 2]
        ax = pts[i0, 0]
        ay = pts[i0, 1]
        bx = pts[i1, 0]
        by = pts[i1, 1]
        qx = pts[i2, 0]
        qy = pts[i2, 1]
        A = 0.5 * ((bx - ax) * (qy - ay) - (qx - ax) * (by - ay))
        cx = (ax + bx + qx) / 3.0
        cy = (ay + by + qy) / 3.0
        ell = math.sqrt(abs(A))
        cent[t, 0] = cx
        cent[t, 1] = cy
        scale[t] = ell
        area[t] = A
        for k in range(3):
            vx = pts[tris[t, k], 0]
            vy = pts[tris[t, k], 1]
            u = (vx - cx) / ell
            v = (vy - cy) / ell
            D[k, 0] = 1.0
            D[k, 1] = u
            D[k, 2] = v
            D[k, 3] = u * u
            D[k, 4] = u * v
            D[k, 5] = v * v
        for k in range(3):
            e = tri_edges[t, k]
            nx = edge_normals[e, 0]
            ny = edge_normals[e, 1]
            u = (edge_mids[e, 0] - cx) / ell
            v = (edge_mids[e, 1] - cy) / ell
            D[3 + k, 0] = 0.0
            D[3 + k, 1] = nx / ell
            D[3 + k, 2] = ny / ell
            D[3 + k, 3] = 2.0 * u * nx / ell
            D[3 + k, 4] = (v * nx + u * ny) / ell
            D[3 + k, 5] = 2.0 * v * ny / ell
        coeff[t] = np.linalg.inv(D)
    return coeff, cent, scale, area


@njit(**JIT)
def element_stiffness(coeff, scale, weight, qmat):
    """Element stiffness blocks K_t = weight_t * B_t^T Q_t B_t.

    ``weight`` is the effective element area (straight area plus any curved
    boundary correction), ``qmat`` (nt, 3, 3) the plate tensor in Voigt form
    averaged over the element.  Also returns the per-element Voigt Hessian
    operator B (nt, 3, 6) mapping local dofs to (h11, h22, sqrt2*h12).
    """
    nt = coeff.shape[0]
    K = np.empty((nt, 6, 6))
    B = np.empty((nt, 3, 6))
    s2 = math.sqrt(2.0)
    for t in range(nt):
        il2 = 1.0 / (scale[t] * scale[t])
        for k in range(6):
            B[t, 0, k] = 2.0 * il2 * coeff[t, 3, k]
            B[t, 1, k] = 2.0 * il2 * coeff[t, 5, k]
            B[t, 2, k] = s2 * il2 * coeff[t, 4, k]
        for i in range(6):
            for j in range(6):
                acc = 0.0
                for a in range(3):
                    for b in range(3):
                        acc += B[t, a, i] * qmat[t, a, b] * B[t, b, j]
                K[t, i, j] = weight[t] * acc
    return K, B
