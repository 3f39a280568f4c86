"""Hot numeric kernels, pure-numpy flavor.

Vectorized implementations of the same API as ``_kernels_numba``.  Used
when the environment variable PLATELAB_BACKEND=numpy is set or numba is
unavailable.  Intentionally a separate code path so the two backends
cross-check each other.
"""

import numpy as np

BACKEND_NAME = "numpy"


def _edge_disc_terms(x0, y0, x1, y1, r):
    # Vectorized Green's theorem contribution of directed segments to the
    # area of <polygon> ∩ disc(0, r).  Inputs are same-shape arrays.
    dx = x1 - x0
    dy = y1 - y0
    a = dx * dx + dy * dy
    b = 2.0 * (x0 * dx + y0 * dy)
    c = x0 * x0 + y0 * y0 - r * r
    disc = b * b - 4.0 * a * c
    ok = (disc > 0.0) & (a > 0.0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    denom = np.where(a > 0.0, 2.0 * a, 1.0)
    t1 = np.where(ok, (-b - sq) / denom, 0.0)
    t2 = np.where(ok, (-b + sq) / denom, 0.0)
    t1 = np.clip(t1, 0.0, 1.0)
    t2 = np.clip(t2, 0.0, 1.0)
    total = np.zeros_like(dx)
    zero = np.zeros_like(dx)
    one = np.ones_like(dx)
    for ta, tb in ((zero, t1), (t1, t2), (t2, one)):
        live = tb > ta
        ax = x0 + ta * dx
        ay = y0 + ta * dy
        bx = x0 + tb * dx
        by = y0 + tb * dy
        tm = 0.5 * (ta + tb)
        mx = x0 + tm * dx
        my = y0 + tm * dy
        cr = ax * by - ay * bx
        inside = mx * mx + my * my <= r * r
        seg = np.where(inside, 0.5 * cr, 0.5 * r * r * np.arctan2(cr, ax * bx + ay * by))
        total += np.where(live, seg, 0.0)
    return np.where(a > 0.0, total, 0.0)


def tri_disc_areas(pts, tris, cx, cy, r):
    """Area of (triangle ∩ disc) for every triangle; see numba twin."""
    P = pts[tris]  # (nt, 3, 2)
    x = P[:, :, 0] - cx
    y = P[:, :, 1] - cy
    s = np.zeros(tris.shape[0])
    for k in range(3):
        k2 = (k + 1) % 3
        s += _edge_disc_terms(x[:, k], y[:, k], x[:, k2], y[:, k2], r)
    tri_area = 0.5 * ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0])
                      - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0]))
    return np.clip(s, 0.0, tri_area)


def disc_integrals(pts, tris, weights, centers, r):
    """Sum of weight * |triangle ∩ disc| for many centers; see numba twin."""
    live = weights != 0.0
    tr = tris[live]
    w = weights[live]
    P = pts[tr]
    cent = P.mean(axis=1)
    rad = np.sqrt(((P - cent[:, None, :]) ** 2).sum(axis=2)).max(axis=1)
    out = np.empty(centers.shape[0])
    for c in range(centers.shape[0]):
        d = np.sqrt(((cent - centers[c]) ** 2).sum(axis=1))
        near = d <= r + rad
        if not near.any():
            out[c] = 0.0
            continue
        areas = tri_disc_areas(pts, tr[near], centers[c, 0], centers[c, 1], r)
        out[c] = float(w[near] @ areas)
    return out


def poly_inside(query, poly, chunk=2048):
    """Even-odd point-in-polygon test; see numba twin."""
    x1 = poly[:, 0]
    y1 = poly[:, 1]
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)
    dy = y2 - y1
    safe_dy = np.where(dy == 0.0, 1.0, dy)
    out = np.empty(query.shape[0], dtype=bool)
    for lo in range(0, query.shape[0], chunk):
        q = query[lo:lo + chunk]
        px = q[:, 0][:, None]
        py = q[:, 1][:, None]
        straddle = (y1 > py) != (y2 > py)
        xint = x1 + (py - y1) * (x2 - x1) / safe_dy
        hits = straddle & (xint > px)
        out[lo:lo + chunk] = (hits.sum(axis=1) % 2).astype(bool)
    return out


def poly_distance(query, poly, chunk=2048):
    """Distance from each query point to a closed polyline; see numba twin."""
    a = poly
    b = np.roll(poly, -1, axis=0)
    d = b - a
    L2 = (d * d).sum(axis=1)
    L2safe = np.where(L2 == 0.0, 1.0, L2)
    out = np.empty(query.shape[0])
    for lo in range(0, query.shape[0], chunk):
        q = query[lo:lo + chunk]
        w = q[:, None, :] - a[None, :, :]
        t = (w * d[None, :, :]).sum(axis=2) / L2safe
        t = np.clip(t, 0.0, 1.0)
        e = w - t[:, :, None] * d[None, :, :]
        out[lo:lo + chunk] = np.sqrt((e * e).sum(axis=2).min(axis=1))
    return out


def morley_element_setup(pts, tris, tri_edges, edge_normals, edge_mids):
    """Per-element Morley basis data, batched; see numba twin for layout."""
    nt = tris.shape[0]
    P = pts[tris]  # (nt, 3, 2)
    A = 0.5 * ((P[:, 1, 0] - P[:, 0, 0]) * (P[:, 2, 1] - P[:, 0, 1])
               - (P[:, 2, 0] - P[:, 0, 0]) * (P[:, 1, 1] - P[:, 0, 1]))
    cent = P.mean(axis=1)
    scale = np.sqrt(np.abs(A))
    D = np.empty((nt, 6, 6))
    rel = (P - cent[:, None, :]) / scale[:, None, None]
    u = rel[:, :, 0]
    v = rel[:, :, 1]
    D[:, :3, 0] = 1.0
    D[:, :3, 1] = u
    D[:, :3, 2] = v
    D[:, :3, 3] = u * u
    D[:, :3, 4] = u * v
    D[:, :3, 5] = v * v
    nrm = edge_normals[tri_edges]            # (nt, 3, 2)
    mid = edge_mids[tri_edges]               # (nt, 3, 2)
    mrel = (mid - cent[:, None, :]) / scale[:, None, None]
    mu = mrel[:, :, 0]
    mv = mrel[:, :, 1]
    nx = nrm[:, :, 0]
    ny = nrm[:, :, 1]
    ils = 1.0 / scale[:, None]
    D[:, 3:, 0] = 0.0
    D[:, 3:, 1] = nx * ils
    D[:, 3:, 2] = ny * ils
    D[:, 3:, 3] = 2.0 * mu * nx * ils
    D[:, 3:, 4] = (mv * nx + mu * ny) * ils
    D[:, 3:, 5] = 2.0 * mv * ny * ils
    coeff = np.linalg.inv(D)
    return coeff, cent, scale, A


def element_stiffness(coeff, scale, weight, qmat):
    """Element stiffness blocks, batched; see numba twin."""
    il2 = 1.0 / (scale * scale)
    B = np.empty((coeff.shape[0], 3, 6))
    B[:, 0, :] = 2.0 * il2[:, None] * coeff[:, 3, :]
    B[:, 1, :] = 2.0 * il2[:, None] * coeff[:, 5, :]
    B[:, 2, :] = np.sqrt(2.0) * il2[:, None] * coeff[:, 4, :]
    K = np.einsum("tai,tab,tbj->tij", B, qmat, B)
    K *= weight[:, None, None]
    return K, B
