"""Plate domains, boundary curves, and measurable regions.

Boundary curves are closed, counterclockwise, and parameterized by true
arclength; the outward normal is the tangent rotated clockwise by 90
degrees.  Domains bundle a curve with the reference length rho0 and the
scaled constants (M0 graph bound, M1 area bound) used by the estimate
layer.  Regions are the measurable subsets (discs, polygons, unions) that
inclusions and clipped integrals work with.
"""

import math

import numpy as np
import shapely
import shapely.geometry as sgeom

from .backend import kernels
from .errors import EmptyCover, EmptyInterior, RegionOutsideDomain

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# boundary curves


class BoundaryCurve:
    """Closed ccw curve parameterized by arclength s in [0, length)."""

    length = None

    def point(self, s):
        raise NotImplementedError

    def tangent(self, s):
        raise NotImplementedError

    def normal(self, s):
        """Outward unit normal: tangent rotated by -90 degrees."""
        t = self.tangent(s)
        return np.stack([t[..., 1], -t[..., 0]], axis=-1)

    def curvature_bound(self):
        raise NotImplementedError

    def enclosed_area(self):
        raise NotImplementedError

    def breakpoints(self):
        """Arclengths where the curvature jumps (mesh nodes snap here)."""
        return np.empty(0)

    def polyline(self, chord_tol):
        """Dense polygon approximation with sagitta below chord_tol."""
        kap = max(self.curvature_bound(), 1e-12)
        ds = math.sqrt(8.0 * chord_tol / kap)
        n = max(16, int(math.ceil(self.length / ds)))
        n = min(n, 1 << 17)
        s = np.linspace(0.0, self.length, n, endpoint=False)
        br = self.breakpoints()
        if len(br):
            s = np.unique(np.concatenate([s, br]) % self.length)
        return self.point(s), s


class CircleCurve(BoundaryCurve):
    def __init__(self, center, radius):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.length = TWO_PI * self.radius

    def point(self, s):
        t = np.asarray(s, dtype=float) / self.radius
        return self.center + self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def tangent(self, s):
        t = np.asarray(s, dtype=float) / self.radius
        return np.stack([-np.sin(t), np.cos(t)], axis=-1)

    def curvature_bound(self):
        return 1.0 / self.radius

    def enclosed_area(self):
        return math.pi * self.radius ** 2


class EllipseCurve(BoundaryCurve):
    """Axis-aligned ellipse (x/a)^2 + (y/b)^2 = 1 around a center.

    Arclength-to-angle conversion uses a dense cumulative table refined by
    Newton steps against Gauss quadrature of the speed, so parameter
    lookups are accurate to roundoff.
    """

    _TABLE = 4096
    _GAUSS = np.polynomial.legendre.leggauss(8)

    def __init__(self, center, a, b):
        if a <= 0 or b <= 0:
            raise ValueError("semi-axes must be positive")
        self.center = np.asarray(center, dtype=float)
        self.a = float(a)
        self.b = float(b)
        n = self._TABLE
        tg = np.linspace(0.0, TWO_PI, n + 1)
        # Gauss-8 arclength of each angular slice, then cumulative sum
        xg, wg = self._GAUSS
        mid = 0.5 * (tg[:-1] + tg[1:])
        half = 0.5 * (tg[1] - tg[0])
        tt = mid[:, None] + half * xg[None, :]
        seg = (self._speed(tt) * wg[None, :]).sum(axis=1) * half
        self._t_table = tg
        self._s_table = np.concatenate([[0.0], np.cumsum(seg)])
        self.length = float(self._s_table[-1])

    def _speed(self, t):
        return np.hypot(self.a * np.sin(t), self.b * np.cos(t))

    def _arc_from(self, i, t):
        # arclength from table node i to angle t (within one slice), Gauss-8
        t0 = self._t_table[i]
        xg, wg = self._GAUSS
        mid = 0.5 * (t0 + t)
        half = 0.5 * (t - t0)
        tt = mid[:, None] + half[:, None] * xg[None, :]
        return (self._speed(tt) * wg[None, :]).sum(axis=1) * half

    def angle_of_arclength(self, s):
        scalar = np.ndim(s) == 0
        s = np.atleast_1d(np.mod(np.asarray(s, dtype=float), self.length))
        i = np.clip(np.searchsorted(self._s_table, s, side="right") - 1,
                    0, self._TABLE - 1)
        dt = self._t_table[1] - self._t_table[0]
        frac = (s - self._s_table[i]) / np.maximum(
            self._s_table[i + 1] - self._s_table[i], 1e-300)
        t = self._t_table[i] + dt * frac
        for _ in range(3):
            resid = self._s_table[i] + self._arc_from(i, t) - s
            t = t - resid / self._speed(t)
        return t[0] if scalar else t

    def point(self, s):
        t = self.angle_of_arclength(s)
        return self.center + np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def tangent(self, s):
        t = self.angle_of_arclength(s)
        v = np.stack([-self.a * np.sin(t), self.b * np.cos(t)], axis=-1)
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def curvature_bound(self):
        hi = max(self.a, self.b)
        lo = min(self.a, self.b)
        return hi / lo ** 2

    def enclosed_area(self):
        return math.pi * self.a * self.b


class RoundedPolygonCurve(BoundaryCurve):
    """Simple polygon with every corner replaced by a tangent fillet arc.

    Vertices must run counterclockwise; reflex corners are allowed (the
    fillet then bulges outward).  The result is C^{1,1} with curvature 0 on
    the straight parts and 1/radius on the arcs.
    """

    def __init__(self, vertices, radius):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] < 3 or V.shape[1] != 2:
            raise ValueError("need at least three 2d vertices")
        if radius <= 0:
            raise ValueError("fillet radius must be positive")
        n = V.shape[0]
        area2 = 0.0
        for i in range(n):
            j = (i + 1) % n
            area2 += V[i, 0] * V[j, 1] - V[j, 0] * V[i, 1]
        if area2 <= 0:
            raise ValueError("vertices must be counterclockwise")
        self.vertices = V
        self.radius = float(radius)

        tangents = []  # per corner: (A, B, center, ext, d)
        for i in range(n):
            prev = V[(i - 1) % n]
            cur = V[i]
            nxt = V[(i + 1) % n]
            u_in = cur - prev
            u_in = u_in / np.linalg.norm(u_in)
            u_out = nxt - cur
            u_out = u_out / np.linalg.norm(u_out)
            ext = math.atan2(u_in[0] * u_out[1] - u_in[1] * u_out[0],
                             u_in @ u_out)
            if abs(ext) < 1e-12:
                tangents.append(None)
                continue
            d = radius * math.tan(abs(ext) / 2.0)
            A = cur - u_in * d
            B = cur + u_out * d
            left = np.array([-u_in[1], u_in[0]])
            center = A + left * radius * np.sign(ext)
            tangents.append((A, B, center, ext, d))

        # consumed tangent lengths may not overrun any edge
        for i in range(n):
            j = (i + 1) % n
            elen = np.linalg.norm(V[j] - V[i])
            di = tangents[i][4] if tangents[i] else 0.0
            dj = tangents[j][4] if tangents[j] else 0.0
            if di + dj >= elen:
                raise ValueError("fillet radius too large for edge %d" % i)

        pieces = []  # (kind, length, data)
        for i in range(n):
            j = (i + 1) % n
            A_end = tangents[i][1] if tangents[i] else V[i]
            B_start = tangents[j][0] if tangents[j] else V[j]
            seg = B_start - A_end
            slen = np.linalg.norm(seg)
            if slen > 1e-14:
                pieces.append(("seg", slen, (A_end, seg / slen)))
            if tangents[j]:
                A, B, center, ext, d = tangents[j]
                a0 = math.atan2(A[1] - center[1], A[0] - center[0])
                pieces.append(("arc", radius * abs(ext), (center, a0, ext)))
        self.pieces = pieces
        self._breaks = np.cumsum([0.0] + [p[1] for p in pieces])
        self.length = float(self._breaks[-1])

        area = 0.5 * area2
        for t in tangents:
            if t is not None:
                _, _, _, ext, d = t
                area -= np.sign(ext) * (d * radius - radius ** 2 * abs(ext) / 2.0)
        self._area = float(area)

    def breakpoints(self):
        return self._breaks[:-1].copy()

    def _locate(self, s):
        s = np.atleast_1d(np.mod(np.asarray(s, dtype=float), self.length))
        idx = np.clip(np.searchsorted(self._breaks, s, side="right") - 1,
                      0, len(self.pieces) - 1)
        return s, idx

    def point(self, s):
        scalar = np.ndim(s) == 0
        s, idx = self._locate(s)
        out = np.empty((len(s), 2))
        for k in range(len(s)):
            kind, plen, data = self.pieces[idx[k]]
            ds = s[k] - self._breaks[idx[k]]
            if kind == "seg":
                p0, u = data
                out[k] = p0 + u * ds
            else:
                center, a0, ext = data
                ang = a0 + np.sign(ext) * ds / self.radius
                out[k] = center + self.radius * np.array([math.cos(ang), math.sin(ang)])
        return out[0] if scalar else out

    def tangent(self, s):
        scalar = np.ndim(s) == 0
        s, idx = self._locate(s)
        out = np.empty((len(s), 2))
        for k in range(len(s)):
            kind, plen, data = self.pieces[idx[k]]
            ds = s[k] - self._breaks[idx[k]]
            if kind == "seg":
                out[k] = data[1]
            else:
                center, a0, ext = data
                sgn = np.sign(ext)
                ang = a0 + sgn * ds / self.radius
                out[k] = sgn * np.array([-math.sin(ang), math.cos(ang)])
        return out[0] if scalar else out

    def curvature_bound(self):
        return 1.0 / self.radius

    def enclosed_area(self):
        return self._area


# ---------------------------------------------------------------------------
# measurable regions


class Region:
    """A measurable planar subset supporting area/membership/erosion."""

    def area(self):
        raise NotImplementedError

    def contains(self, pts):
        raise NotImplementedError

    def erode(self, delta):
        raise NotImplementedError

    def boundary_distance(self, pts):
        """Unsigned distance from points to the region boundary."""
        raise NotImplementedError

    def to_shapely(self):
        raise NotImplementedError

    def is_empty(self):
        return self.area() <= 0.0

    def bounds(self):
        return self.to_shapely().bounds


class EmptyRegion(Region):
    def area(self):
        return 0.0

    def contains(self, pts):
        return np.zeros(len(np.atleast_2d(pts)), dtype=bool)

    def erode(self, delta):
        return self

    def boundary_distance(self, pts):
        return np.full(len(np.atleast_2d(pts)), np.inf)

    def to_shapely(self):
        return sgeom.Polygon()

    def bounds(self):
        return (0.0, 0.0, 0.0, 0.0)


class DiscRegion(Region):
    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def area(self):
        return math.pi * self.radius ** 2

    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        d2 = ((pts - self.center) ** 2).sum(axis=1)
        return d2 <= self.radius ** 2

    def erode(self, delta):
        r = self.radius - delta
        return DiscRegion(self.center, r) if r > 0 else EmptyRegion()

    def boundary_distance(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        d = np.sqrt(((pts - self.center) ** 2).sum(axis=1))
        return np.abs(d - self.radius)

    def to_shapely(self, quad_segs=256):
        return sgeom.Point(self.center).buffer(self.radius, quad_segs=quad_segs)

    def bounds(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cy - r, cx + r, cy + r)


class PolygonRegion(Region):
    """Region bounded by a shapely polygon (possibly with holes)."""

    def __init__(self, polygon):
        if isinstance(polygon, (list, tuple, np.ndarray)):
            polygon = sgeom.Polygon(np.asarray(polygon, dtype=float))
        if not polygon.is_valid:
            polygon = polygon.buffer(0)
        self.polygon = polygon

    def area(self):
        return float(self.polygon.area)

    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return shapely.contains_xy(self.polygon, pts[:, 0], pts[:, 1])

    def erode(self, delta):
        shrunk = self.polygon.buffer(-delta, quad_segs=32)
        if shrunk.is_empty:
            return EmptyRegion()
        return region_from_shapely(shrunk)

    def boundary_distance(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        boundary = self.polygon.boundary
        return shapely.distance(boundary, shapely.points(pts))

    def to_shapely(self):
        return self.polygon


class UnionRegion(Region):
    """Disjoint union of component regions."""

    def __init__(self, parts):
        self.parts = [p for p in parts if not isinstance(p, EmptyRegion)]

    def area(self):
        return sum(p.area() for p in self.parts)

    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(len(pts), dtype=bool)
        for p in self.parts:
            out |= p.contains(pts)
        return out

    def erode(self, delta):
        eroded = [p.erode(delta) for p in self.parts]
        eroded = [p for p in eroded if not isinstance(p, EmptyRegion)]
        if not eroded:
            return EmptyRegion()
        if len(eroded) == 1:
            return eroded[0]
        return UnionRegion(eroded)

    def boundary_distance(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        d = np.full(len(pts), np.inf)
        for p in self.parts:
            d = np.minimum(d, p.boundary_distance(pts))
        return d

    def to_shapely(self):
        return shapely.union_all([p.to_shapely() for p in self.parts])

    def is_empty(self):
        return not self.parts


def region_from_shapely(geom):
    if geom.is_empty:
        return EmptyRegion()
    if isinstance(geom, sgeom.MultiPolygon):
        return UnionRegion([PolygonRegion(g) for g in geom.geoms])
    return PolygonRegion(geom)


# ---------------------------------------------------------------------------
# the plate domain


class PlateDomain:
    """Bounded C^{1,1} domain with its scale and shape constants.

    rho0 is the reference length; M0 bounds the scaled C^{1,1} norm of
    local boundary graphs over windows of width 4*rho0, and M1 bounds
    area/rho0^2.  Both can be supplied or left to per-shape defaults
    (M1 defaults to the exact area ratio).
    """

    _CHORD_TOL_FACTOR = 1e-7

    def __init__(self, curve, rho0, M0, M1=None, name="domain"):
        self.curve = curve
        self.rho0 = float(rho0)
        self.M0 = float(M0)
        self.area = float(curve.enclosed_area())
        self.M1 = float(M1) if M1 is not None else self.area / self.rho0 ** 2
        self.name = name
        if self.rho0 <= 0 or self.M0 <= 0:
            raise ValueError("rho0 and M0 must be positive")
        if self.area > self.M1 * self.rho0 ** 2 * (1 + 1e-12):
            raise ValueError("area exceeds M1 * rho0^2")
        self._poly_pts, self._poly_s = curve.polyline(
            self._CHORD_TOL_FACTOR * self.rho0)
        self._shapely = sgeom.Polygon(self._poly_pts)

    # membership and distance -------------------------------------------

    def inside(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if isinstance(self.curve, CircleCurve):
            d2 = ((pts - self.curve.center) ** 2).sum(axis=1)
            return d2 <= self.curve.radius ** 2
        if isinstance(self.curve, EllipseCurve):
            rel = pts - self.curve.center
            return ((rel[:, 0] / self.curve.a) ** 2
                    + (rel[:, 1] / self.curve.b) ** 2) <= 1.0
        return kernels.poly_inside(np.ascontiguousarray(pts),
                                   np.ascontiguousarray(self._poly_pts))

    def boundary_distance(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if isinstance(self.curve, CircleCurve):
            d = np.sqrt(((pts - self.curve.center) ** 2).sum(axis=1))
            return np.abs(d - self.curve.radius)
        return kernels.poly_distance(np.ascontiguousarray(pts),
                                     np.ascontiguousarray(self._poly_pts))

    def signed_distance(self, pts):
        """Negative inside the domain, positive outside."""
        d = self.boundary_distance(pts)
        return np.where(self.inside(pts), -d, d)

    def bbox(self):
        lo = self._poly_pts.min(axis=0)
        hi = self._poly_pts.max(axis=0)
        return lo, hi

    def shapely_polygon(self):
        return self._shapely

    # interior envelopes --------------------------------------------------

    def envelope(self, r):
        """Interior envelope: points at distance more than r from the boundary."""
        if r < 0:
            raise ValueError("envelope depth must be nonnegative")
        if r == 0:
            return region_from_shapely(self._shapely)
        if isinstance(self.curve, CircleCurve):
            rr = self.curve.radius - r
            return DiscRegion(self.curve.center, rr) if rr > 0 else EmptyRegion()
        shrunk = self._shapely.buffer(-r, quad_segs=32)
        return region_from_shapely(shrunk)

    def envelope_area(self, r):
        return self.envelope(r).area()

    def boundary_layer_area(self, r):
        """Area of the collar within distance r of the boundary."""
        return self.area - self.envelope_area(r)


def disc_domain(radius=1.0, center=(0.0, 0.0), rho0=None, M0=None, M1=None):
    """Disc domain; defaults rho0 = radius/4 with a certified M0 = 1.5."""
    rho0 = radius / 4.0 if rho0 is None else rho0
    M0 = 1.5 if M0 is None else M0
    return PlateDomain(CircleCurve(center, radius), rho0, M0, M1, name="disc")


def ellipse_domain(a, b, center=(0.0, 0.0), rho0=None, M0=None, M1=None):
    """Ellipse domain; default rho0 = min(a,b)/4, M0 estimated numerically."""
    curve = EllipseCurve(center, a, b)
    rho0 = min(a, b) / 4.0 if rho0 is None else rho0
    if M0 is None:
        M0 = estimate_graph_constant(curve, rho0)
    return PlateDomain(curve, rho0, M0, M1, name="ellipse")


def rounded_polygon_domain(vertices, radius, rho0=None, M0=None, M1=None,
                           name="rounded_polygon"):
    """Rounded polygon domain; default rho0 = fillet radius / 2."""
    curve = RoundedPolygonCurve(vertices, radius)
    rho0 = radius / 2.0 if rho0 is None else rho0
    if M0 is None:
        M0 = estimate_graph_constant(curve, rho0)
    return PlateDomain(curve, rho0, M0, M1, name=name)


def estimate_graph_constant(curve, rho0, n_anchor=64, n_local=257):
    """Estimate the scaled C^{1,1} graph constant M0 of a curve.

    At sampled anchor points the boundary is rotated into the tangent
    frame and the window |t| <= 2*rho0 is fit as a graph; the estimate is
    the largest scaled norm (sup|psi| + rho0 sup|psi'| + rho0^2 Lip(psi'))
    over anchors, divided by rho0.  Sampled, not certified; a margin of
    1.1 is applied.
    """
    L = curve.length
    worst = 0.0
    for k in range(n_anchor):
        s0 = L * k / n_anchor
        p0 = np.atleast_2d(curve.point(s0))[0]
        tau = np.atleast_2d(curve.tangent(s0))[0]
        nrm = np.array([tau[1], -tau[0]])
        # walk the curve until the tangential coordinate leaves the window
        span = np.linspace(-4.0 * rho0, 4.0 * rho0, n_local)
        p = np.atleast_2d(curve.point(s0 + span))
        t_coord = (p - p0) @ tau
        u_coord = -((p - p0) @ nrm)  # height measured inward
        keep = np.abs(t_coord) <= 2.0 * rho0
        if keep.sum() < 5:
            continue
        t = t_coord[keep]
        u = u_coord[keep]
        order = np.argsort(t)
        t = t[order]
        u = u[order]
        dedup = np.concatenate([[True], np.diff(t) > 1e-9 * rho0])
        t = t[dedup]
        u = u[dedup]
        if len(t) < 5:
            continue
        du = np.diff(u) / np.diff(t)
        sup0 = np.max(np.abs(u))
        sup1 = np.max(np.abs(du)) if len(du) else 0.0
        lip = (np.max(np.abs(np.diff(du) / np.diff(0.5 * (t[:-1] + t[1:]))))
               if len(du) > 1 else 0.0)
        norm = sup0 + rho0 * sup1 + rho0 ** 2 * lip
        worst = max(worst, norm / rho0)
    return 1.1 * max(worst, 0.1)


# ---------------------------------------------------------------------------
# inclusions


class Inclusion:
    """Unknown inclusion: a region with fatness/standoff parameters.

    h1 and d0 are rho0-scaled: the eroded region D_{h1 rho0} must keep at
    least half the area, and the region must stay d0*rho0 away from the
    domain boundary.  ``tensor`` optionally carries the inclusion
    elasticity tensor.
    """

    def __init__(self, region, d0, h1, tensor=None):
        self.region = region
        self.d0 = float(d0)
        self.h1 = float(h1)
        self.tensor = tensor
        if self.d0 <= 0 or self.h1 <= 0:
            raise ValueError("d0 and h1 must be positive")

    @property
    def area(self):
        return self.region.area()

    def eroded(self, rho0):
        return self.region.erode(self.h1 * rho0)

    def eroded_area(self, rho0):
        return self.eroded(rho0).area()


def check_fatness(inclusion, rho0):
    """Eroded-area check: |D_{h1 rho0}| >= |D| / 2.

    Returns (ok, eroded_area, ratio).
    """
    a = inclusion.area
    ae = inclusion.eroded_area(rho0)
    ratio = ae / a if a > 0 else 0.0
    return ratio >= 0.5, ae, ratio


def check_standoff(inclusion, dom):
    """Distance check: dist(D, boundary) >= d0 * rho0.

    Returns (ok, distance).
    """
    incl = inclusion.region.to_shapely()
    boundary = dom.shapely_polygon().exterior
    d = float(incl.distance(boundary))
    inside = dom.inside(np.asarray(incl.representative_point().coords))[0]
    if not inside:
        return False, -d
    return d >= inclusion.d0 * dom.rho0 * (1 - 1e-9), d


# ---------------------------------------------------------------------------
# covers and connectivity


def cover_side(d0, h1, s, rho0):
    """Side length of covering squares: min(2 d0 rho0 / s, h1 rho0 / sqrt2)."""
    return min(2.0 * d0 * rho0 / s, h1 * rho0 / math.sqrt(2.0))


def cover_with_squares(region, eps, anchor=None):
    """Closed axis-aligned lattice squares of side eps covering a region.

    Squares come from the lattice anchored at ``anchor`` (bbox corner by
    default) and are kept when they intersect the region; their union then
    contains it.  Returns an (n, 2) array of square centers.
    """
    if region.is_empty():
        raise EmptyCover("cannot cover an empty region")
    x0, y0, x1, y1 = region.bounds()
    if anchor is None:
        anchor = (x0, y0)
    ax, ay = anchor
    i0 = int(math.floor((x0 - ax) / eps)) - 1
    i1 = int(math.ceil((x1 - ax) / eps)) + 1
    j0 = int(math.floor((y0 - ay) / eps)) - 1
    j1 = int(math.ceil((y1 - ay) / eps)) + 1
    shape = region.to_shapely()
    centers = []
    for i in range(i0, i1 + 1):
        for j in range(j0, j1 + 1):
            cx = ax + (i + 0.5) * eps
            cy = ay + (j + 0.5) * eps
            sq = sgeom.box(cx - eps / 2, cy - eps / 2, cx + eps / 2, cy + eps / 2)
            if shape.intersects(sq):
                centers.append((cx, cy))
    if not centers:
        raise EmptyCover("lattice produced no covering squares")
    return np.array(centers)


def connectivity_scan(dom, r_values=None, pixel=None):
    """Flood-fill estimate of the connectivity scale of interior envelopes.

    For each depth r, the envelope {dist > r} is rasterized on a pixel
    grid and its 8-connected components counted.  Returns (h0, records)
    where h0 is the largest scanned r (in units of rho0) whose envelope is
    a single nonempty component, and records is a list of (r, count).
    Accuracy is limited by the pixel size.
    """
    from scipy import ndimage

    lo, hi = dom.bbox()
    extent = float(max(hi - lo))
    if pixel is None:
        pixel = extent / 256.0
    if r_values is None:
        r_values = np.linspace(0.0, 0.5 * extent, 33)[1:]
    nx = int(math.ceil((hi[0] - lo[0]) / pixel)) + 3
    ny = int(math.ceil((hi[1] - lo[1]) / pixel)) + 3
    xs = lo[0] + (np.arange(nx) + 0.5) * pixel - pixel
    ys = lo[1] + (np.arange(ny) + 0.5) * pixel - pixel
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    d = dom.signed_distance(pts).reshape(nx, ny)
    records = []
    h0 = 0.0
    eight = np.ones((3, 3), dtype=int)
    for r in np.asarray(r_values, dtype=float):
        mask = d < -r
        if not mask.any():
            records.append((float(r), 0))
            continue
        _, count = ndimage.label(mask, structure=eight)
        records.append((float(r), int(count)))
        if count == 1:
            h0 = max(h0, float(r))
    if h0 == 0.0:
        raise EmptyInterior("no scanned depth leaves a connected envelope")
    return h0 / dom.rho0, records


def require_disc_inside(dom, center, radius):
    """Raise RegionOutsideDomain unless the closed disc sits in the domain."""
    center = np.asarray(center, dtype=float)
    if not dom.inside(center[None, :])[0]:
        raise RegionOutsideDomain("disc center %s lies outside the domain"
                                  % (center,))
    d = float(dom.boundary_distance(center[None, :])[0])
    if d < radius * (1 - 1e-12):
        raise RegionOutsideDomain(
            "disc of radius %.6g at %s reaches within %.6g of the boundary"
            % (radius, center, d))
