import math

import numpy as np
import pytest
import shapely.geometry as sgeom

from platelab.domains import (DiscRegion, EmptyRegion, Inclusion,
                              PolygonRegion, check_fatness, check_standoff,
                              connectivity_scan, cover_side,
                              cover_with_squares, disc_domain, ellipse_domain,
                              region_from_shapely, require_disc_inside,
                              rounded_polygon_domain)
from platelab.errors import EmptyCover, EmptyInterior, RegionOutsideDomain

RNG = np.random.default_rng(5)


# curves and areas ------------------------------------------------------------

def test_disc_area_exact():
    dom = disc_domain(1.0)
    assert abs(dom.area - math.pi) <= 1e-10


def test_ellipse_area():
    dom = ellipse_domain(2.0, 1.0)
    assert abs(dom.area - 2.0 * math.pi) <= 1e-8


def test_rounded_square_area_and_length():
    # [0,1]^2 filleted with r: area 1 - (4-pi) r^2, length 4(1-2r) + 2 pi r
    r = 0.2
    dom = rounded_polygon_domain([(0, 0), (1, 0), (1, 1), (0, 1)], r)
    assert abs(dom.area - (1.0 - (4.0 - math.pi) * r * r)) <= 1e-9
    want_len = 4.0 * (1.0 - 2.0 * r) + 2.0 * math.pi * r
    assert abs(dom.curve.length - want_len) <= 1e-9


def test_curve_frame_conventions():
    """Unit tangent, and tau = e3 x n so n is the outward normal."""
    for dom in [disc_domain(1.0), ellipse_domain(2.0, 1.0),
                rounded_polygon_domain([(0, 0), (1, 0), (1, 1), (0, 1)], 0.2)]:
        s = np.linspace(0.0, dom.curve.length, 40, endpoint=False)
        tau = np.atleast_2d(dom.curve.tangent(s))
        n = np.atleast_2d(dom.curve.normal(s))
        assert np.allclose(np.linalg.norm(tau, axis=1), 1.0, atol=1e-9)
        # e3 x n = (-n2, n1)
        assert np.allclose(tau, np.column_stack([-n[:, 1], n[:, 0]]), atol=1e-9)
        # outward: stepping along n leaves the domain
        pts = np.atleast_2d(dom.curve.point(s))
        outside = pts + 1e-6 * n
        assert not dom.inside(outside).any()


def test_rounded_polygon_tangent_continuous_at_breakpoints():
    dom = rounded_polygon_domain([(0, 0), (1, 0), (1, 1), (0, 1)], 0.2)
    for sb in dom.curve.breakpoints():
        before = dom.curve.tangent(sb - 1e-9)
        after = dom.curve.tangent(sb + 1e-9)
        assert np.allclose(before, after, atol=1e-6)


def test_signed_distance_against_shapely():
    dom = ellipse_domain(2.0, 1.0)
    poly = dom.shapely_polygon()
    pts = RNG.uniform(-2.5, 2.5, size=(200, 2))
    for p in pts:
        d = float(poly.exterior.distance(sgeom.Point(p)))
        got = dom.boundary_distance(p[None, :])[0]
        assert abs(got - d) <= 1e-6 + 1e-6 * d
    inside = dom.inside(pts)
    sd = dom.signed_distance(pts)
    assert np.all((sd < 0) == inside)


# envelopes -------------------------------------------------------------------

def test_disc_envelope_exact():
    dom = disc_domain(1.0)
    env = dom.envelope(0.3)
    assert isinstance(env, DiscRegion)
    assert abs(env.area() - math.pi * 0.49) <= 1e-12
    assert isinstance(dom.envelope(1.5), EmptyRegion)


def test_envelope_monotone():
    dom = ellipse_domain(1.5, 1.0)
    pts = RNG.uniform(-1.5, 1.5, size=(400, 2))
    inner = dom.envelope(0.4).contains(pts)
    outer = dom.envelope(0.15).contains(pts)
    assert np.all(outer[inner])  # deeper envelope is a subset


def test_envelope_zero_is_whole_domain():
    dom = disc_domain(1.0)
    assert abs(dom.envelope(0.0).area() - dom.area) <= 1e-6
    with pytest.raises(ValueError):
        dom.envelope(-0.1)


# regions ---------------------------------------------------------------------

def test_disc_region_basics():
    reg = DiscRegion((0.5, 0.0), 0.3)
    assert abs(reg.area() - math.pi * 0.09) <= 1e-12
    assert reg.contains(np.array([[0.5, 0.1]]))[0]
    assert not reg.contains(np.array([[0.5, 0.4]]))[0]
    er = reg.erode(0.1)
    assert abs(er.area() - math.pi * 0.04) <= 1e-12
    assert reg.erode(0.5).is_empty()


def test_polygon_region_matches_shapely():
    poly = sgeom.Point(0.2, -0.1).buffer(0.4, quad_segs=32)
    reg = PolygonRegion(poly)
    assert abs(reg.area() - poly.area) <= 1e-14
    assert abs(reg.erode(0.1).area() - poly.buffer(-0.1).area) <= 1e-3


def test_region_from_shapely_empty():
    assert region_from_shapely(sgeom.Polygon()).is_empty()


# inclusion hypotheses --------------------------------------------------------

def test_fatness_disc_threshold():
    # eroded disc keeps half the area iff depth <= R (1 - 1/sqrt2)
    dom = disc_domain(1.0)
    R = 0.3
    crit = R * (1.0 - 1.0 / math.sqrt(2.0))
    fat = Inclusion(DiscRegion((0, 0), R), d0=0.05, h1=crit / dom.rho0 * 0.98)
    ok, _, ratio = check_fatness(fat, dom.rho0)
    assert ok and ratio >= 0.5
    thin = Inclusion(DiscRegion((0, 0), R), d0=0.05, h1=crit / dom.rho0 * 1.05)
    ok, _, ratio = check_fatness(thin, dom.rho0)
    assert not ok and ratio < 0.5


def test_standoff():
    dom = disc_domain(1.0)
    inc = Inclusion(DiscRegion((0.2, 0.0), 0.3), d0=0.4 / dom.rho0, h1=0.1)
    ok, dist = check_standoff(inc, dom)
    assert ok
    assert abs(dist - 0.5) <= 1e-6
    near = Inclusion(DiscRegion((0.6, 0.0), 0.3), d0=0.5 / dom.rho0, h1=0.1)
    ok, dist = check_standoff(near, dom)
    assert not ok


def test_standoff_outside_domain():
    dom = disc_domain(1.0)
    out = Inclusion(DiscRegion((3.0, 0.0), 0.2), d0=0.05, h1=0.1)
    ok, dist = check_standoff(out, dom)
    assert not ok


# coverings -------------------------------------------------------------------

def test_cover_side_formula():
    assert cover_side(0.1, 0.2, 8.0, 2.0) == min(2 * 0.1 * 2.0 / 8.0,
                                                 0.2 * 2.0 / math.sqrt(2.0))


def test_cover_with_squares_covers_eroded_region():
    dom = disc_domain(1.0)
    h1 = 0.3
    region = DiscRegion((0.1, 0.2), 0.4)
    eroded = region.erode(h1 * dom.rho0)
    eps = cover_side(d0=0.5, h1=h1, s=8.87, rho0=dom.rho0)
    centers = cover_with_squares(eroded, eps)
    # squares are disjoint lattice cells
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            assert np.max(np.abs(centers[i] - centers[j])) >= eps - 1e-12
    # each square stays inside the (uneroded) region
    half = eps / 2.0
    for cx, cy in centers:
        corners = np.array([[cx - half, cy - half], [cx - half, cy + half],
                            [cx + half, cy - half], [cx + half, cy + half]])
        assert region.contains(corners).all()
    # the union covers the eroded region
    assert len(centers) * eps * eps >= eroded.area()
    pts = RNG.uniform(-0.5, 0.9, size=(500, 2))
    pts = pts[eroded.contains(pts)]
    inside_any = np.zeros(len(pts), dtype=bool)
    for cx, cy in centers:
        inside_any |= (np.abs(pts[:, 0] - cx) <= half + 1e-12) \
            & (np.abs(pts[:, 1] - cy) <= half + 1e-12)
    assert inside_any.all()


def test_cover_empty_region_raises():
    with pytest.raises(EmptyCover):
        cover_with_squares(EmptyRegion(), 0.1)


# connectivity ----------------------------------------------------------------

def test_connectivity_disc_stays_connected():
    dom = disc_domain(1.0)
    h0, records = connectivity_scan(dom)
    assert h0 * dom.rho0 > 0.5
    assert all(c in (0, 1) for _, c in records)


def test_connectivity_dumbbell_splits_at_neck():
    verts = [(0, 0), (1.6, 0.45), (3.2, 0), (3.2, 1.2), (1.6, 0.75), (0, 1.2)]
    dom = rounded_polygon_domain(verts, 0.08, rho0=0.3)
    h0, records = connectivity_scan(dom)
    assert 0.05 <= h0 * dom.rho0 <= 0.16  # neck half-width is 0.15
    assert any(c == 2 for _, c in records)


def test_connectivity_empty_interior():
    dom = disc_domain(1.0)
    with pytest.raises(EmptyInterior):
        connectivity_scan(dom, r_values=[1.5, 2.0])


# misc ------------------------------------------------------------------------

def test_require_disc_inside():
    dom = disc_domain(1.0)
    require_disc_inside(dom, (0.2, 0.0), 0.5)
    with pytest.raises(RegionOutsideDomain):
        require_disc_inside(dom, (0.8, 0.0), 0.5)


def test_domain_scale_constants():
    dom = disc_domain(1.0)
    assert dom.rho0 == 0.25
    assert dom.M1 >= dom.area / dom.rho0 ** 2 * (1 - 1e-12)
    with pytest.raises(ValueError):
        disc_domain(1.0, M1=1.0)  # area exceeds M1 rho0^2
