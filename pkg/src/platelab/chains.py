"""Cones, disc chains, and the geometric constants that size them.

All scalar constants here are expressed in units of the domain scale
rho0; physical lengths appear only in ``build_chain``, which converts via
the domain.  The aperture/opening constants come in closed form from the
graph bound M0; two exact identities tie them together,
chi = (s+1)/(s-1) and 2/(chi-1) = s-1, which is what makes consecutive
chain discs internally tangent.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryViolation, RhoTooLarge, VertexQuery


@dataclass(frozen=True)
class GeometricConstants:
    """Scaled constants of a domain: everything is a multiple of rho0."""
    M0: float
    h0: float          # connectivity scale of the interior envelopes
    theta0: float      # aperture of the boundary access cones
    theta1: float      # aperture of the chain cone, sin(theta1) = 1/s
    s: float           # vertex-distance ratio |x_k - xtilde| / r_k
    chi: float         # radius growth factor of consecutive chain discs
    tau_chain: float   # lower bound scale for the final chain radius
    rho1: float
    rho2: float
    rho3: float
    rho4: float
    rho_bar: float     # min of rho1..rho4, the admissible starting radius


def geometric_constants(M0, h0):
    """Closed-form chain constants from the graph bound and h0.

    theta0 = arctan(1/M0); s solves the tangency relation and chi, theta1
    follow from it.  The four radius ceilings and their minimum rho_bar
    bound the admissible starting radius of a chain.
    """
    if M0 <= 0 or h0 <= 0:
        raise ValueError("M0 and h0 must be positive")
    theta0 = math.atan(1.0 / M0)
    sn = math.sin(theta0)
    s = (5.0 + sn + math.sqrt(sn * sn + 30.0 * sn + 25.0)) / (2.0 * sn)
    chi = s * sn / 5.0
    theta1 = math.asin(1.0 / s)
    tau = (chi - 1.0) * h0 / (16.0 * (6.0 * chi - 4.0))
    rho1 = 1.0 / (16.0 * s)
    rho2 = 1.0 / (8.0 * (6.0 * chi + s + 1.0))
    rho3 = h0 / (16.0 * s)
    rho4 = (chi - 1.0) * h0 / 16.0
    return GeometricConstants(
        M0=M0, h0=h0, theta0=theta0, theta1=theta1, s=s, chi=chi,
        tau_chain=tau, rho1=rho1, rho2=rho2, rho3=rho3, rho4=rho4,
        rho_bar=min(rho1, rho2, rho3, rho4))


def k_of_rho(rho, consts):
    """Number of chain discs needed to grow from radius rho to the cap.

    rho is in units of rho0 and must satisfy 0 < rho <= rho_bar.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if rho > consts.rho_bar * (1 + 1e-12):
        raise RhoTooLarge("rho = %.6g exceeds rho_bar = %.6g"
                          % (rho, consts.rho_bar))
    chi = consts.chi
    arg = ((chi - 1.0) / (6.0 * chi - 4.0)) * (
        consts.h0 / (8.0 * rho) - consts.s + 1.0 + 2.0 / (chi - 1.0))
    if arg <= 1.0:
        return 1
    return int(math.floor(math.log(arg) / math.log(chi))) + 1


def final_radius(rho, consts):
    """Radius of the last chain disc, chi^(k-1) * rho, in rho0 units."""
    return consts.chi ** (k_of_rho(rho, consts) - 1) * rho


@dataclass(frozen=True)
class Cone:
    """Open cone with unit axis and half-aperture in (0, pi/2)."""
    vertex: np.ndarray
    axis: np.ndarray
    half_angle: float

    @staticmethod
    def make(vertex, axis, half_angle):
        vertex = np.asarray(vertex, dtype=float)
        axis = np.asarray(axis, dtype=float)
        n = np.linalg.norm(axis)
        if n == 0:
            raise ValueError("cone axis must be nonzero")
        if not 0.0 < half_angle < math.pi / 2.0:
            raise ValueError("half-angle must be in (0, pi/2)")
        return Cone(vertex, axis / n, float(half_angle))


def cone_contains(cone, pts, tol=0.0):
    """Strict membership of points in the open cone.

    A point exactly on the boundary ray is outside; querying the vertex
    itself raises VertexQuery.  ``tol`` relaxes the angular comparison.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    rel = pts - cone.vertex
    r = np.linalg.norm(rel, axis=1)
    if np.any(r == 0.0):
        raise VertexQuery("cone membership queried at the vertex")
    ca = (rel @ cone.axis) / r
    return ca > math.cos(cone.half_angle) - tol


@dataclass
class DiscChain:
    """Chain of internally tangent discs marching out of a cone vertex."""
    points: np.ndarray     # (k, 2) disc centers
    radii: np.ndarray      # (k,) physical radii
    vertex: np.ndarray     # cone vertex (xtilde)
    cone: Cone
    consts: GeometricConstants

    def tangency_residual(self):
        """max_j | |x_{j+1}-x_j| - (r_j + r_{j+1}) | / r_j, 0 for k=1."""
        if len(self.radii) < 2:
            return 0.0
        gaps = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        want = self.radii[:-1] + self.radii[1:]
        return float(np.max(np.abs(gaps - want) / self.radii[:-1]))

    def vertex_residual(self):
        """max_j | |x_j - xtilde| - s r_j | / r_j."""
        d = np.linalg.norm(self.points - self.vertex, axis=1)
        return float(np.max(np.abs(d - self.consts.s * self.radii) / self.radii))


def build_chain(dom, x, xtilde, rho, consts):
    """Build the disc chain from x toward the interior, vertex at xtilde.

    ``rho`` is the starting radius in rho0 units; x must sit at distance
    s * rho * rho0 from xtilde (relative tolerance 1e-9).  Radii grow by
    chi; centers stay on the ray from xtilde through x at distance
    s * r_j, which makes consecutive discs internally tangent.  Every
    enlarged disc B_{5 chi r_j} (the last one B_{5 r_k}) must lie inside
    the domain, else GeometryViolation.
    """
    x = np.asarray(x, dtype=float)
    xtilde = np.asarray(xtilde, dtype=float)
    gap = x - xtilde
    dist = float(np.linalg.norm(gap))
    want = consts.s * rho * dom.rho0
    if dist == 0.0 or abs(dist - want) > 1e-9 * want:
        raise ValueError(
            "|x - xtilde| = %.12g but s * rho * rho0 = %.12g" % (dist, want))
    xi = gap / dist
    k = k_of_rho(rho, consts)
    j = np.arange(1, k + 1)
    radii = consts.chi ** (j - 1) * rho * dom.rho0
    points = xtilde[None, :] + consts.s * radii[:, None] * xi[None, :]

    guard = 5.0 * consts.chi * radii
    guard[-1] = 5.0 * radii[-1]
    inside = dom.inside(points)
    depth = dom.boundary_distance(points)
    bad = [int(i) for i in range(k)
           if not inside[i] or depth[i] < guard[i] * (1 - 1e-12)]
    if bad:
        raise GeometryViolation(
            "chain discs %s escape the domain (first offending center %s)"
            % (bad, points[bad[0]]))

    cone = Cone.make(xtilde, xi, consts.theta1)
    return DiscChain(points=points, radii=radii, vertex=xtilde,
                     cone=cone, consts=consts)
