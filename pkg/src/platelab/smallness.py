"""Empirical quantitative unique continuation for the background solution.

Three-spheres checks on concentric disc integrals, propagation-of-
smallness scans over interior centers, the frequency-ratio table, the
weak-norm boundary data check, and the disc-chain budget arithmetic.
Everything here post-processes an immutable solved state; the analytic
exponents delta and delta_chi are inputs, never derived, and every
quantity that depends on them is labeled empirical.

Radius conventions: scan radii (three_spheres_sample, lps_scan,
frequency_scan, large_rho_branch) are physical lengths in the domain's
units; chain_budget works in the same rho0-scaled units as the chain
constants, so divide physical radii by dom.rho0 before calling it.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .chains import final_radius, k_of_rho
from .errors import (
    ConfigError,
    DegenerateScan,
    EmptyInterior,
    GeometryViolation,
    InfeasibleFit,
    RhoTooLarge,
    ZeroSolution,
)
from .domains import require_disc_inside


@dataclass
class ThreeSpheresSample:
    """Disc integrals of |hessian|^2 on three concentric radii."""

    center: tuple
    r1: float
    r2: float
    r3: float
    I1: float
    I2: float
    I3: float

    @property
    def vacuous(self):
        return self.I3 <= 0.0


def three_spheres_sample(sol, dom, center, r1, r2, r3):
    """Sample the three nested disc integrals at one center.

    The largest disc must sit inside the domain; nesting makes
    I1 <= I2 <= I3 automatic.
    """
    if not (0.0 < r1 < r2 < r3):
        raise ConfigError("radii must satisfy 0 < r1 < r2 < r3, got %g, %g, %g"
                          % (r1, r2, r3))
    require_disc_inside(dom, center, r3)
    c = np.asarray(center, dtype=float).reshape(1, 2)
    vals = [float(sol.disc_integrals(c, r)[0]) for r in (r1, r2, r3)]
    return ThreeSpheresSample(center=(float(c[0, 0]), float(c[0, 1])),
                              r1=r1, r2=r2, r3=r3,
                              I1=vals[0], I2=vals[1], I3=vals[2])


@dataclass
class ThreeSpheresFit:
    C: float
    delta: float
    feasible: bool
    max_residual: float
    n_samples: int


def three_spheres_fit(samples, min_samples=5, n_grid=1999, tol=1e-9,
                      raise_infeasible=True):
    """Fit (C, delta) so I2 <= C * I1^delta * I3^(1-delta) on all samples.

    Works on the log residuals g_i(delta) = log I2 - delta log I1
    - (1-delta) log I3 over a delta grid in (0,1).  When some delta
    keeps every residual within tol of zero, the largest such delta is
    returned (the most informative feasible exponent) with the smallest
    covering C >= 1.  Otherwise the min-max pair covers the samples
    with C > 1 but the fit is flagged infeasible; by default that
    raises InfeasibleFit, which callers running scans should catch and
    report rather than abort on.
    """
    live = [s for s in samples if s.I1 > 0.0]
    if len(live) < min_samples:
        raise DegenerateScan(
            "three-spheres fit needs at least %d samples with I1 > 0, got %d"
            % (min_samples, len(live))
        )
    logs = np.log(np.array([[s.I1, s.I2, s.I3] for s in live]))
    deltas = np.linspace(0.0, 1.0, n_grid + 2)[1:-1]
    # residual matrix: rows samples, columns delta grid
    g = (logs[:, 1, None]
         - deltas[None, :] * logs[:, 0, None]
         - (1.0 - deltas[None, :]) * logs[:, 2, None])
    phi = g.max(axis=0)
    feas = phi <= tol
    if feas.any():
        j = int(np.flatnonzero(feas)[-1])
        return ThreeSpheresFit(C=float(math.exp(max(phi[j], 0.0))),
                               delta=float(deltas[j]), feasible=True,
                               max_residual=float(phi[j]), n_samples=len(live))
    j = int(np.argmin(phi))
    fit = ThreeSpheresFit(C=float(math.exp(phi[j])), delta=float(deltas[j]),
                          feasible=False, max_residual=float(phi[j]),
                          n_samples=len(live))
    if raise_infeasible:
        raise InfeasibleFit(
            "no exponent in (0,1) covers the samples with C = 1; "
            "tightest needs C = %g at delta = %g" % (fit.C, fit.delta)
        )
    return fit


def hex_lattice(bounds, spacing):
    """Hexagonal point lattice covering a (minx, miny, maxx, maxy) box."""
    x0, y0, x1, y1 = bounds
    dy = spacing * math.sqrt(3.0) / 2.0
    rows = []
    ny = max(int(math.ceil((y1 - y0) / dy)) + 1, 1)
    nx = max(int(math.ceil((x1 - x0) / spacing)) + 2, 1)
    for j in range(ny):
        y = y0 + j * dy
        off = 0.5 * spacing if j % 2 else 0.0
        x = x0 + off + spacing * np.arange(nx)
        rows.append(np.column_stack([x, np.full(nx, y)]))
    return np.vstack(rows)


@dataclass
class LpsScan:
    """Min over interior centers of the rho-disc share of Hessian energy."""

    rho: float
    ratio: float
    center: tuple
    n_centers: int
    total: float


def lps_scan(sol, dom, rho, consts):
    """Scan B_rho(x) / whole-domain Hessian energy over deep centers.

    Centers run over a hexagonal lattice of spacing rho/2 inside the
    interior envelope at depth s*rho, so every disc is well separated
    from the boundary.  rho is a physical length.
    """
    if rho <= 0.0:
        raise ConfigError("scan radius must be positive, got %g" % rho)
    depth = consts.s * rho
    env = dom.envelope(depth)
    if env.is_empty():
        raise EmptyInterior("no interior left at envelope depth %g" % depth)
    pts = hex_lattice(env.bounds(), rho / 2.0)
    keep = env.contains(pts)
    if not keep.any():
        # envelope thinner than the lattice spacing: fall back to one
        # representative interior point
        rep = env.to_shapely().representative_point()
        pts = np.array([[rep.x, rep.y]])
        keep = np.array([True])
    centers = pts[keep]
    total = sol.hessian_integral()
    if total <= 0.0:
        raise ZeroSolution("solution has no Hessian energy to propagate")
    vals = sol.disc_integrals(centers, rho)
    i = int(np.argmin(vals))
    return LpsScan(rho=rho, ratio=float(vals[i] / total),
                   center=(float(centers[i, 0]), float(centers[i, 1])),
                   n_centers=len(centers), total=total)


@dataclass
class LpsFit:
    """Empirical envelope ratio >= C / exp(A * (rho0/rho)^B)."""

    A: float
    B: float
    C: float
    feasible: bool
    power_law: bool
    slope_loglog: float
    n: int


def lps_fit(scans, rho0, min_points=5):
    """Fit the propagation-of-smallness envelope over a radius grid.

    C comes from the largest scanned radius; the exponent B is the
    slope of log(-log(ratio/C)) against log(rho0/rho) on the remaining
    points, and A is then raised until the envelope clears every
    sample.  A near-perfect power law ratio ~ rho^p (constant-Hessian
    solutions) leaves B unidentified and is flagged instead.
    """
    if len(scans) < min_points:
        raise DegenerateScan(
            "envelope fit needs at least %d radii, got %d"
            % (min_points, len(scans))
        )
    order = np.argsort([s.rho for s in scans])
    rho = np.array([scans[i].rho for i in order])
    ratio = np.array([scans[i].ratio for i in order])
    if np.any(ratio <= 0.0):
        raise DegenerateScan("nonpositive scan ratio; solution too rough")
    C = float(ratio[-1]) * (1.0 + 1e-9)
    x = np.log(rho0 / rho)
    u = -np.log(ratio / C)

    lr = np.log(ratio)
    lrho = np.log(rho)
    design = np.vstack([lrho, np.ones_like(lrho)]).T
    coef, res, _, _ = np.linalg.lstsq(design, lr, rcond=None)
    ss_tot = float(((lr - lr.mean()) ** 2).sum())
    ss_res = float(res[0]) if res.size else float(((design @ coef - lr) ** 2).sum())
    power_law = ss_tot > 0.0 and ss_res <= 1e-6 * ss_tot
    slope = float(coef[0])

    mask = u > 1e-12
    mask[-1] = False  # the anchor point carries no information about B
    if mask.sum() >= 2 and np.ptp(x[mask]) > 1e-12:
        dxy = np.vstack([x[mask], np.ones(int(mask.sum()))]).T
        bcoef, _, _, _ = np.linalg.lstsq(dxy, np.log(u[mask]), rcond=None)
        B = float(bcoef[0])
    else:
        B = 0.0
        power_law = True
    expo = np.power(rho0 / rho, B)
    A = float(np.max(u / expo))
    envelope = C * np.exp(-A * expo)
    feasible = bool(np.all(ratio >= envelope * (1.0 - 1e-9)))
    return LpsFit(A=A, B=B, C=C, feasible=feasible, power_law=power_law,
                  slope_loglog=slope, n=len(scans))


@dataclass
class FrequencyScan:
    """Interior-envelope share of the Hessian energy per depth."""

    r: np.ndarray
    ratio: np.ndarray
    rho_tilde_emp: float

    def rows(self):
        return list(zip(self.r.tolist(), self.ratio.tolist()))


def frequency_scan(sol, dom, r_grid=None):
    """Table of ratio(r) = energy in the depth-r envelope over the total.

    rho_tilde_emp is the largest grid depth that keeps the ratio at or
    above one half for itself and every smaller sampled depth.
    """
    if r_grid is None:
        r_grid = np.linspace(0.0, 2.0 * dom.rho0, 21)
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid < 0.0):
        raise ConfigError("envelope depths must be nonnegative")
    r_grid = np.unique(r_grid)
    total = sol.hessian_integral()
    if total <= 0.0:
        raise ZeroSolution("solution has no Hessian energy")
    ratios = np.empty_like(r_grid)
    for i, r in enumerate(r_grid):
        if r == 0.0:
            ratios[i] = 1.0
            continue
        env = dom.envelope(float(r))
        ratios[i] = sol.hessian_integral(region=env) / total if not env.is_empty() else 0.0
    ok = ratios >= 0.5
    good = np.cumprod(ok).astype(bool)
    rho_tilde = float(r_grid[np.flatnonzero(good)[-1]]) if good.any() else 0.0
    return FrequencyScan(r=r_grid, ratio=ratios, rho_tilde_emp=rho_tilde)


def boundary_data_bound_check(couple, sol, rho0):
    """Weak boundary norm of the data over the solution's Hessian norm.

    The ratio is invariant under scaling the data, so a family sharing
    one domain should produce comparable values; boundedness across the
    family is the empirical content.
    """
    total = sol.hessian_integral()
    if total <= 0.0:
        raise ZeroSolution("solution has no Hessian energy")
    _, weak, _ = couple.norms(rho0)
    return weak / math.sqrt(total)


@dataclass
class ChainBudget:
    """Pure arithmetic of the disc-chain propagation argument.

    Counts are the integer parts of their upper-bound formulas, so the
    stated inequalities hold by construction.  Cfinal is the composite
    smallness exponent delta_chi^(k-1) * delta^(k+L-1); log_Cfinal
    carries it when the plain value underflows.
    """

    rho: float
    rho_star: float
    k_rho: int
    r_k: float
    L: int
    Ltilde: int
    N: int
    delta: float
    delta_chi: float
    A1: float
    B1: float
    A: float
    B: float
    Cfinal: float
    log_Cfinal: float

    def to_dict(self):
        return {
            "rho": self.rho, "rho_star": self.rho_star,
            "k_rho": self.k_rho, "r_k": self.r_k,
            "L": self.L, "Ltilde": self.Ltilde, "N": self.N,
            "delta": self.delta, "delta_chi": self.delta_chi,
            "A1": self.A1, "B1": self.B1, "A": self.A, "B": self.B,
            "Cfinal": self.Cfinal, "log_Cfinal": self.log_Cfinal,
        }


def chain_budget(rho, consts, M1, delta, delta_chi, A1=1.0, B1=1.0,
                 rho_tilde=None, c_tilde=None):
    """Disc counts and composite exponents for a given scan radius.

    All radii here are rho0-scaled.  rho must not exceed the smallest
    of the chain bound, rho_tilde/(s+1) when a frequency scan supplied
    one, and the configured stand-in c_tilde.  delta and delta_chi are
    assumed or fitted smallness exponents in (0,1).
    """
    for name, val in (("delta", delta), ("delta_chi", delta_chi)):
        if not (0.0 < val < 1.0):
            raise ConfigError("%s must lie in (0,1), got %g" % (name, val))
    caps = [consts.rho_bar]
    if rho_tilde is not None:
        caps.append(rho_tilde / (consts.s + 1.0))
    if c_tilde is not None:
        caps.append(c_tilde)
    rho_star = min(caps)
    if rho > rho_star * (1.0 + 1e-12):
        raise RhoTooLarge("rho %g exceeds rho* %g" % (rho, rho_star))
    k = k_of_rho(rho, consts)
    r_k = final_radius(rho, consts)
    L = int(M1 / (math.pi * r_k ** 2))
    Ltilde = int(M1 / (math.pi * r_k ** 2))
    N = int(M1 / (2.0 * rho ** 2))
    A = 3.0 * math.exp(A1 * abs(math.log(delta_chi)))
    B = abs(math.log(delta_chi)) * B1 + 1.0
    log_c = (k - 1) * math.log(delta_chi) + (k + L - 1) * math.log(delta)
    return ChainBudget(
        rho=rho, rho_star=rho_star, k_rho=k, r_k=r_k,
        L=L, Ltilde=Ltilde, N=N,
        delta=delta, delta_chi=delta_chi, A1=A1, B1=B1, A=A, B=B,
        Cfinal=math.exp(log_c) if log_c > -745.0 else 0.0,
        log_Cfinal=log_c,
    )


@dataclass
class LargeRhoBranch:
    C_fallback: float
    diam: float
    C2: float
    bound_at_rho: float


def domain_diameter(dom):
    """Diameter of the domain from its boundary polyline hull."""
    from scipy.spatial import ConvexHull

    pts = np.asarray(dom.shapely_polygon().exterior.coords)
    hull = pts[ConvexHull(pts).vertices]
    # Rotating calipers: on a smooth boundary nearly every polyline point
    # is a hull vertex, so the all-pairs distance matrix is not an option.
    hx = hull[:, 0].tolist()
    hy = hull[:, 1].tolist()
    n = len(hx)
    if n == 1:
        return 0.0
    if n == 2:
        return math.hypot(hx[1] - hx[0], hy[1] - hy[0])
    best = 0.0
    j = 1
    for i in range(n):
        i2 = (i + 1) % n
        ex = hx[i2] - hx[i]
        ey = hy[i2] - hy[i]
        while True:
            jn = (j + 1) % n
            if (ex * (hy[jn] - hy[i]) - ey * (hx[jn] - hx[i])
                    <= ex * (hy[j] - hy[i]) - ey * (hx[j] - hx[i])):
                break
            j = jn
        for (px, py) in ((hx[i], hy[i]), (hx[i2], hy[i2])):
            d2 = (px - hx[j]) ** 2 + (py - hy[j]) ** 2
            if d2 > best:
                best = d2
    return math.sqrt(best)


def large_rho_branch(rho, rho_star, consts, dom, c_star, A, B, C2=None):
    """Fallback envelope constant for radii above the scan threshold.

    Valid while the chain still fits: 2*s*rho must not exceed the
    domain diameter.  c_star is the scanned min ratio at rho_star, and
    (A, B) the fitted exponents; the returned constant keeps
    C * exp(-A (rho0/rho)^B) below c_star on the whole branch.  Radii
    are physical; C2 is the scaled diameter bound (measured when not
    given).
    """
    if rho <= rho_star:
        raise ConfigError("large-rho branch needs rho > rho* (%g <= %g)"
                          % (rho, rho_star))
    diam = domain_diameter(dom)
    if 2.0 * consts.s * rho > diam * (1.0 + 1e-12):
        raise GeometryViolation(
            "chain span 2*s*rho = %g exceeds the domain diameter %g"
            % (2.0 * consts.s * rho, diam)
        )
    if C2 is None:
        C2 = diam / dom.rho0
    elif diam > C2 * dom.rho0 * (1.0 + 1e-12):
        raise GeometryViolation(
            "measured diameter %g exceeds the configured bound %g"
            % (diam, C2 * dom.rho0)
        )
    C = c_star * math.exp(A * (2.0 * consts.s / C2) ** B)
    bound = C * math.exp(-A * (dom.rho0 / rho) ** B)
    return LargeRhoBranch(C_fallback=C, diam=diam, C2=float(C2),
                          bound_at_rho=bound)
