"""Boundary couple fields: the measured Neumann data of a plate.

A couple field carries the twisting and bending moment densities
(M_tau, M_n) as functions of arclength along the domain boundary,
possibly supported on a sub-arc.  The applied load functional on a test
deflection v is

    ell(v) = integral over the boundary of  M_tau v_s - M_n v_n

(v_s tangential, v_n normal derivative).  Compatibility means ell
annihilates affine deflections; the three residuals below measure that.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleLoad
from .fields import parse_expression

_GAUSS8 = np.polynomial.legendre.leggauss(8)


class CoupleField:
    """Pair of arclength profiles (M_n, M_tau) on a boundary curve.

    ``fn_n``/``fn_tau`` are vectorized callables of arclength; outside
    ``support`` (an arclength interval, possibly wrapping) the data is
    forced to zero.  ``extra_breaks`` lists interior arclengths where the
    profiles are not smooth, so quadrature panels can split there.
    """

    def __init__(self, curve, fn_n, fn_tau, support=None, extra_breaks=()):
        self.curve = curve
        self.fn_n = fn_n
        self.fn_tau = fn_tau
        L = curve.length
        if support is not None:
            s0, s1 = float(support[0]) % L, float(support[1]) % L
            if s1 <= s0:
                s1 += L
            self.support = (s0, s1)
        else:
            self.support = None
        self.extra_breaks = tuple(float(b) % L for b in extra_breaks)

    def _mask(self, s):
        if self.support is None:
            return np.ones_like(s, dtype=bool)
        s0, s1 = self.support
        L = self.curve.length
        rel = (s - s0) % L
        return rel <= (s1 - s0)

    def values(self, s):
        """(M_n, M_tau) at arclengths s, zero outside the support."""
        s = np.asarray(s, dtype=float) % self.curve.length
        mn = np.asarray(self.fn_n(s), dtype=float) * 1.0
        mt = np.asarray(self.fn_tau(s), dtype=float) * 1.0
        mn = np.broadcast_to(mn, s.shape).copy()
        mt = np.broadcast_to(mt, s.shape).copy()
        keep = self._mask(s)
        mn[~keep] = 0.0
        mt[~keep] = 0.0
        return mn, mt

    def breakpoints(self):
        """Arclengths where quadrature panels must split."""
        out = set(self.extra_breaks)
        if self.support is not None:
            L = self.curve.length
            out.add(self.support[0] % L)
            out.add(self.support[1] % L)
        return np.array(sorted(out))

    # ------------------------------------------------------------------

    def norms(self, rho0, n=4096):
        """(L2, H^{-1/2}, ratio) norms of the data over the boundary.

        Both components enter; the weak norm is computed spectrally in
        arclength with symbol (1 + (2 pi rho0 k / L)^2)^{-1/4}.  The ratio
        L2 / H^{-1/2} is NaN for identically zero data.
        """
        L = self.curve.length
        s = np.arange(n) * (L / n)
        mn, mt = self.values(s)
        l2sq = 0.0
        wsq = 0.0
        k = np.arange(n // 2 + 1)
        sym = (1.0 + (2.0 * math.pi * rho0 * k / L) ** 2) ** (-0.25)
        mult = np.full(n // 2 + 1, 2.0)
        mult[0] = 1.0
        if n % 2 == 0:
            mult[-1] = 1.0
        for f in (mn, mt):
            l2sq += L * float(np.mean(f * f))
            c = np.fft.rfft(f) / n
            wsq += L * float((mult * (sym * np.abs(c)) ** 2).sum())
        l2 = math.sqrt(l2sq)
        wm = math.sqrt(wsq)
        ratio = l2 / wm if wm > 0 else float("nan")
        return l2, wm, ratio

    def _panels(self, n_per_piece=256):
        L = self.curve.length
        br = np.unique(np.concatenate([self.breakpoints(), [0.0]]))
        pieces = []
        for i in range(len(br)):
            a = br[i]
            b = br[(i + 1) % len(br)]
            span = (b - a) % L
            if span == 0.0:
                span = L
            m = max(8, int(n_per_piece * span / L))
            edges = a + span * np.arange(m + 1) / m
            pieces.append(edges)
        return pieces

    def compatibility_residuals(self):
        """Load functional applied to the affine kernel: (ell(1), ell(x1), ell(x2)).

        ell(1) vanishes identically (constant deflections have no slope);
        the coordinate residuals are quadratures of
        M_tau tau_alpha - M_n n_alpha over the support.
        """
        xg, wg = _GAUSS8
        r = np.zeros(2)
        for edges in self._panels():
            for a, b in zip(edges[:-1], edges[1:]):
                mid = 0.5 * (a + b)
                half = 0.5 * (b - a)
                ss = mid + half * xg
                mn, mt = self.values(ss)
                tau = self.curve.tangent(ss)
                nrm = self.curve.normal(ss)
                for al in range(2):
                    r[al] += half * float(
                        ((mt * tau[:, al] - mn * nrm[:, al]) * wg).sum())
        return 0.0, float(r[0]), float(r[1])

    def check_compatibility(self, tol=1e-8):
        """True when the affine residuals are small against the data scale.

        The scale is ||M||_L2 * sqrt(L); zero data is compatible.
        """
        L = self.curve.length
        l2, _, _ = self.norms(rho0=1.0)
        r0, r1, r2 = self.compatibility_residuals()
        scale = l2 * math.sqrt(L)
        if scale == 0.0:
            return True, (r0, r1, r2)
        ok = max(abs(r1), abs(r2)) <= tol * scale
        return ok, (r0, r1, r2)

    def require_compatible(self, tol=1e-8):
        ok, resid = self.check_compatibility(tol)
        if not ok:
            raise IncompatibleLoad(
                "affine residuals %s exceed tolerance" % (resid,))


# ---------------------------------------------------------------------------
# constructors


def couple_from_expressions(curve, expr_n, expr_tau, support=None):
    """Couple field from expression strings in the arclength fraction u.

    The expressions may use u (arclength / perimeter, in [0,1)) as x1; x2
    is unused.  ``support`` is an (s0, s1) arclength interval.
    """
    f_n = parse_expression(expr_n)
    f_t = parse_expression(expr_tau)
    L = curve.length

    def fn_n(s):
        u = np.asarray(s) / L
        return np.array([f_n(float(ui), 0.0) for ui in np.atleast_1d(u)])

    def fn_tau(s):
        u = np.asarray(s) / L
        return np.array([f_t(float(ui), 0.0) for ui in np.atleast_1d(u)])

    return CoupleField(curve, fn_n, fn_tau, support=support)


def pure_bending_couple(curve, plate, hessian):
    """Boundary data whose exact solution is the quadratic with this Hessian.

    For a spatially constant plate tensor P the moment tensor
    S = P * hessian is constant and the matching data is
    M_n = -(S n) . n,  M_tau = (S n) . tau.
    """
    H = np.asarray(hessian, dtype=float)
    if H.shape != (2, 2) or abs(H[0, 1] - H[1, 0]) > 1e-14:
        raise ValueError("hessian must be symmetric 2x2")
    S = plate.apply(np.zeros(2), H)

    def fn_n(s):
        nrm = np.atleast_2d(curve.normal(s))
        sn = nrm @ S.T
        return -(sn * nrm).sum(axis=1)

    def fn_tau(s):
        nrm = np.atleast_2d(curve.normal(s))
        tau = np.atleast_2d(curve.tangent(s))
        sn = nrm @ S.T
        return (sn * tau).sum(axis=1)

    return CoupleField(curve, fn_n, fn_tau)


def trig_couple(curve, modes, coef_n, coef_tau, support=None):
    """Trigonometric couple data: sums of cos/sin in the arclength angle.

    ``modes`` lists integer wavenumbers; ``coef_n``/``coef_tau`` are
    (len(modes), 2) arrays of cosine and sine amplitudes for each
    component.  On a circle, modes >= 2 with no support restriction are
    exactly compatible.
    """
    modes = np.asarray(modes, dtype=int)
    cn = np.asarray(coef_n, dtype=float).reshape(len(modes), 2)
    ct = np.asarray(coef_tau, dtype=float).reshape(len(modes), 2)
    L = curve.length

    def make(coefs):
        def fn(s):
            th = 2.0 * math.pi * np.asarray(s, dtype=float) / L
            out = np.zeros_like(th)
            for m, (a, b) in zip(modes, coefs):
                out += a * np.cos(m * th) + b * np.sin(m * th)
            return out
        return fn

    return CoupleField(curve, make(cn), make(ct), support=support)
