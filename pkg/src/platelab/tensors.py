"""Fourth-order elasticity tensor fields on the plane and their hypotheses.

With full minor and major symmetry a plane elasticity tensor has six
independent components; we store those as scalar fields keyed by index:

    c1111  c1122  c1112  c2212  c1212  c2222

Everything else (the quadratic form on symmetric matrices, the ellipticity
constant, the regularity budget, the quartic symbol and its dichotomy test,
stiff/soft contrast classification) is derived from these six.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLeadingCoefficient, InvalidJump, NonElliptic
from .fields import ConstantField, ScalarField, as_field

SQRT2 = np.sqrt(2.0)

# every (i,j,k,l) with i,j,k,l in {1,2} maps onto one stored component
_INDEX_MAP = {
    (1, 1, 1, 1): "c1111",
    (2, 2, 2, 2): "c2222",
    (1, 1, 2, 2): "c1122", (2, 2, 1, 1): "c1122",
    (1, 1, 1, 2): "c1112", (1, 1, 2, 1): "c1112",
    (1, 2, 1, 1): "c1112", (2, 1, 1, 1): "c1112",
    (2, 2, 1, 2): "c2212", (2, 2, 2, 1): "c2212",
    (1, 2, 2, 2): "c2212", (2, 1, 2, 2): "c2212",
    (1, 2, 1, 2): "c1212", (1, 2, 2, 1): "c1212",
    (2, 1, 1, 2): "c1212", (2, 1, 2, 1): "c1212",
}

COMPONENT_NAMES = ("c1111", "c1122", "c1112", "c2212", "c1212", "c2222")


class _Scaled(ScalarField):
    def __init__(self, base, factor):
        self.base = base
        self.factor = float(factor)

    def value(self, x):
        return self.factor * self.base.value(x)

    def values(self, pts):
        return self.factor * self.base.values(pts)

    def gradient(self, x):
        return self.factor * self.base.gradient(x)

    def hessian(self, x):
        return self.factor * self.base.hessian(x)


class TensorField:
    """Six scalar component fields with symmetry-aware access."""

    def __init__(self, c1111, c1122, c1112, c2212, c1212, c2222):
        self.c1111 = as_field(c1111)
        self.c1122 = as_field(c1122)
        self.c1112 = as_field(c1112)
        self.c2212 = as_field(c2212)
        self.c1212 = as_field(c1212)
        self.c2222 = as_field(c2222)

    @classmethod
    def isotropic(cls, lam, mu):
        """Lame parameters; c1111 = c2222 = lam + 2 mu, c1122 = lam, c1212 = mu."""
        return cls(lam + 2.0 * mu, lam, 0.0, 0.0, mu, lam + 2.0 * mu)

    @classmethod
    def orthotropic(cls, c1111, c1122, c2222, c1212):
        """Axis-aligned orthotropic tensor (both odd components vanish)."""
        return cls(c1111, c1122, 0.0, 0.0, c1212, c2222)

    @classmethod
    def from_dict(cls, spec):
        """Build from a mapping of component name to number/expression."""
        missing = [k for k in COMPONENT_NAMES if k not in spec]
        if missing:
            raise KeyError("missing tensor components: %s" % ", ".join(missing))
        return cls(**{k: spec[k] for k in COMPONENT_NAMES})

    def component(self, i, j, k, l):
        """Component field C_{ijkl}, indices in {1, 2}."""
        return getattr(self, _INDEX_MAP[(i, j, k, l)])

    def component_value(self, i, j, k, l, x):
        return self.component(i, j, k, l).value(x)

    def scaled(self, factor):
        """Tensor field multiplied pointwise by a constant factor."""
        return TensorField(*[_Scaled(getattr(self, n), factor)
                             for n in COMPONENT_NAMES])

    def is_constant(self):
        return all(isinstance(getattr(self, n), ConstantField)
                   for n in COMPONENT_NAMES)

    # -- quadratic form ------------------------------------------------

    def voigt(self, x):
        """3x3 symmetric matrix Q of the quadratic form at x.

        Symmetric 2x2 matrices A embed as v = (A11, A22, sqrt2*A12); then
        (CA) . A = v^T Q v and the matrix CA itself is recovered from Q v.
        """
        a = self.c1111.value(x)
        b = self.c1122.value(x)
        c = self.c1112.value(x)
        d = self.c2212.value(x)
        e = self.c1212.value(x)
        f = self.c2222.value(x)
        return np.array([
            [a, b, SQRT2 * c],
            [b, f, SQRT2 * d],
            [SQRT2 * c, SQRT2 * d, 2.0 * e],
        ])

    def voigt_many(self, pts):
        """Stacked Voigt matrices, shape (n, 3, 3)."""
        pts = np.asarray(pts, dtype=float)
        vals = {n: getattr(self, n).values(pts) for n in COMPONENT_NAMES}
        n = len(pts)
        Q = np.empty((n, 3, 3))
        Q[:, 0, 0] = vals["c1111"]
        Q[:, 1, 1] = vals["c2222"]
        Q[:, 2, 2] = 2.0 * vals["c1212"]
        Q[:, 0, 1] = Q[:, 1, 0] = vals["c1122"]
        Q[:, 0, 2] = Q[:, 2, 0] = SQRT2 * vals["c1112"]
        Q[:, 1, 2] = Q[:, 2, 1] = SQRT2 * vals["c2212"]
        return Q

    def apply(self, x, A):
        """The 2x2 matrix C(x) A for a symmetric 2x2 matrix A."""
        A = np.asarray(A, dtype=float)
        v = np.array([A[0, 0], A[1, 1], SQRT2 * A[0, 1]])
        q = self.voigt(x) @ v
        return np.array([[q[0], q[2] / SQRT2], [q[2] / SQRT2, q[1]]])

    # -- quartic symbol ------------------------------------------------

    def symbol_coefficients(self, x):
        """Coefficients (a0..a4) of the direction quartic at x."""
        return np.array([
            self.c1111.value(x),
            4.0 * self.c1112.value(x),
            2.0 * self.c1122.value(x) + 4.0 * self.c1212.value(x),
            4.0 * self.c2212.value(x),
            self.c2222.value(x),
        ])


def voigt_embed(A):
    """Embed a symmetric 2x2 matrix as the Voigt vector (A11, A22, sqrt2*A12)."""
    A = np.asarray(A, dtype=float)
    return np.array([A[0, 0], A[1, 1], SQRT2 * A[0, 1]])


def symbol_matrix(a):
    """7x7 resultant-style matrix of the quartic and its derivative.

    Rows 0..2 carry the quartic coefficients (a0..a4) shifted right by the
    row index; rows 3..6 carry the derivative coefficients
    (4a0, 3a1, 2a2, a3) likewise shifted.
    """
    a0, a1, a2, a3, a4 = [float(v) for v in a]
    S = np.zeros((7, 7))
    quartic = (a0, a1, a2, a3, a4)
    deriv = (4.0 * a0, 3.0 * a1, 2.0 * a2, a3)
    for r in range(3):
        S[r, r:r + 5] = quartic
    for r in range(4):
        S[3 + r, r:r + 4] = deriv
    return S


def det_complete_pivot(M):
    """Determinant by Gaussian elimination with complete pivoting."""
    A = np.array(M, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    sign = 1.0
    det = 1.0
    for k in range(n):
        sub = np.abs(A[k:, k:])
        flat = int(np.argmax(sub))
        i = k + flat // (n - k)
        j = k + flat % (n - k)
        piv = A[i, j]
        if piv == 0.0:
            return 0.0
        if i != k:
            A[[k, i], :] = A[[i, k], :]
            sign = -sign
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            sign = -sign
        det *= A[k, k]
        if k + 1 < n:
            A[k + 1:, k:] -= np.outer(A[k + 1:, k] / A[k, k], A[k, k:])
    return sign * det


def dichotomy_value(tensor, x):
    """Scaled symbol-matrix determinant |det S| / a0 at a point.

    Vanishes exactly when the direction quartic has a repeated complex
    root; scales like c^6 when the tensor is scaled by c.
    """
    a = tensor.symbol_coefficients(x)
    if a[0] == 0.0:
        raise DegenerateLeadingCoefficient(
            "leading symbol coefficient vanishes at %s" % (np.asarray(x),))
    return abs(det_complete_pivot(symbol_matrix(a))) / a[0]


@dataclass
class DichotomyReport:
    """Outcome of sampling the dichotomy quantity over a point set."""
    status: str                      # PositiveEverywhere | IdenticallyZero | Violated
    min_value: float                 # raw minimum of the sampled values
    min_normalized: float            # minimum of value / a0^6 (scale free)
    witnesses: list = field(default_factory=list)  # (point, value) extremes


def classify_dichotomy(tensor, pts, zero_tol=1e-10):
    """Sample the dichotomy quantity and classify the tensor field.

    Values are normalized by a0(x)^6 before comparing with ``zero_tol`` so
    the verdict is invariant under scaling the tensor.  Witness entries
    record the extreme sample points.
    """
    pts = np.asarray(pts, dtype=float)
    vals = np.empty(len(pts))
    norm = np.empty(len(pts))
    for i, p in enumerate(pts):
        a = tensor.symbol_coefficients(p)
        if a[0] == 0.0:
            raise DegenerateLeadingCoefficient(
                "leading symbol coefficient vanishes at %s" % (p,))
        v = abs(det_complete_pivot(symbol_matrix(a))) / a[0]
        vals[i] = v
        norm[i] = v / a[0] ** 6
    small = norm <= zero_tol
    imin = int(np.argmin(norm))
    imax = int(np.argmax(norm))
    witnesses = [(pts[imin].copy(), float(vals[imin])),
                 (pts[imax].copy(), float(vals[imax]))]
    if not small.any():
        status = "PositiveEverywhere"
    elif small.all():
        status = "IdenticallyZero"
    else:
        status = "Violated"
        bad = int(np.argmin(norm))
        good = int(np.argmax(norm))
        witnesses = [(pts[bad].copy(), float(vals[bad])),
                     (pts[good].copy(), float(vals[good]))]
    return DichotomyReport(status, float(vals[imin]), float(norm[imin]), witnesses)


def ellipticity_gamma(tensor, pts):
    """Smallest eigenvalue of the Voigt form over the samples.

    Returns (gamma, witness_point).  Raises NonElliptic when the minimum
    is not strictly positive.
    """
    pts = np.asarray(pts, dtype=float)
    Q = tensor.voigt_many(pts)
    eigs = np.linalg.eigvalsh(Q)[:, 0]
    i = int(np.argmin(eigs))
    gamma = float(eigs[i])
    if gamma <= 0.0:
        raise NonElliptic("quadratic form has min eigenvalue %.6g at %s"
                          % (gamma, pts[i]))
    return gamma, pts[i].copy()


def regularity_M(tensor, pts, rho0, grad_pts=None):
    """Regularity budget: sum over all 16 components of
    sup|C| + rho0 sup|grad C| + rho0^2 sup|hess C| over the samples.

    Derivative sups use ``grad_pts`` when given (a coarser set keeps
    finite differencing affordable), else ``pts``.
    """
    pts = np.asarray(pts, dtype=float)
    gpts = pts if grad_pts is None else np.asarray(grad_pts, dtype=float)
    sup0 = {}
    sup1 = {}
    sup2 = {}
    for name in COMPONENT_NAMES:
        f = getattr(tensor, name)
        sup0[name] = float(np.max(np.abs(f.values(pts)))) if len(pts) else 0.0
        if isinstance(f, ConstantField):
            sup1[name] = 0.0
            sup2[name] = 0.0
        else:
            g = max(float(np.linalg.norm(f.gradient(p))) for p in gpts)
            h = max(float(np.linalg.norm(f.hessian(p))) for p in gpts)
            sup1[name] = g
            sup2[name] = h
    total = 0.0
    for idx in _INDEX_MAP:
        name = _INDEX_MAP[idx]
        total += sup0[name] + rho0 * sup1[name] + rho0 ** 2 * sup2[name]
    return total


def tensor_leq(t1, t2, pts, tol=0.0):
    """Whether t1 <= t2 as quadratic forms at every sample point."""
    pts = np.asarray(pts, dtype=float)
    diff = t2.voigt_many(pts) - t1.voigt_many(pts)
    eigs = np.linalg.eigvalsh(diff)[:, 0]
    return bool(np.all(eigs >= -tol))


@dataclass
class JumpReport:
    """Contrast classification of an inclusion tensor against the base."""
    sign: str        # "stiff" (inclusion stiffer) or "soft"
    eta0: float      # lower contrast bound, > 0
    eta1: float      # upper contrast bound; > 1 stiff, in (0,1) soft
    spectrum: tuple  # (min, max) generalized eigenvalue over samples


def classify_jump(base, other, pts, tol=1e-12):
    """Classify the jump of ``other`` against elliptic ``base``.

    Generalized eigenvalues w of (other - base, base) are sampled at
    ``pts``; all positive means a stiff inclusion with bounds
    eta0 = min w, eta1 = 1 + max w, all negative means a soft one with
    eta0 = -max w, eta1 = 1 + min w.  Mixed or vanishing spectra raise
    InvalidJump.
    """
    from scipy.linalg import eigh

    pts = np.asarray(pts, dtype=float)
    Qb = base.voigt_many(pts)
    Qd = other.voigt_many(pts) - Qb
    wmin = np.inf
    wmax = -np.inf
    for i in range(len(pts)):
        w = eigh(Qd[i], Qb[i], eigvals_only=True)
        wmin = min(wmin, float(w[0]))
        wmax = max(wmax, float(w[-1]))
    if wmin > tol and wmax > tol:
        return JumpReport("stiff", wmin, 1.0 + wmax, (wmin, wmax))
    if wmax < -tol and wmin < -tol:
        eta1 = 1.0 + wmin
        if eta1 <= 0.0:
            raise InvalidJump(
                "soft contrast too extreme: min generalized eigenvalue %.6g <= -1"
                % wmin)
        return JumpReport("soft", -wmax, eta1, (wmin, wmax))
    raise InvalidJump(
        "contrast spectrum [%.6g, %.6g] is neither positive nor negative"
        % (wmin, wmax))


class PlateTensorField:
    """Elasticity tensor combined with a thickness into a bending tensor.

    Every component of the base tensor is multiplied by h^3/12; the factor
    is computed once so plate and base values differ by exactly one
    floating multiply.
    """

    def __init__(self, base, thickness):
        if thickness <= 0.0:
            raise ValueError("thickness must be positive")
        self.base = base
        self.thickness = float(thickness)
        self.factor = self.thickness ** 3 / 12.0

    def voigt(self, x):
        return self.factor * self.base.voigt(x)

    def voigt_many(self, pts):
        return self.factor * self.base.voigt_many(pts)

    def apply(self, x, A):
        return self.factor * self.base.apply(x, A)
