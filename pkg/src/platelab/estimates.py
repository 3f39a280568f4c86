"""Two-sided area estimates from boundary work measurements.

Given the work W0 measured on the homogeneous plate and W on the plate
with an inclusion, the gap between them brackets the Hessian energy of
the background solution over the inclusion, and from there its area.
This module holds the energy comparison check, the per-experiment
certificates, and the empirical calibration of the bracket constants
over a campaign of solved experiments.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DegenerateFamily,
    MissingCalibration,
    WrongSign,
    ZeroWorkGap,
)

SIGN_PLUS = "Plus"
SIGN_MINUS = "Minus"


def xi_bounds(gamma, M, h):
    """Stiffness window (xi0, xi1) = (gamma*h^3/12, M*h^3/6).

    gamma is the ellipticity constant of the mid-plane tensor and M its
    scaled regularity budget; h is the plate thickness.
    """
    if gamma <= 0.0:
        raise ConfigError("ellipticity constant must be positive, got %g" % gamma)
    if h <= 0.0:
        raise ConfigError("thickness must be positive, got %g" % h)
    xi0 = gamma * h ** 3 / 12.0
    xi1 = M * h ** 3 / 6.0
    if xi1 < xi0:
        raise ConfigError(
            "stiffness window is empty: xi0=%g > xi1=%g "
            "(regularity budget below ellipticity)" % (xi0, xi1)
        )
    return xi0, xi1


@dataclass
class EnergyBudget:
    """Everything the certificates need from one solved pair.

    W0 and W are the boundary works without and with the inclusion.
    hess_d and hess_sup_d are the integral and the sup of the SQUARED
    Hessian norm of the background solution over the inclusion.  sign
    is "Plus" for a stiff inclusion (W < W0) and "Minus" for a soft
    one (W > W0).
    """

    W: float
    W0: float
    hess_d: float
    hess_sup_d: float
    xi0: float
    xi1: float
    eta0: float
    eta1: float
    sign: str
    rho0: float = 1.0

    def __post_init__(self):
        if self.sign not in (SIGN_PLUS, SIGN_MINUS):
            raise ConfigError("sign must be Plus or Minus, got %r" % (self.sign,))

    @property
    def gap(self):
        """Work gap, oriented so a correctly classified pair gives >= 0."""
        if self.sign == SIGN_PLUS:
            return self.W0 - self.W
        return self.W - self.W0

    @property
    def rel_gap(self):
        if self.W0 == 0.0:
            return float("nan")
        return self.gap / self.W0


_JUMP_SIGN = {"stiff": SIGN_PLUS, "soft": SIGN_MINUS,
              SIGN_PLUS: SIGN_PLUS, SIGN_MINUS: SIGN_MINUS}


def budget_from_solutions(sol0, sol, region, jump, xi0, xi1, rho0):
    """Assemble an EnergyBudget from a solved pair and a jump report."""
    sign = _JUMP_SIGN.get(jump.sign)
    if sign is None:
        raise ConfigError("unrecognized jump sign %r" % (jump.sign,))
    return EnergyBudget(
        W=sol.work(),
        W0=sol0.work(),
        hess_d=sol0.hessian_integral(region=region),
        hess_sup_d=sol0.hessian_sup(region=region) ** 2,
        xi0=xi0,
        xi1=xi1,
        eta0=jump.eta0,
        eta1=jump.eta1,
        sign=sign,
        rho0=rho0,
    )


def _lemma_sides(budget):
    """Lower and upper bounds on the work gap from the energy comparison."""
    b = budget
    if b.sign == SIGN_PLUS:
        lower = (b.eta0 * b.xi0 / b.eta1) * b.hess_d
        upper = (b.eta1 - 1.0) * b.xi1 * b.hess_d
    else:
        lower = b.eta0 * b.xi0 * b.hess_d
        upper = ((1.0 - b.eta1) / b.eta1) * b.xi1 * b.hess_d
    return lower, upper


@dataclass
class LemmaReport:
    sign: str
    gap: float
    lower: float
    upper: float
    lower_ok: bool
    upper_ok: bool
    lower_slack: float
    upper_slack: float
    degenerate: bool = False

    @property
    def passed(self):
        return self.lower_ok and self.upper_ok


def verify_energy_lemma(budget, slack_tol=0.02):
    """Check lower <= gap <= upper for the work gap, with relative slack.

    slack_tol absorbs the nonconforming discretization error; slacks are
    reported as gap/lower and upper/gap so values >= 1 mean the bound
    holds with room to spare.  A zero-data budget passes degenerately.
    """
    gap = budget.gap
    scale = max(abs(budget.W0), abs(budget.W), 1e-300)
    if budget.hess_d <= 0.0 and abs(gap) <= 1e-12 * scale:
        return LemmaReport(budget.sign, gap, 0.0, 0.0, True, True, 1.0, 1.0,
                           degenerate=True)
    if gap < -1e-10 * scale:
        raise WrongSign(
            "work gap %g contradicts %s classification (W0=%g, W=%g)"
            % (gap, budget.sign, budget.W0, budget.W)
        )
    lower, upper = _lemma_sides(budget)
    lower_ok = gap >= lower * (1.0 - slack_tol)
    upper_ok = gap <= upper * (1.0 + slack_tol)
    lower_slack = gap / lower if lower > 0.0 else float("inf")
    upper_slack = upper / gap if gap > 0.0 else float("inf")
    return LemmaReport(budget.sign, gap, lower, upper, lower_ok, upper_ok,
                       lower_slack, upper_slack)


def area_lower_certificate(budget):
    """Rigorous-style lower bound on the inclusion area.

    Divides the work gap by the largest possible per-area contribution,
    which uses the computed sup of |hessian|^2 over the inclusion.
    """
    if budget.hess_sup_d <= 0.0:
        raise ZeroWorkGap("background Hessian vanishes on the inclusion")
    gap = budget.gap
    if gap <= 0.0:
        raise ZeroWorkGap("work gap %g is not positive" % gap)
    if budget.sign == SIGN_PLUS:
        return gap / ((budget.eta1 - 1.0) * budget.xi1 * budget.hess_sup_d)
    return gap * budget.eta1 / ((1.0 - budget.eta1) * budget.xi1 * budget.hess_sup_d)


@dataclass
class UpperCertificate:
    """Upper bound in two forms: from hess_d directly, and from the gap."""

    hessian_form: float
    work_gap_form: float

    @property
    def value(self):
        return self.work_gap_form


def area_upper_certificate(budget, K_emp):
    """Upper bound |D| <= rho0^2 * hess_d / (K_emp * W0), both forms.

    K_emp is the empirical propagation-of-smallness constant from
    calibration or an LPS fit: the certified minimum of
    rho0^2 * hess_d / (|D| * W0) over a solved family.  The work-gap
    form replaces hess_d by its upper bound from the energy comparison,
    so it only uses measurable quantities.
    """
    if K_emp is None or not (K_emp > 0.0):
        raise MissingCalibration(
            "upper certificate needs a positive empirical constant; "
            "run a calibration campaign first"
        )
    if budget.W0 <= 0.0:
        raise ZeroWorkGap("reference work is not positive")
    scale = budget.rho0 ** 2 / (K_emp * budget.W0)
    hess_form = scale * budget.hess_d
    gap = budget.gap
    if gap < 0.0:
        raise WrongSign("work gap %g contradicts %s classification"
                        % (gap, budget.sign))
    if budget.sign == SIGN_PLUS:
        hess_from_gap = gap * budget.eta1 / (budget.eta0 * budget.xi0)
    else:
        hess_from_gap = gap / (budget.eta0 * budget.xi0)
    return UpperCertificate(hess_form, scale * hess_from_gap)


@dataclass
class ExperimentRecord:
    """One solved experiment, reduced to what the tables and fits need."""

    label: str
    sign: str
    true_area: float
    rho0: float
    W: float
    W0: float
    rel_gap: float
    hess_d: float
    hess_sup_d: float
    eta0: float
    eta1: float
    xi0: float
    xi1: float
    lower_cert: float = float("nan")
    lemma_lower_slack: float = float("nan")
    lemma_upper_slack: float = float("nan")
    work_energy_rel: float = float("nan")
    seed: int = 0
    extra: dict = field(default_factory=dict)


def record_from_budget(label, budget, lemma=None, seed=0, true_area=float("nan"),
                       work_energy_rel=float("nan"), extra=None):
    try:
        lower = area_lower_certificate(budget)
    except ZeroWorkGap:
        lower = float("nan")
    return ExperimentRecord(
        label=label,
        sign=budget.sign,
        true_area=true_area,
        rho0=budget.rho0,
        W=budget.W,
        W0=budget.W0,
        rel_gap=budget.rel_gap,
        hess_d=budget.hess_d,
        hess_sup_d=budget.hess_sup_d,
        eta0=budget.eta0,
        eta1=budget.eta1,
        xi0=budget.xi0,
        xi1=budget.xi1,
        lower_cert=lower,
        lemma_lower_slack=lemma.lower_slack if lemma is not None else float("nan"),
        lemma_upper_slack=lemma.upper_slack if lemma is not None else float("nan"),
        work_energy_rel=work_energy_rel,
        seed=seed,
        extra=dict(extra or {}),
    )


@dataclass
class SignCalibration:
    """Bracket constants for one jump sign: C1 * x <= |D| <= C2 * x
    with x = rho0^2 * rel_gap, tight on the calibration family."""

    C1: float
    C2: float
    slope: float
    n: int


@dataclass
class Calibration:
    branches: dict
    K_emp: float
    n_records: int

    def branch(self, sign):
        if sign not in self.branches:
            raise MissingCalibration("no calibrated constants for sign %r" % sign)
        return self.branches[sign]

    def bracket(self, rel_gap, rho0, sign):
        b = self.branch(sign)
        x = rho0 ** 2 * rel_gap
        return b.C1 * x, b.C2 * x

    def to_dict(self):
        out = {"K_emp": self.K_emp, "n_records": self.n_records, "branches": {}}
        for sign, b in sorted(self.branches.items()):
            out["branches"][sign] = {
                "C1": b.C1, "C2": b.C2, "slope": b.slope, "n": b.n,
            }
        return out

    @classmethod
    def from_dict(cls, d):
        branches = {}
        for sign, b in d.get("branches", {}).items():
            branches[sign] = SignCalibration(
                C1=float(b["C1"]), C2=float(b["C2"]),
                slope=float(b["slope"]), n=int(b["n"]),
            )
        return cls(branches=branches, K_emp=float(d["K_emp"]),
                   n_records=int(d.get("n_records", 0)))


def _loglog_slope(x, y):
    lx = np.log(x)
    ly = np.log(y)
    if np.ptp(lx) <= 1e-12:
        return float("nan")
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, _, _, _ = np.linalg.lstsq(A, ly, rcond=None)
    return float(coef[0])


def calibrate_constants(records, min_records=10, margin=0.15):
    """Fit bracket constants and K_emp over a family of solved experiments.

    Per sign branch, C1 and C2 are the extreme ratios
    true_area / (rho0^2 * rel_gap), widened by the relative margin so
    the bracket generalizes past the calibration family instead of
    grazing its extremes; the log-log slope of true_area against
    rho0^2 * rel_gap is recorded as a scaling check.  K_emp is the
    smallest rho0^2 * hess_d / (true_area * W0), shrunk by the same
    margin.
    """
    usable = [r for r in records
              if r.rel_gap > 0.0 and r.true_area > 0.0 and r.W0 > 0.0]
    if len(usable) < min_records:
        raise DegenerateFamily(
            "calibration needs at least %d usable experiments, got %d"
            % (min_records, len(usable))
        )
    branches = {}
    for sign in (SIGN_PLUS, SIGN_MINUS):
        sub = [r for r in usable if r.sign == sign]
        if not sub:
            continue
        x = np.array([r.rho0 ** 2 * r.rel_gap for r in sub])
        a = np.array([r.true_area for r in sub])
        ratio = a / x
        branches[sign] = SignCalibration(
            C1=float(ratio.min()) / (1.0 + margin),
            C2=float(ratio.max()) * (1.0 + margin),
            slope=_loglog_slope(x, a) if len(sub) >= 2 else float("nan"),
            n=len(sub),
        )
    if not branches:
        raise DegenerateFamily("no usable sign branch in the family")
    k_vals = np.array(
        [r.rho0 ** 2 * r.hess_d / (r.true_area * r.W0) for r in usable]
    )
    return Calibration(branches=branches, K_emp=float(k_vals.min()) / (1.0 + margin),
                       n_records=len(usable))


def bracket_hit_rate(calibration, records, rel_tol=1e-9):
    """Fraction of records whose true area falls inside the bracket."""
    hits = 0
    total = 0
    for r in records:
        if not (r.rel_gap > 0.0 and r.true_area > 0.0):
            continue
        if r.sign not in calibration.branches:
            continue
        lo, hi = calibration.bracket(r.rel_gap, r.rho0, r.sign)
        total += 1
        if lo * (1.0 - rel_tol) <= r.true_area <= hi * (1.0 + rel_tol):
            hits += 1
    if total == 0:
        raise DegenerateFamily("no records usable for hit-rate check")
    return hits / total
