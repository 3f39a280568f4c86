import dataclasses
import math

import numpy as np
import pytest

from platelab.chains import geometric_constants
from platelab.domains import disc_domain, ellipse_domain
from platelab.errors import (ConfigError, DegenerateScan, EmptyInterior,
                             GeometryViolation, InfeasibleFit,
                             RegionOutsideDomain, RhoTooLarge, ZeroSolution)
from platelab.smallness import (ThreeSpheresSample, boundary_data_bound_check,
                                chain_budget, domain_diameter, frequency_scan,
                                hex_lattice, large_rho_branch, lps_fit,
                                lps_scan, three_spheres_fit,
                                three_spheres_sample)

RHO_TILDE_DISC = 1.0 - math.sqrt(2.0) / 2.0  # pure bending on the unit disc


def power_sample(c, power, r1=0.1):
    """Synthetic sample with I(r) = c * r^power: exactly log-linear in
    log r, so (C, delta) = (1, 1/2) covers it for geometric radii."""
    r2, r3 = 2.0 * r1, 4.0 * r1
    return ThreeSpheresSample(center=(0.0, 0.0), r1=r1, r2=r2, r3=r3,
                              I1=c * r1 ** power, I2=c * r2 ** power,
                              I3=c * r3 ** power)


# three spheres -----------------------------------------------------------------

def test_three_spheres_fit_power_family():
    samples = [power_sample(1.0, 4), power_sample(2.0, 2),
               power_sample(0.5, 6), power_sample(3.0, 4),
               power_sample(1.5, 2)]
    fit = three_spheres_fit(samples)
    assert fit.feasible
    assert abs(fit.delta - 0.5) <= 1e-3
    assert abs(fit.C - 1.0) <= 1e-9
    assert fit.n_samples == 5


def test_three_spheres_fit_infeasible():
    bump = ThreeSpheresSample(center=(0, 0), r1=0.1, r2=0.2, r3=0.4,
                              I1=1.0, I2=100.0, I3=10.0)
    samples = [bump] + [power_sample(1.0, 4)] * 4
    with pytest.raises(InfeasibleFit):
        three_spheres_fit(samples)
    fit = three_spheres_fit(samples, raise_infeasible=False)
    assert not fit.feasible
    assert fit.C > 1.0
    assert abs(fit.C - 10.0) <= 0.5  # residual log(10) at delta -> 0


def test_three_spheres_fit_needs_samples():
    with pytest.raises(DegenerateScan):
        three_spheres_fit([power_sample(1.0, 4)] * 3)
    vac = ThreeSpheresSample(center=(0, 0), r1=0.1, r2=0.2, r3=0.4,
                             I1=0.0, I2=0.0, I3=0.0)
    assert vac.vacuous
    with pytest.raises(DegenerateScan):
        three_spheres_fit([vac] * 8)


def test_three_spheres_sample_validation(pure_bending_sol, disc_dom):
    with pytest.raises(ConfigError):
        three_spheres_sample(pure_bending_sol, disc_dom, (0, 0), 0.2, 0.1, 0.4)
    with pytest.raises(RegionOutsideDomain):
        three_spheres_sample(pure_bending_sol, disc_dom, (0.8, 0), 0.1, 0.2, 0.4)


def test_three_spheres_on_pure_bending(pure_bending_sol, disc_dom):
    # constant Hessian: I(r) = pi r^2, exactly log-linear
    s = three_spheres_sample(pure_bending_sol, disc_dom, (0.0, 0.0),
                             0.1, 0.2, 0.4)
    assert abs(s.I1 - math.pi * 0.01) <= 1e-8
    assert s.I1 < s.I2 < s.I3
    fit = three_spheres_fit([s] * 5)
    assert fit.feasible
    assert abs(fit.max_residual) <= 1e-9


# lps scan and fit ----------------------------------------------------------------

def test_lps_scan_pure_bending(pure_bending_sol, disc_dom):
    consts = geometric_constants(disc_dom.M0, 0.06)
    for rho in (0.02, 0.05):
        scan = lps_scan(pure_bending_sol, disc_dom, rho, consts)
        assert abs(scan.ratio - rho ** 2) <= 1e-6
        assert 0.0 < scan.ratio <= 1.0
        assert scan.n_centers >= 1


def test_lps_scan_empty_interior(pure_bending_sol, disc_dom):
    consts = geometric_constants(disc_dom.M0, 0.06)
    with pytest.raises(EmptyInterior):
        lps_scan(pure_bending_sol, disc_dom, 1.0 / consts.s * 1.05, consts)
    with pytest.raises(ConfigError):
        lps_scan(pure_bending_sol, disc_dom, -0.1, consts)


def test_lps_fit_power_law_flagged(pure_bending_sol, disc_dom):
    consts = geometric_constants(disc_dom.M0, 0.06)
    scans = [lps_scan(pure_bending_sol, disc_dom, rho, consts)
             for rho in np.geomspace(0.012, 0.06, 6)]
    fit = lps_fit(scans, disc_dom.rho0)
    assert fit.power_law
    assert abs(fit.slope_loglog - 2.0) <= 1e-2
    assert fit.feasible
    assert fit.C <= 1.0


def test_lps_fit_needs_points(pure_bending_sol, disc_dom):
    consts = geometric_constants(disc_dom.M0, 0.06)
    scan = lps_scan(pure_bending_sol, disc_dom, 0.05, consts)
    with pytest.raises(DegenerateScan):
        lps_fit([scan], disc_dom.rho0)


def test_hex_lattice_spacing():
    pts = hex_lattice((0.0, 0.0, 2.0, 1.0), 0.2)
    assert len(pts) > 40
    d2 = ((pts[None, :, :] - pts[:, None, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    assert abs(math.sqrt(d2.min()) - 0.2) <= 1e-9


# frequency ----------------------------------------------------------------------

def test_frequency_scan_pure_bending(pure_bending_sol, disc_dom):
    grid = np.linspace(0.0, 0.6, 61)
    scan = frequency_scan(pure_bending_sol, disc_dom, r_grid=grid)
    assert scan.ratio[0] == 1.0  # exact, not approximate
    assert np.all(np.diff(scan.ratio) <= 1e-12)
    # envelope of the unit disc at depth r is a disc of radius 1-r
    want = (1.0 - grid) ** 2
    assert np.abs(scan.ratio - want).max() <= 1e-6
    # the half-energy depth on this grid sits just below 1 - sqrt(2)/2
    assert abs(scan.rho_tilde_emp - 0.29) <= 1e-12
    assert scan.rho_tilde_emp > 0


def test_frequency_scan_exact_halving_point(pure_bending_sol, disc_dom):
    grid = np.array([0.0, 0.1, RHO_TILDE_DISC, 0.5])
    scan = frequency_scan(pure_bending_sol, disc_dom, r_grid=grid)
    assert abs(scan.rho_tilde_emp - RHO_TILDE_DISC) <= 1e-12


def test_frequency_scan_zero_solution(pure_bending_sol, disc_dom):
    dead = dataclasses.replace(
        pure_bending_sol, _hess=np.zeros_like(pure_bending_sol.hessians()))
    with pytest.raises(ZeroSolution):
        frequency_scan(dead, disc_dom)


def test_boundary_data_bound_scale_invariant(disc_dom, iso_plate, disc_mesh):
    from platelab.couple import trig_couple
    from platelab.fem import solve
    vals = []
    for amp in (1.0, 5.0):
        couple = trig_couple(disc_dom.curve, [2, 3],
                             [[0.7 * amp, 0.0], [0.0, 0.4 * amp]],
                             [[0.0, 0.2 * amp], [0.0, 0.0]])
        sol = solve(disc_mesh, iso_plate, couple)
        vals.append(boundary_data_bound_check(couple, sol, disc_dom.rho0))
    assert vals[0] > 0
    assert abs(vals[0] - vals[1]) <= 1e-8 * vals[0]


def test_boundary_data_bound_zero_solution(pure_bending_sol, disc_dom):
    from platelab.couple import CoupleField
    zero = CoupleField(disc_dom.curve, lambda s: np.zeros_like(s),
                       lambda s: np.zeros_like(s))
    dead = dataclasses.replace(
        pure_bending_sol, _hess=np.zeros_like(pure_bending_sol.hessians()))
    with pytest.raises(ZeroSolution):
        boundary_data_bound_check(zero, dead, disc_dom.rho0)


# chain budget --------------------------------------------------------------------

def test_chain_budget_reference_point():
    consts = geometric_constants(1.0, 0.06)
    budget = chain_budget(1e-4, consts, M1=math.pi, delta=0.5, delta_chi=0.5)
    assert budget.k_rho == 8
    assert abs(budget.r_k - 4.881e-4) <= 5e-7
    assert budget.A == 6.0
    assert abs(budget.B - (math.log(2.0) + 1.0)) <= 1e-12
    # counting inequalities hold by construction
    assert budget.L * math.pi * budget.r_k ** 2 <= math.pi
    assert (budget.L + 1) * math.pi * budget.r_k ** 2 > math.pi
    assert budget.N == int(math.pi / (2.0 * 1e-8))
    assert budget.Ltilde == budget.L
    want_log = 7 * math.log(0.5) + (7 + budget.L) * math.log(0.5)
    assert abs(budget.log_Cfinal - want_log) <= 1e-9 * abs(want_log)
    assert budget.Cfinal == 0.0  # underflows, the log field carries it


def test_chain_budget_caps():
    consts = geometric_constants(1.0, 0.06)
    with pytest.raises(RhoTooLarge):
        chain_budget(1e-3, consts, M1=math.pi, delta=0.5, delta_chi=0.5)
    with pytest.raises(RhoTooLarge):
        chain_budget(2e-4, consts, M1=math.pi, delta=0.5, delta_chi=0.5,
                     rho_tilde=1e-3)  # cap rho_tilde/(s+1) ~ 1e-4
    with pytest.raises(ConfigError):
        chain_budget(1e-4, consts, M1=math.pi, delta=1.5, delta_chi=0.5)
    budget = chain_budget(1e-4, consts, M1=math.pi, delta=0.5, delta_chi=0.5,
                          c_tilde=2e-4)
    assert budget.rho_star == 2e-4


# large-rho fallback ---------------------------------------------------------------

def test_domain_diameter():
    assert abs(domain_diameter(disc_domain(1.0)) - 2.0) <= 1e-6
    assert abs(domain_diameter(ellipse_domain(2.0, 1.0)) - 4.0) <= 1e-6


def test_large_rho_branch(disc_dom):
    consts = geometric_constants(1.0, 0.06)
    out = large_rho_branch(0.1, consts.rho_bar, consts, disc_dom,
                           c_star=1.0, A=6.0, B=1.69, C2=8.0)
    assert abs(out.diam - 2.0) <= 1e-6
    want = math.exp(6.0 * (2.0 * consts.s / 8.0) ** 1.69)
    assert abs(out.C_fallback - want) <= 1e-9 * want
    # the envelope never beats the scanned ratio floor on the branch; its
    # maximum sits at the widest radius the chain span allows
    assert out.bound_at_rho <= 1.0 + 1e-12
    near = large_rho_branch(consts.rho_bar * 1.01, consts.rho_bar, consts,
                            disc_dom, c_star=1.0, A=6.0, B=1.69, C2=8.0)
    assert near.bound_at_rho <= out.bound_at_rho


def test_large_rho_branch_geometry_guard(disc_dom):
    consts = geometric_constants(1.0, 0.06)
    with pytest.raises(GeometryViolation):
        # 2 s rho exceeds the diameter
        large_rho_branch(0.5, consts.rho_bar, consts, disc_dom,
                         c_star=1.0, A=6.0, B=1.69, C2=8.0)
    with pytest.raises(ConfigError):
        large_rho_branch(consts.rho_bar / 2.0, consts.rho_bar, consts,
                         disc_dom, c_star=1.0, A=6.0, B=1.69, C2=8.0)
