"""Acceptance checklist: one test per advertised guarantee.

Each test prints a single PASS/FAIL line with the measured values, so
`pytest -s tests/test_acceptance.py` reads as a report.  The solve
campaigns are module fixtures shared across criteria to keep the whole
file at desk scale (about a minute).
"""

import math

import numpy as np
import pytest
import shapely.affinity as saff
import shapely.geometry as sgeom

from conftest import base_config

from platelab.chains import build_chain, final_radius, geometric_constants, k_of_rho
from platelab.couple import trig_couple
from platelab.domains import (DiscRegion, Inclusion, PolygonRegion,
                              check_fatness, check_standoff, disc_domain)
from platelab.estimates import SIGN_MINUS, SIGN_PLUS, bracket_hit_rate, calibrate_constants
from platelab.experiments import (build_experiment, random_compatible_couple,
                                  run_campaign, run_experiment)
from platelab.exports import records_csv
from platelab.fem import build_basis, solve
from platelab.meshing import generate_mesh, refine
from platelab.smallness import frequency_scan, three_spheres_fit, three_spheres_sample
from platelab.tensors import TensorField, dichotomy_value

W0_DISC = math.pi * 3.0 * 0.1 ** 3 / 12.0
ORIGIN = np.array([[0.0, 0.0]])


def checkline(num, label, ok, detail):
    print("criterion %02d %-22s %s  %s"
          % (num, label, "PASS" if ok else "FAIL", detail))
    assert ok, "criterion %d (%s): %s" % (num, label, detail)


# shared campaigns ------------------------------------------------------------

def admissible_inclusion(dom, rng, tensor, ellipse):
    """Random disc or ellipse inclusion passing fatness and standoff."""
    for _ in range(50):
        if ellipse:
            a = float(rng.uniform(0.18, 0.32))
            b = float(rng.uniform(0.6, 0.9)) * a
            ang = float(rng.uniform(0.0, 180.0))
            cx, cy = (float(v) for v in rng.uniform(-0.2, 0.2, size=2))
            poly = sgeom.Point(cx, cy).buffer(1.0, quad_segs=64)
            poly = saff.scale(poly, a, b, origin=(cx, cy))
            poly = saff.rotate(poly, ang, origin=(cx, cy))
            region = PolygonRegion(poly)
        else:
            r = float(rng.uniform(0.15, 0.3))
            cx, cy = (float(v) for v in rng.uniform(-0.25, 0.25, size=2))
            region = DiscRegion((cx, cy), r)
        incl = Inclusion(region, d0=0.05, h1=0.1, tensor=tensor)
        if check_standoff(incl, dom)[0] and check_fatness(incl, dom.rho0)[0]:
            return incl
    raise RuntimeError("no admissible inclusion after 50 draws")


def randomized_family(cfg, dom, tag, stream, n, seed_base):
    """Solve n random configs: shapes and jump signs alternate, couples
    and geometry are drawn per config from a seeded stream."""
    base = cfg.build_tensor()
    records, lemmas = [], []
    for i in range(n):
        rng = np.random.default_rng([stream, i])
        factor = 3.0 if i % 2 == 0 else 0.4
        incl = admissible_inclusion(dom, rng, base.scaled(factor),
                                    ellipse=(i % 4) >= 2)
        exp = build_experiment(cfg, dom, label="%s-%02d" % (tag, i),
                               seed=seed_base + i, inclusion=incl)
        record, _, lemma, _, _ = run_experiment(cfg, exp)
        records.append(record)
        lemmas.append(lemma)
    return records, lemmas


@pytest.fixture(scope="module")
def nested_records(disc_dom):
    """Ten concentric disc inclusions whose areas span one decade."""
    cfg = base_config(
        name="nested", seed=21, mesh={"target_h": 0.12},
        campaign={"n_experiments": 10,
                  "radius_range": [0.1, 0.1 * math.sqrt(10.0)],
                  "jump_factors": [3.0],
                  "radius_progression": "geometric",
                  "vary_couple": False})
    records, _ = run_campaign(cfg, dom=disc_dom)
    return records


@pytest.fixture(scope="module")
def family_cfg():
    return base_config(name="fam", seed=7, mesh={"target_h": 0.13},
                       couple={"kind": "random_trig"})


@pytest.fixture(scope="module")
def train_family(family_cfg, disc_dom):
    records, _ = randomized_family(family_cfg, disc_dom, "train", 17, 16, 200)
    return records


@pytest.fixture(scope="module")
def mixed_family(family_cfg, disc_dom):
    return randomized_family(family_cfg, disc_dom, "mixed", 91, 12, 100)


@pytest.fixture(scope="module")
def homogeneous_batch(disc_dom, iso_plate):
    """Twenty inclusion-free solves with random compatible couples."""
    mesh = refine(generate_mesh(disc_dom, 0.16, seed=1))
    basis = build_basis(mesh)
    sols = []
    for i in range(20):
        rng = np.random.default_rng([13, i])
        couple = random_compatible_couple(disc_dom, rng, modes=(2, 3, 4, 5))
        sols.append(solve(mesh, iso_plate, couple, basis=basis))
    return sols


# criteria --------------------------------------------------------------------

def test_criterion_01_dichotomy_kernel():
    worst = 0.0
    for lam, mu in ((1.0, 1.0), (2.0, 0.7), (0.3, 5.0)):
        t = TensorField.isotropic(lam, mu)
        a0 = lam + 2.0 * mu
        worst = max(worst, abs(dichotomy_value(t, ORIGIN)) / a0 ** 6)
    ortho = TensorField.orthotropic(1.0, 0.5, 4.0, 1.0)
    val = dichotomy_value(ortho, ORIGIN)
    # biquadratic m^4 + 5 m^2 + 4: discriminant 16 q (p^2 - 4 q)^2 = 5184
    rel = abs(val - 5184.0) / 5184.0
    checkline(1, "dichotomy kernel", worst <= 1e-10 and rel <= 1e-9,
              "iso residual %.1e, orthotropic rel err %.1e" % (worst, rel))


def test_criterion_02_pure_bending(pure_bending_sol):
    hess = pure_bending_sol.hessians()
    err = np.abs(hess - np.array([1.0, 0.0, 0.0])).max()
    w0 = pure_bending_sol.work()
    rel = abs(w0 - W0_DISC) / W0_DISC
    checkline(2, "pure bending", err <= 1e-10 and rel <= 1e-9,
              "hessian err %.1e, W0 rel err %.1e" % (err, rel))


def test_criterion_03_work_energy(nested_records, train_family, mixed_family):
    pool = nested_records + train_family + mixed_family[0]
    worst = max(r.work_energy_rel for r in pool)
    checkline(3, "work-energy identity", worst <= 1e-8,
              "%d campaign solves, worst %.1e" % (2 * len(pool), worst))


def test_criterion_04_energy_lemma(mixed_family):
    records, lemmas = mixed_family
    n = len(records)
    lemma_ok = sum(1 for l in lemmas if l.passed and not l.degenerate)
    match = sum(1 for r in records
                if ((r.W0 - r.W) > 0) == (r.sign == SIGN_PLUS))
    signs = {r.sign for r in records}
    ok = (n >= 10 and lemma_ok == n and match == n
          and signs == {SIGN_PLUS, SIGN_MINUS})
    checkline(4, "energy lemma", ok,
              "%d configs, inequalities %d/%d, sign match %d/%d"
              % (n, lemma_ok, n, match, n))


def test_criterion_05_scaling_and_bracket(nested_records, train_family,
                                          mixed_family):
    areas = np.array([r.true_area for r in nested_records])
    gaps = np.array([r.rel_gap for r in nested_records])
    slope = float(np.polyfit(np.log(areas), np.log(gaps), 1)[0])
    mono = bool(np.all(np.diff(gaps) > 0))
    print("note: nested relGap increases with area: %s (flagged, not asserted)"
          % mono)
    cal = calibrate_constants(train_family)
    hit = bracket_hit_rate(cal, mixed_family[0])
    ok = abs(slope - 1.0) <= 0.25 and hit >= 0.9 - 1e-12
    checkline(5, "scaling and bracket", ok,
              "slope %.3f, held-out hit rate %.3f" % (slope, hit))


def test_criterion_06_frequency(pure_bending_sol, disc_mesh, disc_dom,
                                iso_plate, homogeneous_batch):
    grid = np.linspace(0.0, 0.6, 61)
    scan = frequency_scan(pure_bending_sol, disc_dom, r_grid=grid)
    exact0 = scan.ratio[0] == 1.0
    mono = bool(np.all(np.diff(scan.ratio) <= 1e-12))
    form_err = float(np.abs(scan.ratio - (1.0 - grid) ** 2).max())
    tildes = [scan.rho_tilde_emp]
    coarse = np.linspace(0.0, 0.5, 11)
    couple = trig_couple(disc_dom.curve, [2, 3],
                         [[0.7, 0.3], [-0.4, 0.5]], [[0.2, -0.1], [0.3, 0.25]])
    trig_sol = solve(disc_mesh, iso_plate, couple)
    for sol in [trig_sol] + homogeneous_batch[:5]:
        sc = frequency_scan(sol, disc_dom, r_grid=coarse)
        exact0 = exact0 and sc.ratio[0] == 1.0
        mono = mono and bool(np.all(np.diff(sc.ratio) <= 1e-12))
        tildes.append(sc.rho_tilde_emp)
    ok = exact0 and mono and min(tildes) > 0.0 and form_err <= 1e-6
    checkline(6, "frequency lemma", ok,
              "%d families, closed-form err %.1e, min rho_tilde %.3f"
              % (len(tildes), form_err, min(tildes)))


def test_criterion_07_three_spheres(homogeneous_batch, disc_dom):
    samples = [three_spheres_sample(sol, disc_dom, (0.0, 0.0),
                                    0.08, 0.16, 0.32)
               for sol in homogeneous_batch]
    fit = three_spheres_fit(samples)
    ok = (fit.feasible and 0.0 < fit.delta < 1.0
          and fit.max_residual <= 1e-9)
    checkline(7, "three spheres", ok,
              "%d samples, delta %.3f, C %.3f, max residual %.2e"
              % (len(samples), fit.delta, fit.C, fit.max_residual))


def test_criterion_08_chain_geometry():
    c = geometric_constants(1.0, 0.06)
    ok_ref = (abs(c.s - 8.86841) <= 1e-4 and abs(c.chi - 1.254181) <= 1e-5
              and abs(c.theta1 - 0.113000) <= 1e-5)
    ident = 0.0
    for m0 in np.geomspace(0.1, 10.0, 121):
        cm = geometric_constants(float(m0), 0.06)
        ident = max(ident, abs(cm.chi - (cm.s + 1.0) / (cm.s - 1.0)))
    dom = disc_domain(1.0)
    cd = geometric_constants(dom.M0, 0.06)
    xtilde = np.array([0.0, 0.0])
    x = xtilde + np.array([cd.s * 1e-4 * dom.rho0, 0.0])
    chain = build_chain(dom, x, xtilde, 1e-4, cd)
    tangency = max(chain.tangency_residual(), chain.vertex_residual())
    k = k_of_rho(1e-4, c)
    rk = final_radius(1e-4, c)
    ok = (ok_ref and ident <= 1e-9 and tangency <= 1e-9 and k == 8
          and abs(rk - 4.881e-4) <= 5e-7 and 2.156e-4 <= rk <= 3e-3)
    checkline(8, "chain geometry", ok,
              "s %.5f, identity err %.1e, tangency %.1e, k=%d, r_k %.4e"
              % (c.s, ident, tangency, k, rk))


def test_criterion_09_convergence(disc_dom, iso_plate):
    couple = trig_couple(disc_dom.curve, [2, 3],
                         [[0.7, 0.3], [-0.4, 0.5]], [[0.2, -0.1], [0.3, 0.25]])
    mesh = generate_mesh(disc_dom, 0.2, seed=3)
    works = []
    for _ in range(4):
        works.append(solve(mesh, iso_plate, couple).work())
        mesh = refine(mesh)
    # Richardson reference from the two finest levels at the element's
    # expected second-order work convergence
    w_ref = works[3] + (works[3] - works[2]) / 3.0
    errs = np.array([abs(w - w_ref) for w in works[:3]])
    xs = np.log(0.5) * np.arange(3)
    rate = float(np.polyfit(xs, np.log(errs), 1)[0]) / 2.0
    checkline(9, "energy convergence", rate >= 0.9,
              "3 refinements, energy-norm rate %.3f" % rate)


def test_criterion_10_determinism(tmp_path, disc_dom):
    cfg = base_config(name="det", seed=5, mesh={"target_h": 0.25},
                      couple={"kind": "random_trig"},
                      campaign={"n_experiments": 3,
                                "radius_range": [0.18, 0.3],
                                "jump_factors": [3.0]})
    blobs = []
    for run in (0, 1):
        records, _ = run_campaign(cfg, dom=disc_dom)
        path = tmp_path / ("records_%d.csv" % run)
        records_csv(str(path), records)
        blobs.append(path.read_bytes())
    ok = blobs[0] == blobs[1] and len(blobs[0]) > 0
    checkline(10, "determinism", ok,
              "two campaign runs, %d byte CSVs identical" % len(blobs[0]))
