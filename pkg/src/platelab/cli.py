"""Command line runner: hypothesis audit, solves, scans, calibration.

Every subcommand consumes one JSON config and writes machine-readable
artifacts under the output directory.  Exit codes: 0 on success, 2 when
a hypothesis or fit fails, 3 on mesh or solver failure, 4 on config
errors.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import exports
from .chains import geometric_constants
from .config import dump_config, load_config
from .domains import connectivity_scan
from .errors import (
    ConfigError,
    DegenerateScan,
    EmptyInterior,
    IncompatibleLoad,
    MeshFailure,
    MissingCalibration,
    NonElliptic,
    PlatelabError,
    RhoTooLarge,
    SolveFailure,
    ZeroSolution,
    ZeroWorkGap,
)
from .estimates import (
    Calibration,
    area_lower_certificate,
    area_upper_certificate,
    bracket_hit_rate,
    calibrate_constants,
    xi_bounds,
)
from .experiments import (
    build_experiment,
    run_campaign,
    run_experiment,
    sample_points,
    solve_pair,
)
from .smallness import (
    boundary_data_bound_check,
    chain_budget,
    frequency_scan,
    hex_lattice,
    lps_fit,
    lps_scan,
    three_spheres_fit,
    three_spheres_sample,
)
from .tensors import classify_dichotomy, classify_jump, ellipticity_gamma, regularity_M

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4


def _say(quiet, msg):
    if not quiet:
        print(msg)


def _interior_reach(dom):
    """Largest sampled distance from the boundary (inradius estimate)."""
    pts = sample_points(dom, n_side=40, boundary=8)
    d = dom.boundary_distance(pts)
    return float(d.max())


def _resolve_h0(cfg, dom):
    h0 = cfg.data["domain"].get("h0")
    if h0 is not None:
        return float(h0), "configured"
    est, _ = connectivity_scan(dom)
    return est, "connectivity scan"


def cmd_check_tensor(cfg, out, quiet=False):
    dom = cfg.build_domain()
    tensor = cfg.build_tensor()
    pts = sample_points(dom)
    report = {"domain": {"rho0": dom.rho0, "M0": dom.M0, "M1": dom.M1,
                         "area": dom.area}}
    failures = []

    dich = classify_dichotomy(tensor, pts)
    report["dichotomy"] = {"status": dich.status, "min_value": dich.min_value,
                           "min_normalized": dich.min_normalized}
    if dich.status == "Violated":
        failures.append("dichotomy violated at %r" % (dich.witnesses,))

    try:
        gamma, witness = ellipticity_gamma(tensor, pts)
        report["gamma"] = gamma
    except NonElliptic as e:
        failures.append(str(e))
        report["gamma"] = None
        gamma = None
    M = regularity_M(tensor, pts, dom.rho0,
                     grad_pts=pts[:: max(len(pts) // 40, 1)])
    report["M"] = M
    if gamma is not None:
        xi0, xi1 = xi_bounds(gamma, M, cfg.data["thickness"])
        report["xi0"], report["xi1"] = xi0, xi1

    incl = cfg.build_inclusion()
    if incl is not None:
        from .domains import check_fatness, check_standoff

        ok_f, _, ratio = check_fatness(incl, dom.rho0)
        ok_s, dist = check_standoff(incl, dom)
        report["inclusion"] = {"area": incl.area, "fat_ratio": ratio,
                               "standoff": dist, "fatness_ok": ok_f,
                               "standoff_ok": ok_s}
        if not ok_f:
            failures.append("inclusion fails the fatness check (ratio %.3f)" % ratio)
        if not ok_s:
            failures.append("inclusion too close to the boundary (dist %.4f)" % dist)
        if incl.tensor is not None:
            try:
                jump = classify_jump(tensor, incl.tensor, pts[dom.inside(pts)])
                report["jump"] = {"sign": jump.sign, "eta0": jump.eta0,
                                  "eta1": jump.eta1}
                delta0 = cfg.data["hypotheses"]["delta0"]
                if jump.eta0 < delta0:
                    failures.append("jump size eta0=%g below the required %g"
                                    % (jump.eta0, delta0))
            except PlatelabError as e:
                failures.append(str(e))

    report["failures"] = failures
    report["ok"] = not failures
    exports.write_json(os.path.join(out, "check_tensor.json"), report)
    _say(quiet, "dichotomy: %s" % dich.status)
    _say(quiet, "gamma: %s  M: %g" % (report.get("gamma"), M))
    for f in failures:
        _say(quiet, "FAIL: %s" % f)
    return EXIT_OK if not failures else EXIT_HYPOTHESIS


def cmd_solve(cfg, out, quiet=False):
    dom = cfg.build_domain()
    exp = build_experiment(cfg, dom, label=cfg.data["name"])
    sol0, sol = solve_pair(exp)
    w0 = sol0.work()
    w = sol.work()
    has_incl = exp.incl_plate is not None
    flag = ""
    if has_incl:
        flag = "W<W0" if w < w0 else ("W>W0" if w > w0 else "W=W0")
    rows = [(exp.label, w0, w, w0 - w, (w0 - w) / w0 if w0 else float("nan"),
             sol0.work_energy_gap(), sol.work_energy_gap(),
             sol0.info["compat_metric"], flag)]
    exports.write_csv(os.path.join(out, "work_table.csv"),
                      ("label", "W0", "W", "gap", "rel_gap",
                       "work_energy_0", "work_energy_1", "compat_metric",
                       "flag"), rows)
    npts = exp.mesh.n_points
    exports.write_vtk(os.path.join(out, "solution.vtk"), exp.mesh,
                      point_data={"w0": sol0.w[:npts], "w": sol.w[:npts]},
                      cell_data={"hess0": np.sqrt(sol0.hess_sq()),
                                 "hess": np.sqrt(sol.hess_sq())})
    exports.vertices_csv(os.path.join(out, "vertices.csv"), exp.mesh,
                         values=sol0.w[:npts])
    exports.solution_csv(os.path.join(out, "solution0.csv"), sol0)
    if has_incl:
        exports.solution_csv(os.path.join(out, "solution1.csv"), sol)
    summary = {"W0": w0, "W": w, "flag": flag,
               "n_tris": exp.mesh.n_tris, "h_max": exp.mesh.h_max,
               "residual0": sol0.info["residual"],
               "residual1": sol.info["residual"],
               "compat_metric": sol0.info["compat_metric"]}
    fcap = cfg.data["hypotheses"]["F_cap"]
    try:
        ratio = boundary_data_bound_check(exp.couple, sol0, dom.rho0)
        summary["data_ratio"] = ratio
        if fcap is not None and ratio > fcap:
            summary["data_ratio_ok"] = False
            exports.write_json(os.path.join(out, "solve.json"), summary)
            _say(quiet, "FAIL: boundary data ratio %g exceeds cap %g" % (ratio, fcap))
            return EXIT_HYPOTHESIS
        summary["data_ratio_ok"] = True
    except ZeroSolution:
        summary["data_ratio"] = None
        summary["data_ratio_ok"] = True
    exports.write_json(os.path.join(out, "solve.json"), summary)
    _say(quiet, "W0 = %.6e" % w0)
    if has_incl:
        _say(quiet, "W  = %.6e  (%s)" % (w, flag))
    return EXIT_OK


def _three_spheres_centers(dom, depth, n_centers):
    env = dom.envelope(depth)
    if env.is_empty():
        raise EmptyInterior("no room for three-spheres discs at depth %g" % depth)
    pts = hex_lattice(env.bounds(), max(depth / 2.0, dom.rho0 / 8.0))
    pts = pts[env.contains(pts)]
    if len(pts) == 0:
        rep = env.to_shapely().representative_point()
        pts = np.array([[rep.x, rep.y]])
    step = max(len(pts) // n_centers, 1)
    return pts[::step][:n_centers]


def cmd_scan(cfg, out, quiet=False):
    dom = cfg.build_domain()
    exp = build_experiment(cfg, dom, label=cfg.data["name"])
    sol0, _ = solve_pair(exp)
    scan_cfg = cfg.data["scan"]
    h0, h0_src = _resolve_h0(cfg, dom)
    consts = geometric_constants(dom.M0, h0)
    reach = _interior_reach(dom)
    findings = {"h0": h0, "h0_source": h0_src, "s": consts.s,
                "chi": consts.chi, "rho_bar": consts.rho_bar}

    # propagation-of-smallness scan over a geometric radius grid
    rho_max = scan_cfg["rho_max"] or 0.8 * reach / consts.s
    n_rho = scan_cfg["n_rho"]
    ratio = scan_cfg["rho_ratio"]
    rho_min = scan_cfg["rho_min"] or rho_max / ratio ** (n_rho - 1)
    rhos = np.geomspace(rho_min, rho_max, n_rho)
    scans = [lps_scan(sol0, dom, float(r), consts) for r in rhos]
    exports.write_csv(os.path.join(out, "scan_lps.csv"),
                      ("rho", "min_ratio", "n_centers", "center_x", "center_y"),
                      [(s.rho, s.ratio, s.n_centers, s.center[0], s.center[1])
                       for s in scans])
    try:
        fit = lps_fit(scans, dom.rho0)
        findings["lps_fit"] = {"A": fit.A, "B": fit.B, "C": fit.C,
                               "feasible": fit.feasible,
                               "power_law": fit.power_law,
                               "slope_loglog": fit.slope_loglog}
    except DegenerateScan as e:
        findings["lps_fit"] = {"error": str(e)}

    # frequency table over envelope depths
    fmax = scan_cfg["freq_max"] or 0.8 * reach
    fgrid = np.linspace(0.0, fmax, scan_cfg["n_freq"])
    freq = frequency_scan(sol0, dom, fgrid)
    exports.write_csv(os.path.join(out, "scan_frequency.csv"), ("r", "ratio"),
                      freq.rows())
    findings["rho_tilde_emp"] = freq.rho_tilde_emp

    # three-spheres samples at interior centers
    ts = scan_cfg["three_spheres"]
    r1 = ts["r1"] or dom.rho0 / 8.0
    ratios = ts["ratios"]
    r3 = r1 * ratios[2] / ratios[0]
    centers = _three_spheres_centers(dom, r3 * 1.25, ts["n_centers"])
    samples = [three_spheres_sample(sol0, dom, c, r1, r1 * ratios[1] / ratios[0], r3)
               for c in centers]
    exports.write_csv(os.path.join(out, "three_spheres.csv"),
                      ("center_x", "center_y", "r1", "r2", "r3",
                       "I1", "I2", "I3"),
                      [(s.center[0], s.center[1], s.r1, s.r2, s.r3,
                        s.I1, s.I2, s.I3) for s in samples])
    try:
        tsf = three_spheres_fit(samples, min_samples=min(5, len(samples)),
                                raise_infeasible=False)
        findings["three_spheres_fit"] = {
            "C": tsf.C, "delta": tsf.delta, "feasible": tsf.feasible,
            "max_residual": tsf.max_residual, "n_samples": tsf.n_samples}
    except DegenerateScan as e:
        findings["three_spheres_fit"] = {"error": str(e)}

    # chain budget (rho0-scaled pure arithmetic); default radius: half
    # the admissible cap, so the report is always well posed
    ex = cfg.data["exponents"]
    rho_tilde_scaled = freq.rho_tilde_emp / dom.rho0
    rho_budget = scan_cfg.get("budget_rho") or 0.5 * min(
        consts.rho_bar, rho_tilde_scaled / (consts.s + 1.0))
    try:
        budget = chain_budget(rho_budget, consts, dom.M1,
                              ex["delta"], ex["delta_chi"],
                              A1=ex["A1"], B1=ex["B1"],
                              rho_tilde=rho_tilde_scaled)
        findings["budget"] = budget.to_dict()
    except (RhoTooLarge, ConfigError) as e:
        findings["budget"] = {"error": str(e)}

    try:
        findings["data_ratio"] = boundary_data_bound_check(exp.couple, sol0,
                                                           dom.rho0)
    except ZeroSolution:
        findings["data_ratio"] = None

    exports.write_json(os.path.join(out, "scan.json"), findings)
    _say(quiet, "lps ratios: %s" % ["%.3e" % s.ratio for s in scans])
    _say(quiet, "rho_tilde_emp = %g" % freq.rho_tilde_emp)
    return EXIT_OK


def cmd_calibrate(cfg, out, quiet=False):
    records, _ = run_campaign(cfg)
    exports.records_csv(os.path.join(out, "records.csv"), records)
    cal = calibrate_constants(records,
                              min_records=min(10, len(records)))
    payload = cal.to_dict()
    payload["hit_rate_training"] = bracket_hit_rate(cal, records)
    exports.write_json(os.path.join(out, "calibration.json"), payload)
    _say(quiet, "calibrated %d records; branches: %s"
         % (cal.n_records, sorted(cal.branches)))
    return EXIT_OK


def _load_calibration(cfg, out):
    path = cfg.data["bounds"].get("calibration") or os.path.join(
        out, "calibration.json")
    if not os.path.exists(path):
        return None
    return Calibration.from_dict(exports.read_json(path))


def cmd_bounds(cfg, out, quiet=False):
    if cfg.data.get("inclusion") is None:
        raise ConfigError("bounds: config has no inclusion to estimate")
    dom = cfg.build_domain()
    exp = build_experiment(cfg, dom, label=cfg.data["name"])
    record, budget, lemma, _, _ = run_experiment(cfg, exp)
    form = cfg.data["bounds"]["form"]
    cal = _load_calibration(cfg, out)
    if form == "theorem" and cal is None:
        raise MissingCalibration(
            "theorem-form bounds need calibration.json; run calibrate first")
    theorem_lo = theorem_hi = float("nan")
    upper_h = upper_g = float("nan")
    if cal is not None and form in ("theorem", "auto", "both"):
        try:
            theorem_lo, theorem_hi = cal.bracket(budget.rel_gap, budget.rho0,
                                                 budget.sign)
            uc = area_upper_certificate(budget, cal.K_emp)
            upper_h, upper_g = uc.hessian_form, uc.work_gap_form
        except MissingCalibration:
            if form == "theorem":
                raise
    try:
        lower = area_lower_certificate(budget)
    except ZeroWorkGap:
        lower = float("nan")
    rows = [(record.label, record.sign, lower, upper_h, upper_g,
             theorem_lo, theorem_hi, record.true_area, record.rel_gap,
             lemma.passed)]
    exports.write_csv(os.path.join(out, "bounds.csv"),
                      ("label", "sign", "lower_cert", "upper_hessian_form",
                       "upper_work_gap_form", "theorem_lower", "theorem_upper",
                       "true_area", "rel_gap", "lemma_ok"), rows)
    _say(quiet, "lower certificate: %.6g" % lower)
    if cal is not None and math.isfinite(theorem_lo):
        _say(quiet, "theorem bracket: [%.6g, %.6g]" % (theorem_lo, theorem_hi))
    return EXIT_OK


def cmd_all(cfg, out, quiet=False):
    code = cmd_check_tensor(cfg, out, quiet)
    if code != EXIT_OK:
        return code
    for step in (cmd_solve, cmd_scan, cmd_calibrate, cmd_bounds):
        if step is cmd_bounds and cfg.data.get("inclusion") is None:
            continue
        code = step(cfg, out, quiet)
        if code != EXIT_OK:
            return code
    return EXIT_OK


_COMMANDS = {
    "check-tensor": cmd_check_tensor,
    "solve": cmd_solve,
    "scan": cmd_scan,
    "calibrate": cmd_calibrate,
    "bounds": cmd_bounds,
    "all": cmd_all,
}


def _exit_code(exc):
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (MeshFailure, SolveFailure, IncompatibleLoad)):
        return EXIT_SOLVER
    if isinstance(exc, PlatelabError):
        return EXIT_HYPOTHESIS
    raise exc


def build_parser():
    p = argparse.ArgumentParser(prog="platelab",
                                description="plate inclusion size estimation")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config path")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--mesh-h", type=float, default=None,
                        help="override mesh target size")
        sp.add_argument("--quiet", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.data["seed"] = args.seed
        if args.mesh_h is not None:
            cfg.data["mesh"]["target_h"] = args.mesh_h
        out = args.out or cfg.data["out"]
        os.makedirs(out, exist_ok=True)
        dump_config(cfg, os.path.join(out, "resolved_config.json"))
        return _COMMANDS[args.command](cfg, out, quiet=args.quiet)
    except PlatelabError as e:
        print("error: %s" % e, file=sys.stderr)
        return _exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
