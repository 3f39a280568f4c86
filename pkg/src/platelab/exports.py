"""Machine-readable outputs: CSV tables, legacy VTK meshes, JSON reports.

Every writer is deterministic for identical inputs: floats are printed
with shortest round-trip formatting, JSON keys are sorted, and no file
carries timestamps, so rerunning a seeded campaign reproduces byte-
identical artifacts.
"""

import csv
import json
import os


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def write_csv(path, header, rows):
    """CSV with RFC 4180 quoting and CRLF record separators."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_json(path, obj):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, sort_keys=True, indent=2)
        f.write("\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_vtk(path, mesh, cell_data=None, point_data=None, title="platelab mesh"):
    """Legacy ASCII VTK unstructured grid of the triangulation.

    cell_data and point_data are dicts of name -> 1d array; scalars
    only, which is all external viewers need for Hessian norms and
    deflections.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    pts = mesh.points
    tris = mesh.tris
    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        "POINTS %d double" % len(pts),
    ]
    for p in pts:
        lines.append("%r %r 0.0" % (float(p[0]), float(p[1])))
    lines.append("CELLS %d %d" % (len(tris), 4 * len(tris)))
    for t in tris:
        lines.append("3 %d %d %d" % (t[0], t[1], t[2]))
    lines.append("CELL_TYPES %d" % len(tris))
    lines.extend(["5"] * len(tris))
    if point_data:
        lines.append("POINT_DATA %d" % len(pts))
        for name in sorted(point_data):
            lines.append("SCALARS %s double 1" % name)
            lines.append("LOOKUP_TABLE default")
            lines.extend(repr(float(v)) for v in point_data[name])
    if cell_data:
        lines.append("CELL_DATA %d" % len(tris))
        for name in sorted(cell_data):
            lines.append("SCALARS %s double 1" % name)
            lines.append("LOOKUP_TABLE default")
            lines.extend(repr(float(v)) for v in cell_data[name])
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def solution_csv(path, sol):
    """Per-triangle table of a solution: connectivity plus Hessian norms."""
    import numpy as np

    hsq = sol.hess_sq()
    rows = []
    for t in range(sol.mesh.n_tris):
        i, j, k = (int(v) for v in sol.mesh.tris[t])
        rows.append((t, i, j, k, float(sol.mesh.eff_areas[t]),
                     float(np.sqrt(hsq[t]))))
    write_csv(path, ("tri", "v0", "v1", "v2", "area", "hessian_norm"), rows)


def vertices_csv(path, mesh, values=None):
    rows = []
    for i, p in enumerate(mesh.points):
        row = [i, float(p[0]), float(p[1])]
        if values is not None:
            row.append(float(values[i]))
        rows.append(row)
    header = ("vertex", "x", "y") if values is None else ("vertex", "x", "y", "w")
    write_csv(path, header, rows)


def records_csv(path, records):
    """Campaign results table, one row per solved experiment."""
    header = ("label", "sign", "true_area", "rho0", "W", "W0", "rel_gap",
              "hess_d", "hess_sup_d", "eta0", "eta1", "xi0", "xi1",
              "lower_cert", "lemma_lower_slack", "lemma_upper_slack",
              "work_energy_rel", "seed")
    rows = [(r.label, r.sign, r.true_area, r.rho0, r.W, r.W0, r.rel_gap,
             r.hess_d, r.hess_sup_d, r.eta0, r.eta1, r.xi0, r.xi1,
             r.lower_cert, r.lemma_lower_slack, r.lemma_upper_slack,
             r.work_energy_rel, r.seed)
            for r in records]
    write_csv(path, header, rows)
