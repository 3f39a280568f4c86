"""Hot-kernel benchmark: numba backend against the pure-numpy fallback.

Runs the geometry and assembly kernels on a realistic mesh and prints
per-kernel timings plus the speedup.  The first numba call pays JIT
compilation (cached afterwards), so every kernel is warmed before
timing.

    python3 benchmarks/bench_kernels.py [--target-h 0.05] [--repeats 5]
"""

import argparse
import time

import numpy as np

from platelab.backend import get_kernels
from platelab.domains import disc_domain
from platelab.meshing import generate_mesh
from platelab.tensors import PlateTensorField, TensorField


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--target-h", type=float, default=0.05)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--centers", type=int, default=4000)
    args = ap.parse_args()

    dom = disc_domain(1.0)
    mesh = generate_mesh(dom, args.target_h, seed=0)
    plate = PlateTensorField(TensorField.isotropic(1.0, 1.0), 0.1)
    qmat = np.repeat(plate.voigt((0.0, 0.0))[None, :, :], mesh.n_tris, axis=0)
    rng = np.random.default_rng(0)
    centers = rng.uniform(-0.5, 0.5, size=(args.centers, 2))
    weights = rng.uniform(0.0, 1.0, size=mesh.n_tris)

    pts = np.ascontiguousarray(mesh.points)
    tris = np.ascontiguousarray(mesh.tris)
    print("mesh: %d triangles, %d disc centers" % (mesh.n_tris, args.centers))
    print("%-24s %12s %12s %9s" % ("kernel", "numba [ms]", "numpy [ms]", "speedup"))

    results = {}
    for name in ("numba", "numpy"):
        k = get_kernels(name)
        setup = lambda: k.morley_element_setup(pts, tris, mesh.tri_edges,
                                               mesh.edge_normals, mesh.edge_mids)
        coeff, cent, scale, area = setup()
        bench = {
            "tri_disc_areas": lambda: k.tri_disc_areas(pts, tris, 0.1, -0.2, 0.3),
            "disc_integrals": lambda: k.disc_integrals(pts, tris, weights,
                                                       centers, 0.15),
            "morley_element_setup": setup,
            "element_stiffness": lambda: k.element_stiffness(
                coeff, scale, mesh.eff_areas, qmat),
        }
        for bname, fn in bench.items():
            fn()  # warm (JIT compile / allocate)
            results.setdefault(bname, {})[name] = best_of(fn, args.repeats)

    for bname, r in results.items():
        print("%-24s %12.3f %12.3f %8.1fx"
              % (bname, 1e3 * r["numba"], 1e3 * r["numpy"],
                 r["numpy"] / r["numba"]))

    # cross-validate the two implementations while both are loaded
    kn, kp = get_kernels("numba"), get_kernels("numpy")
    a = kn.tri_disc_areas(pts, tris, 0.1, -0.2, 0.3)
    b = kp.tri_disc_areas(pts, tris, 0.1, -0.2, 0.3)
    print("max |numba - numpy| disc area: %.3e" % np.abs(a - b).max())


if __name__ == "__main__":
    main()
