"""Benchmark the compiled kernels against the pure NumPy fallback.

Times the three hot paths (element stiffness batch, CSR matvec, full
Jacobi-CG solve) on an assembled problem of configurable size:

    python benchmarks/bench_kernels.py --n 96 --repeat 5
"""

import argparse
import math
import time

import numpy as np


def best_of(repeat, fn, *args):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=96,
                        help="grid subdivisions per side (default 96)")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--lam", type=float, default=1e4)
    args = parser.parse_args()

    from planelast import backend, _kernels_py
    from planelast import assemble, generate_square_mesh
    from planelast.problem import example1_problem
    from planelast.solver import cg_solve

    backends = [("python", _kernels_py)]
    if backend.BACKEND == "cython":
        backends.insert(0, ("cython", backend.kernels))
    else:
        print("compiled extension unavailable; timing the fallback only")

    mesh = generate_square_mesh(math.pi, args.n)
    problem = example1_problem(mesh, args.lam, alpha_policy="star")
    system = assemble(problem)
    m = system.matrix
    x = np.random.default_rng(0).standard_normal(m.n)
    coords = mesh.triangle_coords()
    mu = np.full(mesh.n_triangles, 1.0)
    lam_eff = np.full(mesh.n_triangles, system.alpha_report.lambda_pow_alpha)

    print("mesh: %d triangles, %d unknowns, %d nonzeros"
          % (mesh.n_triangles, m.n, m.nnz))
    print()
    print("%-28s" % "kernel", *("%12s" % name for name, _ in backends))

    rows = [
        ("element_stiffness_batch",
         lambda k: k.element_stiffness_batch(coords, mu, lam_eff)),
        ("csr_matvec",
         lambda k: k.csr_matvec(m.indptr, m.indices, m.data, x)),
        ("dot",
         lambda k: k.dot(x, x)),
    ]
    for label, call in rows:
        times = [best_of(args.repeat, call, kernels)
                 for _, kernels in backends]
        cells = ["%10.3f ms" % (t * 1e3) for t in times]
        if len(times) == 2:
            cells[-1] += "  (x%.1f)" % (times[1] / times[0])
        print("%-28s" % label, *cells)

    # Full solve through whichever backend is active plus the forced
    # fallback, by monkeypatching the backend module functions.
    import planelast.backend as bk

    def timed_solve():
        return cg_solve(m, system.rhs, tol=1e-8)

    solve_times = []
    for name, kernels in backends:
        saved = (bk.csr_matvec, bk.dot)
        bk.csr_matvec, bk.dot = kernels.csr_matvec, kernels.dot
        try:
            t0 = time.perf_counter()
            _, report = timed_solve()
            solve_times.append(time.perf_counter() - t0)
        finally:
            bk.csr_matvec, bk.dot = saved
        assert report.converged
    cells = ["%10.3f s " % t for t in solve_times]
    if len(solve_times) == 2:
        cells[-1] += "  (x%.1f)" % (solve_times[1] / solve_times[0])
    print("%-28s" % ("cg_solve (%d iterations)" % report.iterations), *cells)


if __name__ == "__main__":
    main()
