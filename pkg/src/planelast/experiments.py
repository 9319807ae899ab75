"""Experiment drivers: convergence study on the square and Cook's membrane.

Both drivers emit deterministic CSV tables (and legacy-VTK deformed
meshes for Cook) so that re-runs with the same configuration are
byte-identical.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import (ConvergenceTable, DisplacementField, l2_error,
                       h1_seminorm_error, point_displacement)
from .assembly import assemble
from .mesh import generate_cook_mesh, generate_square_mesh, uniform_refine
from .problem import (COOK_E, COOK_G, COOK_NU, COOK_TIP, COOK_TIP_ALT,
                      cook_problem, example1_exact_gradient,
                      example1_exact_solution, example1_problem)
from .solver import cg_solve

DEFAULT_LAMBDAS = (1e3, 1e4, 1e5)
DEFAULT_POLICIES = ("one", "star")


@dataclass
class StudyConfig:
    """Configuration shared by the two studies."""

    domain: str = "square"
    lambdas: tuple = DEFAULT_LAMBDAS
    policies: tuple = DEFAULT_POLICIES
    levels: int = 5
    n0: int = 8
    side: float = math.pi
    mu: float = 1.0
    E: float = COOK_E
    nu: float = COOK_NU
    g: float = COOK_G
    outdir: str = "results"
    jobs: int = 1
    # Studies default to 1e-8: the 1e-10 solver default sits below the
    # float64 residual floor for the worst ill-scaled alpha=1 runs.
    tol: float = 1e-8
    # The raw-lambda (alpha=1) Cook systems are so ill-scaled that their
    # attainable relative residual is only ~1e-5; their runs use this
    # looser target instead of flagging at the floating-point floor.
    tol_standard: float = 1e-4
    max_iter: int = None

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError("a study needs at least 2 levels (rates need pairs)")
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")


def policy_label(policy):
    return policy if isinstance(policy, str) else "%g" % policy


def mesh_ladder(first, levels):
    meshes = [first]
    for _ in range(levels - 1):
        meshes.append(uniform_refine(meshes[-1]))
    return meshes


def solve_problem(problem, tol=1e-10, max_iter=None, dirichlet_values=None):
    """Assemble and solve; returns (field, report, system)."""
    system = assemble(problem, dirichlet_values=dirichlet_values)
    x, report = cg_solve(system.matrix, system.rhs, tol=tol,
                         max_iter=max_iter)
    full = system.dof_map.expand(x, dirichlet_values)
    return DisplacementField(problem.mesh, full), report, system


def _map_jobs(worker, items, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, items))
    return [worker(item) for item in items]


def run_example1(config):
    """Manufactured-solution study on (0, side)^2.

    Returns ``{(lam, policy): {"l2": table, "h1": table}}`` and writes one
    CSV per (lambda, policy, norm) under ``outdir/example1``.
    """
    meshes = mesh_ladder(generate_square_mesh(config.side, config.n0),
                         config.levels)

    def one_case(case):
        lam, policy = case
        tab_l2, tab_h1 = ConvergenceTable(), ConvergenceTable()
        exact = lambda x: example1_exact_solution(x, lam)
        grad = lambda x: example1_exact_gradient(x, lam)
        for mesh in meshes:
            problem = example1_problem(mesh, lam, mu=config.mu,
                                       alpha_policy=policy)
            u_h, report, system = solve_problem(problem, tol=config.tol,
                                                max_iter=config.max_iter)
            alpha = system.alpha_report.alpha
            n_free = system.dof_map.n_free
            if not report.converged:
                tab_l2.add(n_free, mesh.h, float("nan"), alpha, converged=False)
                tab_h1.add(n_free, mesh.h, float("nan"), alpha, converged=False)
                continue
            tab_l2.add(n_free, mesh.h, l2_error(u_h, exact), alpha)
            tab_h1.add(n_free, mesh.h, h1_seminorm_error(u_h, grad), alpha)
        return case, {"l2": tab_l2, "h1": tab_h1}

    cases = [(lam, policy) for lam in config.lambdas
             for policy in config.policies]
    results = dict(_map_jobs(one_case, cases, config.jobs))

    outdir = os.path.join(config.outdir, "example1")
    os.makedirs(outdir, exist_ok=True)
    for (lam, policy), tables in results.items():
        stem = "lambda%g_alpha%s" % (lam, policy_label(policy))
        tables["l2"].write_csv(os.path.join(outdir, stem + "_l2.csv"))
        tables["h1"].write_csv(os.path.join(outdir, stem + "_h1.csv"))
    return results


@dataclass
class CookRow:
    n_free: int
    h: float
    tip: float        # u2 at (48, 52), midpoint of the loaded edge
    tip_alt: float    # u2 at (48, 50)
    alpha: float
    converged: bool = True


def run_cook(config):
    """Cook's membrane benchmark over a refinement ladder.

    Returns ``{policy: [CookRow, ...]}``; writes tip-displacement CSVs and
    one deformed mesh (legacy VTK) per level and policy.
    """
    meshes = mesh_ladder(generate_cook_mesh(config.n0), config.levels)
    outdir = os.path.join(config.outdir, "cook")
    os.makedirs(outdir, exist_ok=True)

    def one_policy(policy):
        standard = policy == "one" or policy == 1.0
        tol = max(config.tol, config.tol_standard) if standard else config.tol
        rows, fields = [], []
        for mesh in meshes:
            problem = cook_problem(mesh, E=config.E, nu=config.nu,
                                   g=config.g, alpha_policy=policy)
            u_h, report, system = solve_problem(problem, tol=tol,
                                                max_iter=config.max_iter)
            tip = point_displacement(u_h, COOK_TIP)[1]
            tip_alt = point_displacement(u_h, COOK_TIP_ALT)[1]
            rows.append(CookRow(system.dof_map.n_free, mesh.h, tip, tip_alt,
                                system.alpha_report.alpha, report.converged))
            fields.append(u_h)
        return policy, rows, fields

    results = {}
    for policy, rows, fields in _map_jobs(one_policy, config.policies,
                                          config.jobs):
        label = policy_label(policy)
        lines = ["Nh,h,u2_48_52,u2_48_50,alpha"]
        for r in rows:
            tip = "%.9g" % r.tip if r.converged else "nan"
            tip_alt = "%.9g" % r.tip_alt if r.converged else "nan"
            lines.append("%d,%.6g,%s,%s,%.3f" % (r.n_free, r.h, tip, tip_alt,
                                                 r.alpha))
        path = os.path.join(outdir, "tip_displacement_%s.csv" % label)
        with open(path, "w", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
        for k, (mesh, u_h) in enumerate(zip(meshes, fields)):
            export_deformed_mesh(
                mesh, u_h,
                os.path.join(outdir, "deformed_%s_lvl%d.vtk" % (label, k)))
        results[policy] = rows
    return results


def export_deformed_mesh(mesh, u_h, destination, scale=1.0):
    """Write a legacy-VTK unstructured grid with nodes displaced by
    ``scale * u_h`` and the displacement as a point vector field."""
    disp = u_h.node_values()
    pts = mesh.nodes + scale * disp
    lines = [
        "# vtk DataFile Version 3.0",
        "deformed mesh (displacement scale %g)" % scale,
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        "POINTS %d double" % mesh.n_nodes,
    ]
    for (x, y), _ in zip(pts, range(mesh.n_nodes)):
        lines.append("%.17g %.17g 0" % (x, y))
    nt = mesh.n_triangles
    lines.append("CELLS %d %d" % (nt, 4 * nt))
    for i, j, k in mesh.triangles:
        lines.append("3 %d %d %d" % (i, j, k))
    lines.append("CELL_TYPES %d" % nt)
    lines.extend(["5"] * nt)
    lines.append("POINT_DATA %d" % mesh.n_nodes)
    lines.append("VECTORS displacement double")
    for ux, uy in disp:
        lines.append("%.17g %.17g 0" % (ux, uy))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", newline="\n") as f:
            f.write(text)
