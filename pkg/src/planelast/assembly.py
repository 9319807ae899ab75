"""Assembly of the modified stiffness system over the P1 vector space.

The bilinear form integrates ``2 mu eps(u):eps(v) + lam_eff (div u)(div v)``
with ``lam_eff = Lambda**alpha * lambda_hat(x)``.  P1 strains are constant
per element, so constant-coefficient stiffness blocks are exact with a
single evaluation; body loads and variable coefficients use the degree-4
rule, edge tractions a 2-point Gauss rule.

Dirichlet constraints are imposed by symmetric elimination: rows and
columns of constrained dofs are removed, which keeps the reduced system
symmetric positive definite.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .quadrature import DEGREE4, EDGE_GAUSS2_POINTS, EDGE_GAUSS2_WEIGHTS
from .solver import SparseSymMatrix


class SingularElementError(ValueError):
    """A triangle is degenerate (area vanishes relative to its size)."""


class IllPosedProblemError(ValueError):
    """The Dirichlet boundary set is empty."""


@dataclass
class DofMap:
    """Node-wise dof numbering: node ``i`` owns dofs ``2i`` and ``2i+1``.

    ``full_to_free`` maps full dof indices to indices in the reduced
    (free) system, with -1 at constrained dofs.
    """

    n_nodes: int
    constrained: np.ndarray     # (2N,) bool
    full_to_free: np.ndarray    # (2N,) int64
    free_to_full: np.ndarray    # (n_free,) int64

    @property
    def n_free(self):
        return len(self.free_to_full)

    def expand(self, x_free, constrained_values=None):
        """Scatter a free-dof vector to a full nodal vector; constrained
        dofs get 0 or the supplied values."""
        full = np.zeros(2 * self.n_nodes)
        full[self.free_to_full] = x_free
        if constrained_values is not None:
            full[self.constrained] = np.asarray(constrained_values)[self.constrained]
        return full


def build_dof_map(mesh, bcs):
    tags = mesh.boundary_tags
    known = set(bcs.dirichlet_tags) | set(bcs.traction) | set(bcs.free_tags)
    present = set(int(t) for t in np.unique(tags)) if len(tags) else set()
    missing = present - known
    if missing:
        raise ValueError("mesh carries untagged boundary behaviour: %s"
                         % sorted(missing))

    dirichlet_edge = np.isin(tags, sorted(bcs.dirichlet_tags))
    if not dirichlet_edge.any():
        raise IllPosedProblemError("no Dirichlet-tagged boundary edges")

    dirichlet_nodes = np.unique(mesh.boundary_edges[dirichlet_edge])
    constrained = np.zeros(2 * mesh.n_nodes, dtype=bool)
    constrained[2 * dirichlet_nodes] = True
    constrained[2 * dirichlet_nodes + 1] = True

    full_to_free = np.full(2 * mesh.n_nodes, -1, dtype=np.int64)
    free_to_full = np.flatnonzero(~constrained).astype(np.int64)
    full_to_free[free_to_full] = np.arange(len(free_to_full))
    return DofMap(mesh.n_nodes, constrained, full_to_free, free_to_full)


@dataclass
class AssembledSystem:
    """Reduced SPD system plus the alpha bookkeeping."""

    matrix: SparseSymMatrix
    rhs: np.ndarray
    alpha_report: object
    dof_map: DofMap


def _areas_and_limits(coords):
    x = coords[..., 0]
    y = coords[..., 1]
    area = 0.5 * ((x[..., 1] - x[..., 0]) * (y[..., 2] - y[..., 0])
                  - (x[..., 2] - x[..., 0]) * (y[..., 1] - y[..., 0]))
    e = np.stack([coords[..., 1, :] - coords[..., 0, :],
                  coords[..., 2, :] - coords[..., 1, :],
                  coords[..., 0, :] - coords[..., 2, :]], axis=-2)
    longest = np.sqrt((e ** 2).sum(axis=-1)).max(axis=-1)
    return area, longest


def element_stiffness(coords, mu_eff, lambda_eff):
    """6x6 stiffness block of one triangle with constant coefficients.

    Local dof order: (node0 u1, node0 u2, node1 u1, ..., node2 u2).
    """
    coords = np.asarray(coords, dtype=np.float64).reshape(1, 3, 2)
    area, longest = _areas_and_limits(coords)
    if area[0] <= 1e-14 * longest[0] ** 2:
        raise SingularElementError("triangle area %g vanishes" % area[0])
    if not mu_eff > 0.0:
        raise ValueError("mu must be positive")
    if lambda_eff < 0.0:
        raise ValueError("lambda_eff must be nonnegative")
    return backend.element_stiffness_batch(
        coords, np.array([float(mu_eff)]), np.array([float(lambda_eff)]))[0]


def element_load(coords, body_force, rule=DEGREE4):
    """Load 6-vector ``int_K f . phi_i dx`` via a mapped triangle rule."""
    coords = np.asarray(coords, dtype=np.float64).reshape(1, 3, 2)
    area, _ = _areas_and_limits(coords)
    if area[0] <= 0.0:
        raise SingularElementError("degenerate triangle")
    return _element_loads_batch(coords, area, body_force, rule)[0]


def _element_loads_batch(coords, areas, body_force, rule):
    pts = rule.physical_points(coords)           # (T, Q, 2)
    fvals = np.asarray(body_force(pts), dtype=np.float64)
    acc = np.einsum("q,qa,tqc->tac", rule.weights, rule.points, fvals)
    load = np.empty((len(coords), 6))
    load[:, 0::2] = acc[..., 0]
    load[:, 1::2] = acc[..., 1]
    return load * areas[:, None]


def edge_traction_load(endpoints, g):
    """Traction contributions of one boundary edge to its two endpoint
    nodes: returns (node0 u1, node0 u2, node1 u1, node1 u2)."""
    endpoints = np.asarray(endpoints, dtype=np.float64).reshape(1, 2, 2)
    return _edge_loads_batch(endpoints, g)[0]


def _edge_loads_batch(endpoints, g):
    p0 = endpoints[:, 0, :]
    p1 = endpoints[:, 1, :]
    length = np.sqrt(((p1 - p0) ** 2).sum(axis=1))
    if (length <= 0.0).any():
        raise ValueError("zero-length boundary edge")
    t = EDGE_GAUSS2_POINTS
    pts = p0[:, None, :] * (1.0 - t)[None, :, None] \
        + p1[:, None, :] * t[None, :, None]          # (E, 2, 2)
    gvals = np.asarray(g(pts), dtype=np.float64)
    w = EDGE_GAUSS2_WEIGHTS
    phi = np.stack([1.0 - t, t], axis=0)              # phi[a, k]: basis a at point k
    acc = np.einsum("k,ak,ekc->eac", w, phi, gvals)   # (E, 2, 2)
    load = np.empty((len(endpoints), 4))
    load[:, 0::2] = acc[..., 0]
    load[:, 1::2] = acc[..., 1]
    return load * length[:, None]


def _effective_coefficients(problem, report, coords, areas):
    lame = problem.lame
    if lame.kind == "constant":
        nt = len(coords)
        mu_e = np.full(nt, float(lame.mu))
        lam_e = np.full(nt, report.lambda_pow_alpha)
        if not mu_e[0] > 0.0:
            raise ValueError("mu must be positive")
        return mu_e, lam_e
    # Variable coefficients: degree-4 quadrature averages are exact for
    # the P1 form since the strains are constant per element.
    pts = DEGREE4.physical_points(coords)
    mu_q = lame.mu_at(pts)
    hat_q = lame.lambda_hat_at(pts)
    if not (mu_q > 0.0).all():
        raise ValueError("mu(x) must stay positive on quadrature points")
    if not (hat_q > 0.0).all():
        raise ValueError("lambda_hat(x) must stay positive on quadrature points")
    w = DEGREE4.weights
    mu_e = mu_q @ w
    lam_e = report.lambda_pow_alpha * (hat_q @ w)
    return mu_e, lam_e


def _element_triplets(problem, report):
    mesh = problem.mesh
    coords = mesh.triangle_coords()
    areas, longest = _areas_and_limits(coords)
    bad = np.flatnonzero(areas <= 1e-14 * longest ** 2)
    if bad.size:
        raise SingularElementError("triangle %d is degenerate" % bad[0])

    mu_e, lam_e = _effective_coefficients(problem, report, coords, areas)
    blocks = backend.element_stiffness_batch(coords, mu_e, lam_e)

    dofs = np.empty((mesh.n_triangles, 6), dtype=np.int64)
    dofs[:, 0::2] = 2 * mesh.triangles
    dofs[:, 1::2] = 2 * mesh.triangles + 1
    rows = np.repeat(dofs, 6, axis=1).ravel()
    cols = np.tile(dofs, (1, 6)).ravel()
    return rows, cols, blocks.ravel(), dofs, areas


def _full_rhs(problem, dofs, areas):
    mesh = problem.mesh
    rhs = np.zeros(2 * mesh.n_nodes)
    if problem.body_force is not None:
        loads = _element_loads_batch(mesh.triangle_coords(), areas,
                                     problem.body_force, DEGREE4)
        np.add.at(rhs, dofs.ravel(), loads.ravel())
    for tag, g in sorted(problem.bcs.traction.items()):
        sel = mesh.boundary_tags == tag
        if not sel.any():
            continue
        edges = mesh.boundary_edges[sel]
        loads = _edge_loads_batch(mesh.nodes[edges], g)
        edofs = np.empty((len(edges), 4), dtype=np.int64)
        edofs[:, 0::2] = 2 * edges
        edofs[:, 1::2] = 2 * edges + 1
        np.add.at(rhs, edofs.ravel(), loads.ravel())
    return rhs


def full_stiffness(problem):
    """Unconstrained stiffness over all 2N dofs (rigid modes included)."""
    report = problem.alpha_report()
    rows, cols, vals, _, _ = _element_triplets(problem, report)
    return SparseSymMatrix.from_triplets(2 * problem.mesh.n_nodes,
                                         rows, cols, vals), report


def assemble(problem, dirichlet_values=None):
    """Assemble the reduced system for ``problem``.

    ``dirichlet_values`` (full 2N vector) imposes interpolated Dirichlet
    data instead of the default homogeneous data; only values at
    constrained dofs are read.
    """
    mesh = problem.mesh
    report = problem.alpha_report()
    dof_map = build_dof_map(mesh, problem.bcs)

    rows, cols, vals, dofs, areas = _element_triplets(problem, report)
    rhs_full = _full_rhs(problem, dofs, areas)

    free = ~dof_map.constrained
    keep = free[rows] & free[cols]
    matrix = SparseSymMatrix.from_triplets(
        dof_map.n_free,
        dof_map.full_to_free[rows[keep]],
        dof_map.full_to_free[cols[keep]],
        vals[keep])
    rhs = rhs_full[dof_map.free_to_full].copy()

    if dirichlet_values is not None:
        dirichlet_values = np.asarray(dirichlet_values, dtype=np.float64)
        lift = free[rows] & ~free[cols]
        if lift.any():
            np.subtract.at(rhs, dof_map.full_to_free[rows[lift]],
                           vals[lift] * dirichlet_values[cols[lift]])

    return AssembledSystem(matrix, rhs, report, dof_map)
