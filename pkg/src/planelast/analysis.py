"""Error norms, convergence rates and point functionals.

Error integrals use a degree-6 rule per element so that quadrature error
stays far below the discretization error whose rate is being measured.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import locate_point
from .quadrature import DEGREE6


@dataclass
class DisplacementField:
    """Piecewise-linear vector field given by two scalars per node.

    ``values`` is interleaved: dofs ``2i`` and ``2i+1`` hold the two
    components at node ``i``.
    """

    mesh: object
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.values) != 2 * self.mesh.n_nodes:
            raise ValueError("value count must be 2 * n_nodes")

    def node_values(self):
        return self.values.reshape(-1, 2)

    def vertex_values(self):
        """Values at the three vertices per triangle, shape (T, 3, 2)."""
        return self.node_values()[self.mesh.triangles]


def interpolate_nodal(mesh, func):
    """Nodal interpolant of ``func(x) -> (..., 2)``."""
    vals = np.asarray(func(mesh.nodes), dtype=np.float64)
    return DisplacementField(mesh, vals.reshape(-1))


def element_gradients(u_h):
    """Constant per-element gradient, shape (T, 2, 2), ``[i, j] = d u_i/d x_j``."""
    coords = u_h.mesh.triangle_coords()
    x = coords[..., 0]
    y = coords[..., 1]
    two_a = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) \
        - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    gx = (y[:, [1, 2, 0]] - y[:, [2, 0, 1]]) / two_a[:, None]
    gy = (x[:, [2, 0, 1]] - x[:, [1, 2, 0]]) / two_a[:, None]
    v = u_h.vertex_values()                       # (T, 3, 2)
    grad = np.empty((len(coords), 2, 2))
    grad[:, :, 0] = np.einsum("tac,ta->tc", v, gx)
    grad[:, :, 1] = np.einsum("tac,ta->tc", v, gy)
    return grad


def _quadrature_setup(mesh, rule):
    coords = mesh.triangle_coords()
    pts = rule.physical_points(coords)            # (T, Q, 2)
    return coords, pts, mesh.areas


def l2_error(u_h, exact, rule=DEGREE6):
    """L2 norm of ``u_h - exact`` over the mesh."""
    mesh = u_h.mesh
    _, pts, areas = _quadrature_setup(mesh, rule)
    uh_q = np.einsum("qa,tac->tqc", rule.points, u_h.vertex_values())
    diff = uh_q - np.asarray(exact(pts), dtype=np.float64)
    per_tri = np.einsum("q,tq->t", rule.weights, (diff ** 2).sum(axis=2))
    return math.sqrt(float((areas * per_tri).sum()))


def h1_seminorm_error(u_h, exact_gradient, rule=DEGREE6):
    """L2 norm of ``grad u_h - exact_gradient`` (Frobenius pointwise)."""
    mesh = u_h.mesh
    _, pts, areas = _quadrature_setup(mesh, rule)
    grad_h = element_gradients(u_h)               # (T, 2, 2)
    diff = grad_h[:, None, :, :] - np.asarray(exact_gradient(pts),
                                              dtype=np.float64)
    per_tri = np.einsum("q,tq->t", rule.weights,
                        (diff ** 2).sum(axis=(2, 3)))
    return math.sqrt(float((areas * per_tri).sum()))


def energy_norm_error(u_h, exact_gradient, mu, lambda_eff, rule=DEGREE6):
    """Energy norm ``sqrt(int 2 mu |eps(e)|^2 + lambda_eff (div e)^2)`` of
    the error ``e = u_h - exact``, from the exact gradient at quadrature
    points."""
    mesh = u_h.mesh
    _, pts, areas = _quadrature_setup(mesh, rule)
    grad_h = element_gradients(u_h)
    diff = grad_h[:, None, :, :] - np.asarray(exact_gradient(pts),
                                              dtype=np.float64)
    eps = 0.5 * (diff + np.swapaxes(diff, 2, 3))
    div = diff[..., 0, 0] + diff[..., 1, 1]
    dens = 2.0 * mu * (eps ** 2).sum(axis=(2, 3)) + lambda_eff * div ** 2
    per_tri = np.einsum("q,tq->t", rule.weights, dens)
    return math.sqrt(float((areas * per_tri).sum()))


def convergence_rate(e_coarse, e_fine, h_coarse, h_fine):
    """Observed rate ``ln(e_coarse/e_fine) / ln(h_coarse/h_fine)``."""
    for v in (e_coarse, e_fine, h_coarse, h_fine):
        if not v > 0.0:
            raise ValueError("rate inputs must be positive")
    if not h_coarse > h_fine:
        raise ValueError("h_coarse must exceed h_fine")
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


def point_displacement(u_h, p):
    """Displacement vector at point ``p`` by barycentric interpolation."""
    k, lam = locate_point(u_h.mesh, p)
    return lam @ u_h.vertex_values()[k]


def functional_value(u_h, density, rule=DEGREE6):
    """Value of ``int density(x) . u_h dx`` over the domain."""
    mesh = u_h.mesh
    _, pts, areas = _quadrature_setup(mesh, rule)
    uh_q = np.einsum("qa,tac->tqc", rule.points, u_h.vertex_values())
    dens = np.asarray(density(pts), dtype=np.float64)
    per_tri = np.einsum("q,tq->t", rule.weights, (uh_q * dens).sum(axis=2))
    return float((areas * per_tri).sum())


@dataclass
class ErrorRow:
    n_free: int
    h: float
    error: float
    rate: float = None          # None on the first row
    alpha: float = 1.0
    converged: bool = True


@dataclass
class ConvergenceTable:
    """Per-refinement rows of (N_h, h, error, rate, alpha)."""

    rows: list = field(default_factory=list)

    def add(self, n_free, h, error, alpha, converged=True):
        rate = None
        if self.rows and converged and self.rows[-1].converged:
            rate = convergence_rate(self.rows[-1].error, error,
                                    self.rows[-1].h, h)
        self.rows.append(ErrorRow(n_free, h, error, rate, alpha, converged))

    def rates(self):
        return [r.rate for r in self.rows if r.rate is not None]

    def to_csv(self):
        lines = ["Nh,h,error,rate,alpha"]
        for r in self.rows:
            err = "%.3e" % r.error if r.converged else "nan"
            rate = "" if r.rate is None else "%.3f" % r.rate
            lines.append("%d,%.6g,%s,%s,%.3f" % (r.n_free, r.h, err, rate,
                                                 r.alpha))
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="\n") as f:
            f.write(self.to_csv())
