"""Quadrature rules on the reference triangle and on edges.

Triangle rules are stored in barycentric coordinates with weights summing
to one, so that ``area * sum(w_q * f(x_q))`` approximates the integral of
``f`` over a physical triangle.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss


class TriangleRule:
    """Symmetric quadrature rule on a triangle.

    Attributes
    ----------
    points : (Q, 3) ndarray
        Barycentric coordinates of the quadrature points.
    weights : (Q,) ndarray
        Weights relative to the triangle area (they sum to 1).
    degree : int
        Highest total polynomial degree integrated exactly.
    """

    def __init__(self, points, weights, degree):
        self.points = np.asarray(points, dtype=np.float64)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.degree = degree
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("triangle rule weights must sum to 1")

    def physical_points(self, coords):
        """Map the rule onto triangles given by ``coords`` of shape (T, 3, 2)."""
        return np.einsum("qa,tad->tqd", self.points, coords)


def _orbit3(a, b):
    return [(a, b, b), (b, a, b), (b, b, a)]


def _orbit6(a, b, c):
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


# Dunavant rules: 6 points exact to degree 4, 12 points exact to degree 6.
DEGREE4 = TriangleRule(
    _orbit3(0.108103018168070, 0.445948490915965)
    + _orbit3(0.816847572980459, 0.091576213509771),
    [0.223381589678011] * 3 + [0.109951743655322] * 3,
    degree=4,
)

DEGREE6 = TriangleRule(
    _orbit3(0.873821971016996, 0.063089014491502)
    + _orbit3(0.501426509658179, 0.249286745170910)
    + _orbit6(0.636502499121399, 0.310352451033785, 0.053145049844816),
    [0.050844906370207] * 3
    + [0.116786275726379] * 3
    + [0.082851075618374] * 6,
    degree=6,
)


def duffy_rule(n):
    """High-order tensor rule built from the collapsed-square (Duffy) map.

    Exact for polynomials of total degree <= 2n - 2.  Used as an
    independent cross-check of the tabulated symmetric rules.
    """
    t, w = leggauss(n)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    xi, eta = np.meshgrid(t, t, indexing="ij")
    wx, we = np.meshgrid(w, w, indexing="ij")
    l2 = (eta * (1.0 - xi)).ravel()
    l1 = xi.ravel()
    l3 = 1.0 - l1 - l2
    # Jacobian (1 - xi); factor 2 normalises to the reference-triangle area.
    weights = (2.0 * wx * we * (1.0 - xi)).ravel()
    points = np.column_stack([l1, l2, l3])
    return TriangleRule(points, weights, degree=2 * n - 2)


# Two-point Gauss rule on the unit interval, exact for cubics; used for
# traction integrals over boundary edges.
EDGE_GAUSS2_POINTS = np.array(
    [0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)]
)
EDGE_GAUSS2_WEIGHTS = np.array([0.5, 0.5])
