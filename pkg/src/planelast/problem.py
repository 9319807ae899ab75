"""Elasticity problem data and the locking-free exponent rule.

The central quantity is the exponent ``alpha`` used to soften the
volumetric term: the stiffness is assembled with ``lambda**alpha`` in
place of ``lambda``, where ``alpha = min(1, log(d_omega/h)/log(lambda))``
caps the effective parameter at ``d_omega/h``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import DIRICHLET_TAG, FREE_TAG, TRACTION_TAG

# Cook's membrane material and load (nearly incompressible).
COOK_E = 1.12499998125
COOK_NU = 0.499999975
COOK_G = 1.0 / 16.0
COOK_TIP = (48.0, 52.0)        # midpoint of the loaded right edge
COOK_TIP_ALT = (48.0, 50.0)    # also reported alongside the midpoint


@dataclass(frozen=True)
class AlphaReport:
    """Chosen exponent and the resulting effective parameter.

    ``branch`` is "capped" when lambda > d_omega/h (so that
    lambda**alpha == d_omega/h), "uncapped" when alpha == 1, and "fixed"
    or "balanced" for the non-default policies.
    """

    alpha: float
    lambda_pow_alpha: float
    branch: str


def compute_alpha(h, lam, d_omega):
    """Locking-free exponent ``min(1, ln(d_omega/h)/ln(lam))``.

    Natural logarithms (the base cancels in the ratio).  For
    ``lam <= d_omega/h`` or ``lam <= 1`` the exponent is 1 (uncapped).
    """
    if not (h > 0.0):
        raise ValueError("h must be positive")
    if not (lam > 0.0):
        raise ValueError("lambda must be positive")
    if not (d_omega > 0.0):
        raise ValueError("d_omega must be positive")
    if lam <= 1.0 or lam <= d_omega / h:
        return AlphaReport(1.0, lam, "uncapped")
    alpha = min(1.0, math.log(d_omega / h) / math.log(lam))
    return AlphaReport(alpha, lam ** alpha, "capped")


def compute_alpha_balanced(h, lam, d_omega):
    """Exact-balance variant: the root of ``lam**(-a) = 1/lam + h/d_omega``.

    Exposed for experimentation; the default rule is :func:`compute_alpha`.
    """
    if not (h > 0.0 and lam > 0.0 and d_omega > 0.0):
        raise ValueError("h, lambda and d_omega must be positive")
    if lam <= 1.0:
        return AlphaReport(1.0, lam, "uncapped")
    alpha = -math.log(1.0 / lam + h / d_omega) / math.log(lam)
    alpha = min(1.0, alpha)
    return AlphaReport(alpha, lam ** alpha, "balanced")


def alpha_report_for(policy, h, lam, d_omega):
    """Resolve an alpha policy ("star", "one", "balanced" or a float)."""
    if policy == "star":
        return compute_alpha(h, lam, d_omega)
    if policy == "one":
        return AlphaReport(1.0, lam, "uncapped")
    if policy == "balanced":
        return compute_alpha_balanced(h, lam, d_omega)
    alpha = float(policy)
    if not 0.0 < alpha <= 1.0:
        raise ValueError("fixed alpha must lie in (0, 1]")
    if alpha == 1.0:
        return AlphaReport(1.0, lam, "uncapped")
    return AlphaReport(alpha, lam ** alpha, "fixed")


def lame_from_young_poisson(E, nu):
    """Return ``(lambda, mu)`` from Young's modulus and Poisson ratio."""
    if not (E > 0.0):
        raise ValueError("E must be positive")
    if not (0.0 <= nu < 0.5):
        raise ValueError("nu must lie in [0, 1/2)")
    lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    mu = E / (2.0 * (1.0 + nu))
    return lam, mu


@dataclass(frozen=True)
class LameField:
    """Lame parameters, either constant or spatially varying.

    The effective second parameter is ``Lambda * lambda_hat(x)`` where the
    scalar magnitude ``Lambda`` carries the large factor and the
    dimensionless shape ``lambda_hat`` is identically 1 in the constant
    case.  ``mu`` is a constant or a function of position.
    """

    kind: str
    mu: object
    Lambda: float
    lambda_hat: object = None

    @staticmethod
    def constant(mu, lam):
        return LameField("constant", float(mu), float(lam))

    @staticmethod
    def variable(mu, Lambda, lambda_hat):
        return LameField("variable", mu, float(Lambda), lambda_hat)

    def mu_at(self, x):
        if callable(self.mu):
            return np.asarray(self.mu(x), dtype=np.float64)
        return np.full(np.asarray(x).shape[:-1], float(self.mu))

    def lambda_hat_at(self, x):
        if self.lambda_hat is None:
            return np.ones(np.asarray(x).shape[:-1])
        return np.asarray(self.lambda_hat(x), dtype=np.float64)


@dataclass(frozen=True)
class BoundaryCondition:
    """Per-tag boundary assignment.

    ``traction`` maps a tag to a surface density ``g(x) -> (..., 2)``.
    The Dirichlet set must be nonempty for the problem to be well posed;
    this is enforced at assembly time when the mesh is known.
    """

    dirichlet_tags: frozenset
    traction: dict = field(default_factory=dict)
    free_tags: frozenset = frozenset()

    def __post_init__(self):
        overlap = set(self.dirichlet_tags) & set(self.traction)
        overlap |= set(self.dirichlet_tags) & set(self.free_tags)
        overlap |= set(self.traction) & set(self.free_tags)
        if overlap:
            raise ValueError("tags assigned twice: %s" % sorted(overlap))

    @staticmethod
    def dirichlet_everywhere():
        return BoundaryCondition(frozenset({DIRICHLET_TAG}))

    @staticmethod
    def clamped_with_traction(g):
        """Cook-style: tag 1 clamped, tag 2 loaded with ``g``, tag 3 free."""
        return BoundaryCondition(frozenset({DIRICHLET_TAG}),
                                 {TRACTION_TAG: g},
                                 frozenset({FREE_TAG}))


@dataclass(frozen=True)
class ElasticityProblem:
    """Mesh, material, load and boundary data plus the alpha policy."""

    mesh: object
    lame: LameField
    body_force: object            # f(x) -> (..., 2) or None for zero
    bcs: BoundaryCondition
    alpha_policy: object = "star"  # "star" | "one" | "balanced" | float

    def alpha_report(self):
        return alpha_report_for(self.alpha_policy, self.mesh.h,
                                self.lame.Lambda, self.mesh.d_omega)


# ---------------------------------------------------------------------------
# Manufactured solution on (0, pi)^2: the main part is divergence-free and
# the 1/lambda part carries all of the compressibility.

def example1_exact_solution(x, lam):
    """Exact displacement; ``x`` has shape (..., 2)."""
    x = np.asarray(x, dtype=np.float64)
    x1, x2 = x[..., 0], x[..., 1]
    s = np.sin(x1) * np.sin(x2) / lam
    u1 = (np.cos(2.0 * x1) - 1.0) * np.sin(2.0 * x2) + s
    u2 = (1.0 - np.cos(2.0 * x2)) * np.sin(2.0 * x1) + s
    return np.stack([u1, u2], axis=-1)


def example1_exact_gradient(x, lam):
    """Exact displacement gradient, shape (..., 2, 2) with entries
    ``[i, j] = d u_i / d x_j``."""
    x = np.asarray(x, dtype=np.float64)
    x1, x2 = x[..., 0], x[..., 1]
    ds1 = np.cos(x1) * np.sin(x2) / lam
    ds2 = np.sin(x1) * np.cos(x2) / lam
    g = np.empty(x.shape[:-1] + (2, 2))
    g[..., 0, 0] = -2.0 * np.sin(2.0 * x1) * np.sin(2.0 * x2) + ds1
    g[..., 0, 1] = 2.0 * (np.cos(2.0 * x1) - 1.0) * np.cos(2.0 * x2) + ds2
    g[..., 1, 0] = 2.0 * (1.0 - np.cos(2.0 * x2)) * np.cos(2.0 * x1) + ds1
    g[..., 1, 1] = 2.0 * np.sin(2.0 * x1) * np.sin(2.0 * x2) + ds2
    return g


def example1_divergence(x, lam):
    """Divergence of the exact displacement: ``sin(x1 + x2) / lam``."""
    x = np.asarray(x, dtype=np.float64)
    return np.sin(x[..., 0] + x[..., 1]) / lam


def example1_body_force(x, lam, mu=1.0):
    """Body force ``-mu lap(u) - (mu + lam) grad(div u)`` for the exact
    solution, in closed form."""
    x = np.asarray(x, dtype=np.float64)
    x1, x2 = x[..., 0], x[..., 1]
    zz = 2.0 * mu / lam * np.sin(x1) * np.sin(x2)
    gd = (1.0 + mu / lam) * np.cos(x1 + x2)
    f1 = mu * (8.0 * np.cos(2.0 * x1) - 4.0) * np.sin(2.0 * x2) + zz - gd
    f2 = mu * (4.0 - 8.0 * np.cos(2.0 * x2)) * np.sin(2.0 * x1) + zz - gd
    return np.stack([f1, f2], axis=-1)


def example1_norm_exact(lam):
    """Closed-form L2 norm of the exact displacement (the cross terms
    between the main part and the 1/lambda part integrate to zero)."""
    return math.sqrt(1.5 * math.pi ** 2 + 0.5 * math.pi ** 2 / lam ** 2)


def example1_problem(mesh, lam, mu=1.0, alpha_policy="star"):
    """Homogeneous-Dirichlet problem on (0, pi)^2 with the manufactured
    body force."""
    return ElasticityProblem(
        mesh=mesh,
        lame=LameField.constant(mu, lam),
        body_force=lambda x: example1_body_force(x, lam, mu),
        bcs=BoundaryCondition.dirichlet_everywhere(),
        alpha_policy=alpha_policy,
    )


def cook_problem(mesh, E=COOK_E, nu=COOK_NU, g=COOK_G, alpha_policy="star"):
    """Cook's membrane: clamped left edge, constant vertical shear load
    ``(0, g)`` on the right edge, zero body force."""
    lam, mu = lame_from_young_poisson(E, nu)

    def traction(x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros(x.shape)
        out[..., 1] = g
        return out

    return ElasticityProblem(
        mesh=mesh,
        lame=LameField.constant(mu, lam),
        body_force=None,
        bcs=BoundaryCondition.clamped_with_traction(traction),
        alpha_policy=alpha_policy,
    )
