"""Locking-free P1 finite elements for nearly incompressible 2D elasticity.

The volumetric stiffness term is assembled with ``lambda**alpha`` instead
of ``lambda``, where ``alpha = min(1, log(d_omega/h)/log(lambda))`` caps
the effective parameter at ``d_omega/h``; this removes volumetric locking
while keeping the plain conforming P1 discretization.
"""

from .backend import BACKEND
from .mesh import (DIRICHLET_TAG, FREE_TAG, TRACTION_TAG, Mesh,
                   MeshFormatError, PointNotFoundError, generate_cook_mesh,
                   generate_square_mesh, locate_point, read_mesh,
                   uniform_refine, validate_mesh, write_mesh)
from .problem import (AlphaReport, BoundaryCondition, ElasticityProblem,
                      LameField, compute_alpha, compute_alpha_balanced,
                      cook_problem, example1_body_force,
                      example1_exact_gradient, example1_exact_solution,
                      example1_problem, lame_from_young_poisson)
from .assembly import (AssembledSystem, DofMap, IllPosedProblemError,
                       SingularElementError, assemble, build_dof_map,
                       edge_traction_load, element_load, element_stiffness,
                       full_stiffness)
from .solver import (NotSPDError, SolveReport, SparseSymMatrix, cg_solve,
                     dense_solve_oracle)
from .analysis import (ConvergenceTable, DisplacementField, convergence_rate,
                       energy_norm_error, functional_value,
                       h1_seminorm_error, interpolate_nodal, l2_error,
                       point_displacement)
from .experiments import (StudyConfig, export_deformed_mesh, run_cook,
                          run_example1, solve_problem)

__version__ = "0.1.0"
