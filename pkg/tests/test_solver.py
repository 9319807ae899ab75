import math

import numpy as np
import pytest

from planelast import (NotSPDError, SparseSymMatrix, cg_solve,
                       dense_solve_oracle)
from planelast import _kernels_py


def sparse_from_dense(a):
    n = len(a)
    rows, cols = np.nonzero(a)
    return SparseSymMatrix.from_triplets(n, rows, cols, a[rows, cols])


def random_spd(n, seed, density=0.1):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    a[rng.random((n, n)) > density] = 0.0
    a = 0.5 * (a + a.T)
    # diagonally dominant, hence SPD
    a[np.diag_indices(n)] = np.abs(a).sum(axis=1) + 1.0
    return a


def test_from_triplets_sums_duplicates():
    m = SparseSymMatrix.from_triplets(
        2, [0, 0, 1, 0], [0, 1, 1, 0], [1.0, 2.0, 3.0, 4.0])
    dense = m.to_dense()
    assert dense == pytest.approx(np.array([[5.0, 2.0], [0.0, 3.0]]))
    assert m.nnz == 3


def test_matvec_matches_dense():
    a = random_spd(40, 0)
    m = sparse_from_dense(a)
    x = np.random.default_rng(1).standard_normal(40)
    assert m.matvec(x) == pytest.approx(a @ x, rel=1e-13)


def test_diagonal_extraction():
    a = random_spd(17, 2)
    m = sparse_from_dense(a)
    assert m.diagonal() == pytest.approx(np.diag(a))


def test_cg_identity_one_iteration():
    m = sparse_from_dense(np.eye(5))
    b = np.arange(1.0, 6.0)
    x, report = cg_solve(m, b)
    assert report.converged
    assert report.iterations <= 1
    assert x == pytest.approx(b)


def test_cg_two_by_two():
    m = sparse_from_dense(np.array([[2.0, 1.0], [1.0, 2.0]]))
    x, report = cg_solve(m, np.array([3.0, 3.0]))
    assert report.converged
    assert x == pytest.approx([1.0, 1.0], rel=1e-10)


def test_cg_zero_rhs():
    m = sparse_from_dense(np.array([[2.0, 1.0], [1.0, 2.0]]))
    x, report = cg_solve(m, np.zeros(2))
    assert report.converged
    assert report.iterations == 0
    assert (x == 0.0).all()


def test_cg_empty_system():
    m = SparseSymMatrix.from_triplets(0, [], [], [])
    x, report = cg_solve(m, np.empty(0))
    assert report.converged
    assert len(x) == 0


def test_cg_rejects_nonpositive_diagonal():
    m = sparse_from_dense(np.array([[1.0, 0.0], [0.0, -2.0]]))
    with pytest.raises(NotSPDError):
        cg_solve(m, np.ones(2))


def test_cg_max_iter_reports_no_exception():
    a = random_spd(60, 3)
    m = sparse_from_dense(a)
    b = np.ones(60)
    x, report = cg_solve(m, b, tol=1e-14, max_iter=2)
    assert not report.converged
    assert report.iterations == 2


def test_cg_reported_residual_matches_recomputation():
    a = random_spd(80, 4)
    m = sparse_from_dense(a)
    b = np.random.default_rng(5).standard_normal(80)
    x, report = cg_solve(m, b)
    assert report.converged
    recomputed = np.linalg.norm(b - a @ x) / np.linalg.norm(b)
    assert abs(recomputed - report.relative_residual) <= 1e-12


def test_dense_oracle_identity():
    b = np.arange(4.0)
    assert dense_solve_oracle(np.eye(4), b) == pytest.approx(b)


def test_dense_oracle_scalar():
    assert dense_solve_oracle(np.array([[4.0]]), np.array([6.0])) \
        == pytest.approx([1.5])


def test_dense_oracle_rejects_indefinite():
    with pytest.raises(NotSPDError):
        dense_solve_oracle(np.array([[1.0, 2.0], [2.0, 1.0]]), np.ones(2))


def test_dense_oracle_rejects_large_systems():
    with pytest.raises(ValueError):
        dense_solve_oracle(np.eye(2001), np.zeros(2001))


def test_cg_agrees_with_dense_oracle_random_200():
    a = random_spd(200, 6)
    m = sparse_from_dense(a)
    b = np.random.default_rng(7).standard_normal(200)
    x_cg, report = cg_solve(m, b, tol=1e-12)
    x_direct = dense_solve_oracle(a, b)
    assert report.converged
    scale = np.abs(x_direct).max()
    assert np.abs(x_cg - x_direct).max() / scale < 1e-8


def test_structural_symmetry_of_assembled_matrix():
    from planelast import assemble, example1_problem, generate_square_mesh

    mesh = generate_square_mesh(math.pi, 4)
    system = assemble(example1_problem(mesh, 1e4))
    a = system.matrix.to_dense()
    pattern = a != 0.0
    assert (pattern == pattern.T).all()
    assert np.abs(a - a.T).max() == 0.0


def test_python_kernels_match_compiled():
    from planelast import backend

    if backend.BACKEND != "cython":
        pytest.skip("compiled backend unavailable")
    a = random_spd(120, 8)
    m = sparse_from_dense(a)
    x = np.random.default_rng(9).standard_normal(120)
    y_c = backend.csr_matvec(m.indptr, m.indices, m.data, x)
    y_p = _kernels_py.csr_matvec(m.indptr, m.indices, m.data, x)
    assert y_c == pytest.approx(y_p, rel=1e-14, abs=1e-14)
    assert backend.dot(x, y_c) == pytest.approx(_kernels_py.dot(x, y_p),
                                                rel=1e-13)

    rng = np.random.default_rng(10)
    coords = rng.random((50, 3, 2))
    # enforce counterclockwise orientation
    d1 = coords[:, 1] - coords[:, 0]
    d2 = coords[:, 2] - coords[:, 0]
    flip = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) < 0
    coords[flip] = coords[flip][:, [0, 2, 1]]
    mu = rng.uniform(0.5, 2.0, 50)
    lam = rng.uniform(0.0, 100.0, 50)
    k_c = backend.element_stiffness_batch(coords, mu, lam)
    k_p = _kernels_py.element_stiffness_batch(coords, mu, lam)
    assert np.abs(k_c - k_p).max() <= 1e-12 * np.abs(k_p).max()
