"""Sparse symmetric storage and a Jacobi-preconditioned conjugate gradient.

The CG uses sequentially accumulated dot products (via the kernel
backend) so that repeated runs produce bit-identical iterates.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import backend


class NotSPDError(ValueError):
    """The matrix is not symmetric positive definite."""


@dataclass
class SolveReport:
    iterations: int
    relative_residual: float
    converged: bool


class SparseSymMatrix:
    """Compressed sparse row storage of a symmetric matrix.

    The full pattern is stored (both triangles); column indices are
    sorted ascending within each row and duplicate triplets are summed
    in their order of appearance, which makes assembly deterministic.
    """

    def __init__(self, n, indptr, indices, data):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        if len(self.indptr) != self.n + 1:
            raise ValueError("indptr must have length n + 1")

    @classmethod
    def from_triplets(cls, n, rows, cols, values):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if len(rows) == 0:
            return cls(n, np.zeros(n + 1, dtype=np.int64),
                       np.empty(0, dtype=np.int64), np.empty(0))
        order = np.lexsort((cols, rows))  # stable: keeps insertion order
        r, c, v = rows[order], cols[order], values[order]
        first = np.empty(len(r), dtype=bool)
        first[0] = True
        first[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
        starts = np.flatnonzero(first)
        data = np.add.reduceat(v, starts)
        rr, cc = r[starts], c[starts]
        counts = np.bincount(rr, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, cc, data)

    @property
    def nnz(self):
        return len(self.data)

    def matvec(self, x):
        return backend.csr_matvec(self.indptr, self.indices, self.data,
                                  np.ascontiguousarray(x, dtype=np.float64))

    def diagonal(self):
        d = np.zeros(self.n)
        row_of = np.repeat(np.arange(self.n), np.diff(self.indptr))
        on_diag = row_of == self.indices
        d[row_of[on_diag]] = self.data[on_diag]
        return d

    def to_dense(self):
        a = np.zeros((self.n, self.n))
        row_of = np.repeat(np.arange(self.n), np.diff(self.indptr))
        a[row_of, self.indices] = self.data
        return a


def cg_solve(A, b, tol=1e-10, max_iter=None):
    """Solve ``A x = b`` by Jacobi-preconditioned conjugate gradients.

    Returns ``(x, SolveReport)``.  Convergence means the recomputed true
    residual satisfies ``||b - A x|| <= tol * ||b||``.  Running out of
    iterations yields a report with ``converged=False`` (no exception);
    a non-positive diagonal entry raises :class:`NotSPDError`.
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    n = A.n
    if len(b) != n:
        raise ValueError("dimension mismatch")
    if n == 0:
        return np.empty(0), SolveReport(0, 0.0, True)
    if max_iter is None:
        max_iter = 20 * n

    bnorm = np.sqrt(backend.dot(b, b))
    if bnorm == 0.0:
        return np.zeros(n), SolveReport(0, 0.0, True)

    d = A.diagonal()
    if (d <= 0.0).any():
        raise NotSPDError("non-positive diagonal entry")

    x = np.zeros(n)
    r = b.copy()
    z = r / d
    p = z.copy()
    rz = backend.dot(r, z)
    it = 0
    best_true = np.inf
    while it < max_iter:
        it += 1
        Ap = A.matvec(p)
        pAp = backend.dot(p, Ap)
        if pAp <= 0.0:
            raise NotSPDError("non-positive curvature encountered in CG")
        a = rz / pAp
        x += a * p
        r -= a * Ap
        if np.sqrt(backend.dot(r, r)) <= tol * bnorm:
            r_true = b - A.matvec(x)
            rnorm = np.sqrt(backend.dot(r_true, r_true))
            if rnorm <= tol * bnorm:
                return x, SolveReport(it, rnorm / bnorm, True)
            if rnorm >= 0.9 * best_true:
                # True residual no longer improves: the requested tolerance
                # sits below the floating-point floor for this system.
                return x, SolveReport(it, rnorm / bnorm, False)
            best_true = rnorm
            # Recurrence residual drifted: restart from the true residual.
            r = r_true
            z = r / d
            p = z.copy()
            rz = backend.dot(r, z)
            continue
        z = r / d
        rz_next = backend.dot(r, z)
        p = z + (rz_next / rz) * p
        rz = rz_next

    r_true = b - A.matvec(x)
    rnorm = np.sqrt(backend.dot(r_true, r_true))
    return x, SolveReport(it, rnorm / bnorm, rnorm <= tol * bnorm)


def dense_solve_oracle(A, b):
    """Direct Cholesky solve of a dense SPD system (test oracle, n <= 2000)."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[0]
    if n > 2000:
        raise ValueError("oracle limited to n <= 2000")
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    try:
        factor = scipy.linalg.cho_factor(A, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotSPDError(str(exc)) from None
    return scipy.linalg.cho_solve(factor, b)
