"""Pure NumPy implementations of the hot kernels.

Selected at import time when the compiled extension is unavailable or
``PLANELAST_PURE`` is set; see :mod:`planelast.backend`.
"""

import numpy as np


def csr_matvec(indptr, indices, data, x):
    n = len(indptr) - 1
    nnz = len(data)
    if nnz == 0:
        return np.zeros(n)
    prod = data * x[indices]
    starts = np.minimum(indptr[:-1], nnz - 1)
    y = np.add.reduceat(prod, starts)
    empty = indptr[:-1] == indptr[1:]
    if empty.any():
        y[empty] = 0.0
    return y


def dot(a, b):
    return float(np.dot(a, b))


def element_stiffness_batch(coords, mu, lam):
    """Per-element 6x6 stiffness blocks for the P1 vector element.

    coords: (T, 3, 2) vertex coordinates (counterclockwise)
    mu, lam: (T,) effective coefficients per element
    """
    x = coords[..., 0]
    y = coords[..., 1]
    two_a = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) \
        - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    # Barycentric gradients: grad phi_a = (b_a, c_a) / (2A), cyclic.
    gx = (y[:, [1, 2, 0]] - y[:, [2, 0, 1]]) / two_a[:, None]
    gy = (x[:, [2, 0, 1]] - x[:, [1, 2, 0]]) / two_a[:, None]

    area = 0.5 * two_a
    lam2mu = (lam + 2.0 * mu)[:, None, None] * area[:, None, None]
    mua = mu[:, None, None] * area[:, None, None]
    lama = lam[:, None, None] * area[:, None, None]

    gxx = gx[:, :, None] * gx[:, None, :]
    gyy = gy[:, :, None] * gy[:, None, :]
    gxy = gx[:, :, None] * gy[:, None, :]
    gyx = gy[:, :, None] * gx[:, None, :]

    out = np.empty((len(coords), 6, 6))
    out[:, 0::2, 0::2] = lam2mu * gxx + mua * gyy
    out[:, 0::2, 1::2] = lama * gxy + mua * gyx
    out[:, 1::2, 0::2] = lama * gyx + mua * gxy
    out[:, 1::2, 1::2] = lam2mu * gyy + mua * gxx
    return out
