"""Kernel backend selection.

The compiled extension is preferred; the NumPy fallback is used when it
is missing or when the environment variable ``PLANELAST_PURE`` is set
(useful for testing and benchmarking the pure path).
"""

import os

if os.environ.get("PLANELAST_PURE"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"

csr_matvec = kernels.csr_matvec
dot = kernels.dot
element_stiffness_batch = kernels.element_stiffness_batch
