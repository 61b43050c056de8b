"""Hot numerical kernels with a compiled core and a pure-numpy fallback.

The Cython extension (`dyadt1.kernels._fast`) and the fallback
(`dyadt1.kernels._ref`) implement the same batched Jacobi eigendecomposition;
whichever imports successfully is selected here. Set DYADT1_PURE=1 to force
the fallback (used by the kernel benchmark and the backend-equivalence tests).
"""

import os

if os.environ.get("DYADT1_PURE", "").strip() not in ("", "0"):
    from . import _ref as _impl
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _ref as _impl

BACKEND = _impl.BACKEND_NAME
jacobi_eigh_batch = _impl.jacobi_eigh_batch


def jacobi_eigh(mat, tol: float = 1e-13, max_sweeps: int = 40):
    """Eigendecomposition of a single symmetric matrix (descending eigenvalues)."""
    return jacobi_eigh_batch(mat, tol=tol, max_sweeps=max_sweeps)
