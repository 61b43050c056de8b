"""Shared dense linear algebra built on the Jacobi kernels.

Small d x d symmetric work (square roots, inverses, spectral norms) goes
through the batched Jacobi eigendecomposition; large dense symmetric tops
use deterministic block power iteration, so every headline number in the
package is reproducible bit-for-bit for a fixed install.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import SingularLeaf

# deterministic start for every power iteration in the package
_POWER_SEED = 0x0D1A_D715


def eigh(mat):
    return kernels.jacobi_eigh(np.asarray(mat, dtype=np.float64))


def eigh_batch(mats):
    return kernels.jacobi_eigh_batch(np.asarray(mats, dtype=np.float64))


def transform_spd_batch(mats, fn, min_eig: float | None = None, what: str = "matrix"):
    """Apply a spectral function to a batch of symmetric matrices.

    If min_eig is given, raises SingularLeaf when any eigenvalue falls at or
    below it (the guard for inverse-type transforms).
    """
    a = np.asarray(mats, dtype=np.float64)
    single = a.ndim == 2
    if single:
        a = a[None]
    w, v = kernels.jacobi_eigh_batch(a)
    if min_eig is not None and np.min(w) <= min_eig:
        raise SingularLeaf(
            f"{what}: eigenvalue {np.min(w):.3e} at or below floor {min_eig:.3e}"
        )
    out = np.einsum("mij,mj,mkj->mik", v, fn(w), v)
    out = 0.5 * (out + np.swapaxes(out, 1, 2))
    return out[0] if single else out


def sqrt_spd(mat):
    return transform_spd_batch(mat, lambda w: np.sqrt(np.maximum(w, 0.0)))


def sqrt_spd_batch(mats):
    return transform_spd_batch(mats, lambda w: np.sqrt(np.maximum(w, 0.0)))


def invsqrt_spd(mat, min_eig: float = 1e-14):
    return transform_spd_batch(mat, lambda w: 1.0 / np.sqrt(w), min_eig=min_eig)


def invsqrt_spd_batch(mats, min_eig: float = 1e-14):
    return transform_spd_batch(mats, lambda w: 1.0 / np.sqrt(w), min_eig=min_eig)


def inv_spd(mat, min_eig: float = 1e-14):
    return transform_spd_batch(mat, lambda w: 1.0 / w, min_eig=min_eig)


def inv_spd_batch(mats, min_eig: float = 1e-14):
    return transform_spd_batch(mats, lambda w: 1.0 / w, min_eig=min_eig)


def min_eig_batch(mats):
    w, _ = eigh_batch(mats)
    return w[..., -1] if w.ndim > 1 else w[-1]


def sym_spectral_norm_batch(mats):
    """max |eigenvalue| for a batch of symmetric matrices."""
    w, _ = eigh_batch(mats)
    if w.ndim == 1:
        return max(abs(w[0]), abs(w[-1]))
    return np.maximum(np.abs(w[:, 0]), np.abs(w[:, -1]))


def top_eig_sym_batch(mats):
    """Largest eigenvalue for a batch of symmetric matrices (Jacobi)."""
    w, _ = eigh_batch(mats)
    return w[..., 0]


def spectral_norm_small_batch(mats):
    """Largest singular value per matrix via Jacobi on the small Gram."""
    a = np.asarray(mats, dtype=np.float64)
    single = a.ndim == 2
    if single:
        a = a[None]
    gram = np.einsum("mji,mjk->mik", a, a)
    top = np.maximum(top_eig_sym_batch(gram), 0.0)
    out = np.sqrt(top)
    return out[0] if single else out


def top_eigval_psd(s, rtol: float = 1e-14, max_iter: int = 50000, block: int = 6):
    """Largest eigenvalue of a symmetric PSD matrix via block power iteration.

    Deterministic seeded start; Ritz value must be stable to rtol for four
    consecutive iterations before we accept it.
    """
    s = np.asarray(s, dtype=np.float64)
    n = s.shape[0]
    if n == 0:
        return 0.0
    b = min(block, n)
    rng = np.random.default_rng(_POWER_SEED)
    q, _ = np.linalg.qr(rng.standard_normal((n, b)))
    lam = 0.0
    hits = 0
    for _ in range(max_iter):
        z = s @ q
        if not np.any(z):
            return 0.0
        ritz = q.T @ z
        w, _ = eigh(0.5 * (ritz + ritz.T))
        new = float(w[0])
        if abs(new - lam) <= rtol * max(abs(new), 1e-300):
            hits += 1
            if hits >= 4:
                lam = new
                break
        else:
            hits = 0
        lam = new
        q, _ = np.linalg.qr(z)
    return float(max(lam, 0.0))


def spectral_norm_dense(m, rtol: float = 1e-14):
    """Largest singular value via power iteration on the Gram matrix."""
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return 0.0
    if m.shape[0] < m.shape[1]:
        gram = m @ m.T
    else:
        gram = m.T @ m
    return float(np.sqrt(top_eigval_psd(gram, rtol=rtol)))


def symmetrize_checked(mat, tol: float, what: str = "matrix"):
    """Symmetrize and fail if the asymmetric part exceeds tol (absolute)."""
    from .errors import BadParams

    a = np.asarray(mat, dtype=np.float64)
    dev = np.max(np.abs(a - a.T)) if a.size else 0.0
    if dev > tol:
        raise BadParams(f"{what} deviates from symmetry by {dev:.3e} (tol {tol:.1e})")
    return 0.5 * (a + a.T)
