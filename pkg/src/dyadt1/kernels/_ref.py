"""Pure-numpy fallback for the compiled kernels.

Implements the same batched cyclic Jacobi eigendecomposition as the Cython
extension, vectorized over the batch axis so the fallback stays usable on
full sweeps. Column/row rotations follow the classical symmetric Schur
recipe; eigenvalues are returned in descending order (stable for ties) and
eigenvector signs are fixed so the first non-negligible component is
positive.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

_SIGN_TOL = 1e-8


def jacobi_eigh_batch(mats, tol: float = 1e-13, max_sweeps: int = 40):
    """Eigendecomposition of a batch of symmetric matrices.

    Parameters
    ----------
    mats : (m, n, n) or (n, n) array of symmetric matrices.
    tol : relative off-diagonal mass at which a matrix counts as diagonal.
    max_sweeps : cap on cyclic sweeps (small n converges in a handful).

    Returns (w, v): eigenvalues (m, n) descending and eigenvector columns
    (m, n, n); batch axis squeezed away for 2-d input.
    """
    a = np.array(mats, dtype=np.float64)
    single = a.ndim == 2
    if single:
        a = a[None]
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected (m, n, n) batch, got shape {a.shape}")
    m, n, _ = a.shape
    v = np.broadcast_to(np.eye(n), a.shape).copy()
    if n > 1 and m > 0:
        fro = np.sqrt(np.einsum("mij,mij->m", a, a))
        thresh = tol * np.maximum(fro, 1e-300)
        for _ in range(max_sweeps):
            off = np.sqrt(2.0 * sum(np.sum(a[:, p, p + 1:] ** 2, axis=1) for p in range(n - 1)))
            if np.all(off <= thresh):
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[:, p, q].copy()
                    app = a[:, p, p]
                    aqq = a[:, q, q]
                    # symmetric Schur rotation zeroing a_pq; skip |a_pq| ~ 0
                    nz = np.abs(apq) > 1e-300
                    tau = np.zeros(m)
                    np.divide(aqq - app, 2.0 * apq, out=tau, where=nz)
                    sign = np.where(tau >= 0.0, 1.0, -1.0)
                    t = np.where(nz, sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    _rotate(a, v, p, q, c, s)
    w = np.einsum("mii->mi", a).copy()
    w, v = _order_and_sign(w, v)
    if single:
        return w[0], v[0]
    return w, v


def _rotate(a, v, p, q, c, s):
    cb = c[:, None]
    sb = s[:, None]
    acp = a[:, :, p].copy()
    acq = a[:, :, q].copy()
    a[:, :, p] = cb * acp - sb * acq
    a[:, :, q] = sb * acp + cb * acq
    arp = a[:, p, :].copy()
    arq = a[:, q, :].copy()
    a[:, p, :] = cb * arp - sb * arq
    a[:, q, :] = sb * arp + cb * arq
    vcp = v[:, :, p].copy()
    vcq = v[:, :, q].copy()
    v[:, :, p] = cb * vcp - sb * vcq
    v[:, :, q] = sb * vcp + cb * vcq


def _order_and_sign(w, v):
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    # first component with magnitude above _SIGN_TOL * colmax decides the sign
    absv = np.abs(v)
    colmax = absv.max(axis=1)
    significant = absv > _SIGN_TOL * np.maximum(colmax, 1e-300)[:, None, :]
    first = np.argmax(significant, axis=1)
    m, n, _ = v.shape
    mi, ci = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
    lead = v[mi, first.reshape(m, n), ci]
    flip = np.where(lead < 0.0, -1.0, 1.0)
    v = v * flip[:, None, :]
    return w, v
