"""Independent verification oracles.

Everything here deliberately avoids the production code paths: the SVD is a
one-sided Jacobi, the dense eigensolver is a plain scalar-loop cyclic Jacobi,
and the sharp-constant oracle assembles and solves the whitened eigenproblem
densely. They exist so the power-iteration routes in linalg.py are checked
against a different algorithm, not against themselves.
"""

from __future__ import annotations

import numpy as np


def jacobi_svd_values(mat, tol: float = 1e-13, max_sweeps: int = 60) -> np.ndarray:
    """Singular values (descending) via one-sided Jacobi column orthogonalization."""
    u = np.array(mat, dtype=np.float64)
    if u.ndim != 2:
        raise ValueError("expected a matrix")
    if u.shape[0] < u.shape[1]:
        u = u.T.copy()
    n = u.shape[1]
    scale = max(float(np.max(np.abs(u))), 1e-300)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = u[:, p] @ u[:, p]
                beta = u[:, q] @ u[:, q]
                gamma = u[:, p] @ u[:, q]
                if abs(gamma) <= tol * scale * scale:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) if zeta != 0 else 1.0
                t /= abs(zeta) + np.sqrt(1.0 + zeta * zeta)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                up = u[:, p].copy()
                u[:, p] = c * up - s * u[:, q]
                u[:, q] = s * up + c * u[:, q]
        if not rotated:
            break
    sigma = np.sqrt(np.sum(u * u, axis=0))
    return np.sort(sigma)[::-1]


def jacobi_eigh_dense(mat, tol: float = 1e-13, max_sweeps: int = 60):
    """Full eigendecomposition of a symmetric matrix by scalar-loop cyclic Jacobi."""
    a = np.array(mat, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    fro = max(float(np.sqrt(np.sum(a * a))), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * sum(float(a[p, p + 1 :] @ a[p, p + 1 :]) for p in range(n - 1)))
        if off <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= 1e-300:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for arr in (a,):
                    colp = arr[:, p].copy()
                    arr[:, p] = c * colp - s * arr[:, q]
                    arr[:, q] = s * colp + c * arr[:, q]
                    rowp = arr[p, :].copy()
                    arr[p, :] = c * rowp - s * arr[q, :]
                    arr[q, :] = s * rowp + c * arr[q, :]
                colp = v[:, p].copy()
                v[:, p] = c * colp - s * v[:, q]
                v[:, q] = s * colp + c * v[:, q]
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def spectral_norm_oracle(mat) -> float:
    """Largest singular value via the one-sided Jacobi SVD."""
    values = jacobi_svd_values(mat)
    return float(values[0]) if values.size else 0.0


def embedding_sharp_oracle(instance, weight) -> float:
    """Sharp embedding constant via a fully dense symmetric eigensolve."""
    from .carleson import embedding_quadratic_form

    instance.require_match(weight)
    d, depth = instance.d, instance.depth
    n = 1 << depth
    q = embedding_quadratic_form(instance)
    g = np.zeros((n * d, n * d))
    for leaf in range(n):
        w_leaf, v_leaf = jacobi_eigh_dense(weight.leaves[leaf])
        inv = (v_leaf / w_leaf) @ v_leaf.T
        g[leaf * d : (leaf + 1) * d, leaf * d : (leaf + 1) * d] = inv * 2.0**-depth
    wg, vg = jacobi_eigh_dense(g)
    ginvhalf = (vg / np.sqrt(wg)) @ vg.T
    s = ginvhalf @ q @ ginvhalf
    w, _ = jacobi_eigh_dense(0.5 * (s + s.T))
    return float(max(w[0], 0.0))


def a3_direction_search(
    op, weight_w, weight_v, radius: int, grid: int = 24, refinements: int = 8
) -> float:
    """Lower bound on the condition-(ii) constant by refined direction sampling.

    Scans unit vectors e, nu (angle grids for d = 2, signs for d = 1) around
    the incumbent maximum, refining the bracket geometrically; converges from
    below to the exact whitened norm.
    """
    from .certifier import _indicator_images
    from .linalg import sqrt_spd

    d = weight_w.d
    if d > 2:
        raise ValueError("direction-search oracle implemented for d <= 2")
    images = _indicator_images(op, weight_w)
    config = weight_w.config
    depth = weight_w.depth
    scale = 2.0**-depth

    def directions(center: float, width: float):
        if d == 1:
            return np.array([[1.0]])
        angles = center + width * np.linspace(-1.0, 1.0, grid)
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)

    worst = 0.0
    idx = 0
    for interval_i in config.intervals():
        f = images[idx]
        idx += 1
        wi = sqrt_spd(weight_w.integral(interval_i))
        for interval_j in config.intervals():
            if abs(interval_j.level - interval_i.level) > radius:
                continue
            lo, hi = config.leaf_range(interval_j)
            m = np.einsum("lia,lij->aj", f[lo:hi], weight_v.leaves[lo:hi]) * scale
            vj = sqrt_spd(weight_v.integral(interval_j))
            ce, cn, we, wn = 0.0, 0.0, np.pi, np.pi
            best = 0.0
            for _ in range(refinements if d == 2 else 1):
                es = directions(ce, we)
                ns = directions(cn, wn)
                vals = np.abs(es @ m @ ns.T)
                dens = np.outer(
                    np.linalg.norm(es @ wi, axis=1), np.linalg.norm(ns @ vj, axis=1)
                )
                ratios = vals / dens
                a, b = np.unravel_index(np.argmax(ratios), ratios.shape)
                best = max(best, float(ratios[a, b]))
                if d == 2:
                    ce = ce + we * np.linspace(-1.0, 1.0, grid)[a]
                    cn = cn + wn * np.linspace(-1.0, 1.0, grid)[b]
                    we *= 3.0 / grid
                    wn *= 3.0 / grid
            worst = max(worst, best)
    return worst
