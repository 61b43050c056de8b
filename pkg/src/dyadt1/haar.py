"""Haar system adapted to a matrix weight on the truncated dyadic tree.

For each internal interval J the construction diagonalizes the symmetric
positive matrix W(J-) W(J+)^{-1} W(J-) + W(J-)  (equal to the product form
W(J) W(J+)^{-1} W(J-)), takes its orthonormal eigenvectors v_J^j with
eigenvalues (w_J^j)^2, and sets

    h_J^j = (w_J^j)^{-1} ( W(J+)^{-1} W(J-) v_J^j  on the right half,
                           -v_J^j                  on the left half ).

The constant functions are spanned by the root block u_i = W(root)^{-1/2} e_i,
which completes the system to an orthonormal basis of the leaf-resolution
weighted space. Coefficients are ordered breadth-first over internal
intervals, j ascending within an interval, root block last.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import ShapeMismatch, SingularLeaf
from .tree import DyadicInterval
from .weights import WeightGrid


class HaarSystem:
    """Adapted basis: per-level eigenvector/value arrays plus the root block."""

    def __init__(self, weight: WeightGrid):
        self.weight = weight
        self.d = weight.d
        self.depth = weight.depth
        self.dim = self.d * (1 << self.depth)
        self._build()
        self._basis: np.ndarray | None = None
        self._analysis: np.ndarray | None = None

    def _build(self):
        d = self.d
        eigvecs, wconsts, lefts, rights = [], [], [], []
        for level in range(self.depth):
            child = self.weight.integrals_level(level + 1)
            wm = child[0::2]  # W(J-)
            wp = child[1::2]  # W(J+)
            wp_inv = linalg.inv_spd_batch(wp, min_eig=1e-300)
            m = np.einsum("kij,kjl,klr->kir", wm, wp_inv, wm) + wm
            m = 0.5 * (m + m.transpose(0, 2, 1))
            vals, vecs = linalg.eigh_batch(m)
            if np.min(vals) <= 0.0:
                raise SingularLeaf("adapted Haar matrix not positive definite")
            w = np.sqrt(vals)
            left = -vecs / w[:, None, :]
            right = np.einsum("kij,kjl,klr->kir", wp_inv, wm, vecs) / w[:, None, :]
            eigvecs.append(vecs)
            wconsts.append(w)
            lefts.append(left)
            rights.append(right)
        self.eigvecs = eigvecs
        self.wconsts = wconsts
        self.left_vals = lefts    # left_vals[l][k][:, j] = h_J^j on J-
        self.right_vals = rights  # right_vals[l][k][:, j] = h_J^j on J+
        self.root_block = linalg.invsqrt_spd(self.weight.integral(DyadicInterval(0, 0)))

    # -- canonical coefficient indexing ------------------------------------

    def offset(self, interval: DyadicInterval, j: int) -> int:
        if not 0 <= j < self.d or interval.level >= self.depth:
            raise ShapeMismatch(f"no Haar function ({interval}, {j}) in this system")
        return (((1 << interval.level) - 1) + interval.index) * self.d + j

    @property
    def root_offset(self) -> int:
        return ((1 << self.depth) - 1) * self.d

    def _check_function(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (1 << self.depth, self.d):
            raise ShapeMismatch(
                f"expected leaf values of shape {(1 << self.depth, self.d)}, "
                f"got {values.shape}"
            )
        return values

    def _check_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.dim,):
            raise ShapeMismatch(f"expected {self.dim} coefficients, got {coeffs.shape}")
        return coeffs

    # -- analysis / synthesis ----------------------------------------------

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Coefficients <f, h>_{L2(W)} in canonical order."""
        values = self._check_function(values)
        d, depth = self.d, self.depth
        coeffs = np.empty(self.dim)
        # S(I) = integral of W f over I, accumulated bottom-up
        s = np.einsum("lij,lj->li", self.weight.leaves, values) * (2.0**-depth)
        for level in range(depth - 1, -1, -1):
            s_left, s_right = s[0::2], s[1::2]
            block = np.einsum("kdj,kd->kj", self.left_vals[level], s_left)
            block += np.einsum("kdj,kd->kj", self.right_vals[level], s_right)
            start = ((1 << level) - 1) * d
            coeffs[start : start + (1 << level) * d] = block.reshape(-1)
            s = s_left + s_right
        coeffs[self.root_offset :] = self.root_block.T @ s[0]
        return coeffs

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """Leaf values of sum(c * basis function)."""
        coeffs = self._check_coeffs(coeffs)
        d, depth = self.d, self.depth
        n = 1 << depth
        out = np.tile(self.root_block @ coeffs[self.root_offset :], (n, 1))
        for level in range(depth):
            start = ((1 << level) - 1) * d
            block = coeffs[start : start + (1 << level) * d].reshape(1 << level, d)
            lv = np.einsum("kdj,kj->kd", self.left_vals[level], block)
            rv = np.einsum("kdj,kj->kd", self.right_vals[level], block)
            half = n >> (level + 1)
            shaped = out.reshape(1 << level, n >> level, d)
            shaped[:, :half] += lv[:, None, :]
            shaped[:, half:] += rv[:, None, :]
        return out

    # -- dense forms ---------------------------------------------------------

    def basis_matrix(self) -> np.ndarray:
        """Columns = flattened leaf values of each basis function (cached)."""
        if self._basis is None:
            d, depth = self.d, self.depth
            n = 1 << depth
            b = np.zeros((n, d, self.dim))
            for level in range(depth):
                half = n >> (level + 1)
                for k in range(1 << level):
                    col = (((1 << level) - 1) + k) * d
                    lo = k * (n >> level)
                    b[lo : lo + half, :, col : col + d] = self.left_vals[level][k]
                    b[lo + half : lo + 2 * half, :, col : col + d] = self.right_vals[level][k]
            b[:, :, self.root_offset :] = self.root_block
            self._basis = b.reshape(n * d, self.dim)
        return self._basis

    def analysis_matrix(self) -> np.ndarray:
        """Rows map flattened leaf values to coefficients: A = B^T diag(|L| W_L)."""
        if self._analysis is None:
            n = 1 << self.depth
            b3 = self.basis_matrix().reshape(n, self.d, self.dim)
            wb = np.einsum("lde,lec->ldc", self.weight.leaves, b3) * (2.0**-self.depth)
            self._analysis = wb.reshape(n * self.d, self.dim).T
        return self._analysis

    def gram(self) -> np.ndarray:
        """Gram matrix of the full system in L2(W); identity if all is well."""
        return self.analysis_matrix() @ self.basis_matrix()

    # -- certificates ----------------------------------------------------------

    def haar_bound_certificate(self) -> float:
        """max over (J, j, side) of || W(J+-)^{1/2} h_J^j(J+-) ||."""
        worst = 0.0
        for level in range(self.depth):
            child = self.weight.integrals_level(level + 1)
            roots_m = linalg.sqrt_spd_batch(child[0::2])
            roots_p = linalg.sqrt_spd_batch(child[1::2])
            lnorm = np.linalg.norm(np.einsum("kde,kej->kdj", roots_m, self.left_vals[level]), axis=1)
            rnorm = np.linalg.norm(np.einsum("kde,kej->kdj", roots_p, self.right_vals[level]), axis=1)
            worst = max(worst, float(lnorm.max()), float(rnorm.max()))
        return worst

    def to_json(self) -> dict:
        intervals = []
        for level in range(self.depth):
            for k in range(1 << level):
                intervals.append(
                    {
                        "interval": [level, k],
                        "eigenvalues": (self.wconsts[level][k] ** 2).tolist(),
                        "eigenvector_columns": self.eigvecs[level][k].T.tolist(),
                        "w_constants": self.wconsts[level][k].tolist(),
                        "left_values": self.left_vals[level][k].T.tolist(),
                        "right_values": self.right_vals[level][k].T.tolist(),
                    }
                )
        return {
            "d": self.d,
            "depth": self.depth,
            "intervals": intervals,
            "root_block": self.root_block.tolist(),
        }


def build_system(weight: WeightGrid) -> HaarSystem:
    return HaarSystem(weight)


def weighted_norm(weight: WeightGrid, values: np.ndarray) -> float:
    """|| f ||_{L2(W)} from leaf values."""
    values = np.asarray(values, dtype=np.float64)
    quad = np.einsum("li,lij,lj->", values, weight.leaves, values)
    return float(np.sqrt(max(quad, 0.0) * 2.0**-weight.depth))


def weighted_expectation(
    weight: WeightGrid, values: np.ndarray, interval: DyadicInterval
) -> np.ndarray:
    """E_I^W f = <W>_I^{-1} <W f>_I on I, zero elsewhere."""
    weight.config.require_member(interval)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (weight.config.n_leaves, weight.d):
        raise ShapeMismatch(f"leaf values shape {values.shape} does not match weight")
    lo, hi = weight.config.leaf_range(interval)
    wf = np.einsum("lij,lj->i", weight.leaves[lo:hi], values[lo:hi])
    wf *= 2.0**-weight.depth / interval.measure
    const = linalg.inv_spd(weight.average(interval), min_eig=1e-300) @ wf
    out = np.zeros_like(values)
    out[lo:hi] = const
    return out
