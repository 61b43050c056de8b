"""Testing constants, paraproducts and the certification report.

The three testing constants are computed exactly at truncation: the supremum
over probe vectors is a generalized eigenvalue of a small Gram matrix
whitened by the interval integral of the weight, so no direction sampling
enters the headline numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadParams
from .haar import build_system
from .operators import (
    BandOperator,
    _check_shapes,
    is_band,
    leaf_action_matrix,
    matrix_form_from_systems,
)
from .weights import Characteristics, WeightGrid

NECESSITY_RTOL = 1e-9


def _indicator_images(op: BandOperator, weight_w: WeightGrid) -> list[np.ndarray]:
    """Leaf values of T_W 1_I e_a for every tree interval, breadth first.

    images[idx] has shape (n_leaves, d, d) with column a = T_W 1_I e_a.
    """
    _check_shapes(op, weight_w)
    action = leaf_action_matrix(op)
    config = weight_w.config
    n, d = config.n_leaves, weight_w.d
    images = []
    for interval in config.intervals():
        lo, hi = config.leaf_range(interval)
        x = np.zeros((n, d, d))
        x[lo:hi] = weight_w.leaves[lo:hi]
        f = (action @ x.reshape(n * d, d)).reshape(n, d, d)
        images.append(f)
    return images


def _best_constant(images, weight_w: WeightGrid, weight_v: WeightGrid, local: bool) -> float:
    """max over I of || T_W 1_I e ||_{L2(V)} / <W(I) e, e>^{1/2}, exact over e."""
    config = weight_w.config
    scale = 2.0**-weight_w.depth
    worst = 0.0
    idx = 0
    for interval in config.intervals():
        f = images[idx]
        idx += 1
        lo, hi = config.leaf_range(interval)
        if local:
            sel = slice(lo, hi)
        else:
            sel = slice(None)
        q = np.einsum("lia,lij,ljb->ab", f[sel], weight_v.leaves[sel], f[sel]) * scale
        q = 0.5 * (q + q.T)
        wi_invsqrt = linalg.invsqrt_spd(weight_w.integral(interval), min_eig=1e-300)
        white = wi_invsqrt @ q @ wi_invsqrt
        top = float(linalg.top_eig_sym_batch(0.5 * (white + white.T)))
        worst = max(worst, top)
    return float(np.sqrt(max(worst, 0.0)))


def testing_a1(op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid) -> float:
    """Smallest A1 with ||T_W 1_I e||_{L2(V)} <= A1 <W(I)e,e>^{1/2} on the tree."""
    return _best_constant(_indicator_images(op, weight_w), weight_w, weight_v, local=False)


def testing_a2_dual(op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid) -> float:
    """Dual constant: same construction for T_V* with the roles swapped."""
    return testing_a1(op.transpose(), weight_v, weight_w)


def testing_local(op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid) -> tuple[float, float]:
    """(A1_local, A2_local): the condition-(i) constants with the 1_I cutoff."""
    a1l = _best_constant(_indicator_images(op, weight_w), weight_w, weight_v, local=True)
    a2l = _best_constant(
        _indicator_images(op.transpose(), weight_v), weight_v, weight_w, local=True
    )
    return a1l, a2l


def testing_a3(op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid, radius: int) -> float:
    """Condition-(ii) constant over pairs with 2^-r |I| <= |J| <= 2^r |I|."""
    if radius < 0:
        raise BadParams("radius must be >= 0")
    _check_shapes(op, weight_v)
    images = _indicator_images(op, weight_w)
    config = weight_w.config
    depth, d = weight_w.depth, weight_w.d
    scale = 2.0**-depth

    # node integrals of V * (T_W 1_I e_a) for every I: per-level arrays
    per_interval = []
    for f in images:
        s = np.einsum("lbj,lja->lba", weight_v.leaves, f) * scale
        levels = [s]
        for _ in range(depth):
            s = s[0::2] + s[1::2]
            levels.insert(0, s)
        per_interval.append(levels)

    inv_w = [
        linalg.invsqrt_spd_batch(weight_w.integrals_level(lev), min_eig=1e-300).reshape(-1, d, d)
        for lev in range(depth + 1)
    ]
    inv_v = [
        linalg.invsqrt_spd_batch(weight_v.integrals_level(lev), min_eig=1e-300).reshape(-1, d, d)
        for lev in range(depth + 1)
    ]

    worst = 0.0
    idx = 0
    for interval in config.intervals():
        levels = per_interval[idx]
        wi = inv_w[interval.level][interval.index]
        idx += 1
        for lev_j in range(
            max(0, interval.level - radius), min(depth, interval.level + radius) + 1
        ):
            m = levels[lev_j].transpose(0, 2, 1)  # (2^lev, a, b)
            mats = np.einsum("ij,kjl,klm->kim", wi, m, inv_v[lev_j])
            norms = linalg.spectral_norm_small_batch(mats)
            worst = max(worst, float(np.max(norms)))
    return worst


def build_paraproduct(
    op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid, radius: int
) -> np.ndarray:
    """Matrix of the paraproduct from the W-adapted basis to the V-adapted one.

    Pi f = sum over I, over J inside I with |J| = 2^-r |I|, of
    <T_W E_I^W f, h_J^{V,j}> h_J^{V,j}.

    The dual paraproduct (driven by the adjoint) is the same call with
    (op.transpose(), weight_v, weight_w).
    """
    if radius < 0:
        raise BadParams("radius must be >= 0")
    if weight_w.depth <= radius:
        raise BadParams(f"need depth > radius, got depth={weight_w.depth}, r={radius}")
    _check_shapes(op, weight_w)
    _check_shapes(op, weight_v)
    sys_w = build_system(weight_w)
    sys_v = build_system(weight_v)
    d, depth = weight_w.d, weight_w.depth
    n = 1 << depth
    pipeline = sys_v.analysis_matrix() @ leaf_action_matrix(op)

    # interval integrals of W * (each W-basis function): prefix sums over leaves
    bw3 = sys_w.basis_matrix().reshape(n, d, sys_w.dim)
    wb = np.einsum("lij,ljc->lic", weight_w.leaves, bw3) * (2.0**-depth)
    pref = np.concatenate([np.zeros((1, d, sys_w.dim)), np.cumsum(wb, axis=0)])

    pi = np.zeros((sys_v.dim, sys_w.dim))
    for level in range(depth - radius):
        inv_avg = linalg.inv_spd_batch(weight_w.averages_level(level), min_eig=1e-300)
        width = n >> level
        for k in range(1 << level):
            lo, hi = k * width, (k + 1) * width
            x = np.zeros((n, d, d))
            x[lo:hi] = np.einsum("lij,jk->lik", weight_w.leaves[lo:hi], inv_avg[k])
            cv = pipeline @ x.reshape(n * d, d)  # coefficients of T_W(<W>_I^{-1} e 1_I)
            lev_j = level + radius
            row = (((1 << lev_j) - 1) + (k << radius)) * d
            rows = slice(row, row + (1 << radius) * d)
            avg = (pref[hi] - pref[lo]) * (2.0**level)  # <W phi>_I, shape (d, dim)
            pi[rows, :] += cv[rows, :] @ avg
    return pi


@dataclass(frozen=True)
class TestingConstants:
    a1: float
    a2: float
    a1_local: float
    a2_local: float
    a3: float

    def to_json(self) -> dict:
        return {
            "a1": self.a1,
            "a2": self.a2,
            "a1_local": self.a1_local,
            "a2_local": self.a2_local,
            "a3": self.a3,
        }


def testing_constants(
    op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid, radius: int
) -> TestingConstants:
    a1 = testing_a1(op, weight_w, weight_v)
    a2 = testing_a2_dual(op, weight_w, weight_v)
    a1_local, a2_local = testing_local(op, weight_w, weight_v)
    a3 = testing_a3(op, weight_w, weight_v, radius)
    return TestingConstants(a1=a1, a2=a2, a1_local=a1_local, a2_local=a2_local, a3=a3)


@dataclass(frozen=True)
class CertificationReport:
    constants: TestingConstants
    char_w: Characteristics
    char_v: Characteristics
    measured_norm: float
    bound_thm1: float
    bound_thm2: float
    c_cfg: float
    radius: int
    necessity_ok: bool
    warnings: tuple[str, ...]
    d: int
    depth: int
    seed: int
    n_samples: int

    def to_json(self) -> dict:
        return {
            "constants": self.constants.to_json(),
            "char_w": self.char_w.to_json(self.d),
            "char_v": self.char_v.to_json(self.d),
            "measured_norm": self.measured_norm,
            "bound_thm1": self.bound_thm1,
            "bound_thm2": self.bound_thm2,
            "c_cfg": self.c_cfg,
            "radius": self.radius,
            "necessity_ok": self.necessity_ok,
            "warnings": list(self.warnings),
            "provenance": {
                "d": self.d,
                "depth": self.depth,
                "r": self.radius,
                "seed": self.seed,
                "n_samples": self.n_samples,
                "tolerances": {"necessity_rtol": NECESSITY_RTOL},
            },
        }


def certify(
    op: BandOperator,
    weight_w: WeightGrid,
    weight_v: WeightGrid,
    radius: int,
    c_cfg: float = 1.0,
    n_samples: int = 32,
    seed: int = 0,
) -> CertificationReport:
    """Assemble testing constants, characteristics, measured norm and bounds."""
    _check_shapes(op, weight_w)
    _check_shapes(op, weight_v)
    weight_w.require_same_shape(weight_v)
    warnings = []
    if not is_band(op, radius):
        warnings.append(f"operator is not band of radius {radius}")
    constants = testing_constants(op, weight_w, weight_v, radius)
    char_w = Characteristics.compute(weight_w, n_samples=n_samples, seed=seed)
    char_v = Characteristics.compute(weight_v, n_samples=n_samples, seed=seed)
    sys_w = build_system(weight_w)
    sys_v = build_system(weight_v)
    norm = linalg.spectral_norm_dense(matrix_form_from_systems(op, sys_w, sys_v))
    factor = float(4.0**radius) * c_cfg
    bound1 = factor * (constants.a1 * char_w.b_w + constants.a2 * char_v.b_w)
    bound2 = factor * (
        constants.a1_local * char_w.b_w + constants.a2_local * char_v.b_w + constants.a3
    )
    slack = norm * (1.0 + NECESSITY_RTOL) + 1e-300
    necessity_ok = (
        constants.a1 <= slack and constants.a2 <= slack and constants.a3 <= slack
    )
    return CertificationReport(
        constants=constants,
        char_w=char_w,
        char_v=char_v,
        measured_norm=norm,
        bound_thm1=bound1,
        bound_thm2=bound2,
        c_cfg=c_cfg,
        radius=radius,
        necessity_ok=necessity_ok,
        warnings=tuple(warnings),
        d=op.d,
        depth=op.depth,
        seed=seed,
        n_samples=n_samples,
    )
