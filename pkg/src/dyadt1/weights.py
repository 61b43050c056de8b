"""Matrix weights as per-leaf positive-definite matrices on the dyadic tree.

A weight is piecewise constant at the leaf level, so every integral over a
tree interval is a finite sum of leaf values times leaf measures. Node
integrals are accumulated bottom-up (parent = left child + right child), so
additivity over children holds exactly in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadParams, ShapeMismatch, SingularLeaf
from .tree import DyadicInterval, TreeConfig

DEFAULT_EPS_PD = 1e-10
SYMMETRY_TOL = 1e-9


class WeightGrid:
    """d x d symmetric positive-definite matrix per leaf at depth N."""

    def __init__(self, leaves, eps_pd: float = DEFAULT_EPS_PD):
        leaves = np.array(leaves, dtype=np.float64)
        if leaves.ndim == 1:  # scalar weights given as a flat sequence
            leaves = leaves[:, None, None]
        if leaves.ndim != 3 or leaves.shape[1] != leaves.shape[2]:
            raise BadParams(f"leaves must be (2^N, d, d), got {leaves.shape}")
        n_leaves = leaves.shape[0]
        depth = int(n_leaves).bit_length() - 1
        if n_leaves < 2 or (1 << depth) != n_leaves:
            raise BadParams(f"leaf count {n_leaves} is not a power of two >= 2")
        dev = np.max(np.abs(leaves - leaves.transpose(0, 2, 1)))
        if dev > SYMMETRY_TOL:
            raise BadParams(f"leaf symmetry deviation {dev:.3e} exceeds {SYMMETRY_TOL:.1e}")
        leaves = 0.5 * (leaves + leaves.transpose(0, 2, 1))
        min_eig = float(np.min(linalg.min_eig_batch(leaves)))
        if min_eig < eps_pd:
            raise SingularLeaf(
                f"leaf minimum eigenvalue {min_eig:.3e} below floor {eps_pd:.1e}"
            )
        self.leaves = leaves
        self.d = leaves.shape[1]
        self.depth = depth
        self.eps_pd = eps_pd
        self.config = TreeConfig(depth)
        self._node_integrals: list[np.ndarray] | None = None
        self._inverse: WeightGrid | None = None

    # -- integrals and averages ------------------------------------------

    def _integrals(self) -> list[np.ndarray]:
        """Per-level arrays of node integrals W(I); level l has shape (2^l, d, d)."""
        if self._node_integrals is None:
            levels = [self.leaves * (2.0 ** -self.depth)]
            for _ in range(self.depth):
                prev = levels[0]
                levels.insert(0, prev[0::2] + prev[1::2])
            self._node_integrals = levels
        return self._node_integrals

    def integral(self, interval: DyadicInterval) -> np.ndarray:
        """W(I), the exact leaf sum of |L| * W(L) over leaves inside I."""
        self.config.require_member(interval)
        return self._integrals()[interval.level][interval.index].copy()

    def average(self, interval: DyadicInterval) -> np.ndarray:
        """<W>_I = W(I) / |I|."""
        self.config.require_member(interval)
        return self.integral(interval) * (2.0 ** interval.level)

    def integrals_level(self, level: int) -> np.ndarray:
        return self._integrals()[level]

    def averages_level(self, level: int) -> np.ndarray:
        return self._integrals()[level] * (2.0 ** level)

    # -- derived grids ----------------------------------------------------

    def inverse(self) -> "WeightGrid":
        """Leafwise matrix inverse, cached; errors if conditioning is too poor."""
        if self._inverse is None:
            try:
                inv = linalg.inv_spd_batch(self.leaves, min_eig=self.eps_pd)
                self._inverse = WeightGrid(inv, eps_pd=self.eps_pd)
            except SingularLeaf as exc:
                raise SingularLeaf(
                    f"inverse weight exceeds conditioning limit 1/{self.eps_pd:.1e}: {exc}"
                ) from exc
        return self._inverse

    def scaled(self, c: float) -> "WeightGrid":
        if c <= 0:
            raise BadParams("scale factor must be positive")
        return WeightGrid(self.leaves * c, eps_pd=min(self.eps_pd, self.eps_pd * c))

    # -- plumbing ----------------------------------------------------------

    def require_same_shape(self, other: "WeightGrid") -> None:
        if self.d != other.d or self.depth != other.depth:
            raise ShapeMismatch(
                f"weight shapes differ: (d={self.d}, N={self.depth}) vs "
                f"(d={other.d}, N={other.depth})"
            )

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "depth": self.depth,
            "leaves": [leaf.reshape(-1).tolist() for leaf in self.leaves],
        }

    @classmethod
    def from_json(cls, obj: dict, eps_pd: float = DEFAULT_EPS_PD) -> "WeightGrid":
        try:
            d = int(obj["d"])
            depth = int(obj["depth"])
            raw = obj["leaves"]
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParams(f"malformed weight JSON: {exc}") from exc
        if len(raw) != (1 << depth):
            raise BadParams(f"expected {1 << depth} leaves, got {len(raw)}")
        leaves = np.array([np.asarray(row, dtype=np.float64).reshape(d, d) for row in raw])
        return cls(leaves, eps_pd=eps_pd)


@dataclass(frozen=True)
class Characteristics:
    """Headline weight constants: a2 = [W]_{A2} over the truncated tree,
    r2_lower = sampled lower bound on the reverse-Holder constant (exact for
    d = 1), and b_w = sqrt(r2_lower * a2), the Carleson-embedding factor."""

    a2: float
    r2_lower: float
    b_w: float

    @classmethod
    def compute(cls, weight: WeightGrid, n_samples: int = 32, seed: int = 0):
        a2 = a2_characteristic(weight)
        r2 = r2_estimate(weight, n_samples=n_samples, seed=seed)
        return cls(a2=a2, r2_lower=r2, b_w=float(np.sqrt(r2 * a2)))

    def to_json(self, d: int | None = None) -> dict:
        out = {"a2": self.a2, "r2_lower": self.r2_lower, "b_w": self.b_w}
        if d is not None:
            out["r2_proxy_d_a2"] = d * self.a2
        return out


def inverse_weight(weight: WeightGrid) -> WeightGrid:
    """Leafwise matrix inverse of the weight (cached on the grid)."""
    return weight.inverse()


def a2_characteristic(weight: WeightGrid) -> float:
    """sup over tree intervals of || <W>_I^{1/2} <W^{-1}>_I^{1/2} ||^2."""
    inv = weight.inverse()
    worst = 1.0
    for level in range(weight.depth + 1):
        avg_w = weight.averages_level(level)
        avg_inv = inv.averages_level(level)
        roots = linalg.sqrt_spd_batch(avg_w)
        prod = np.einsum("mij,mjk,mkl->mil", roots, avg_inv, roots)
        prod = 0.5 * (prod + prod.transpose(0, 2, 1))
        top = linalg.top_eig_sym_batch(prod)
        worst = max(worst, float(np.max(top)))
    return worst


def _interval_ratio_max(weight: WeightGrid, leaf_norms: np.ndarray) -> float:
    """max over tree intervals J of <m>_J / (<sqrt(m)>_J)^2 for per-leaf m."""
    worst = 0.0
    sq = np.sqrt(leaf_norms)
    for level in range(weight.depth + 1):
        groups = 1 << level
        num = leaf_norms.reshape(groups, -1).mean(axis=1)
        den = sq.reshape(groups, -1).mean(axis=1) ** 2
        worst = max(worst, float(np.max(num / den)))
    return worst


def r2_estimate(weight: WeightGrid, n_samples: int = 32, seed: int = 0) -> float:
    """Sampled lower bound on the reverse-Holder constant [W]_{R2}.

    Candidates: identity, per-interval <W>_J^{-1}, n_samples rank-one unit
    directions, n_samples random PSD matrices. Deterministic for fixed seed;
    in d = 1 the ratio does not depend on the candidate, so the bound is the
    exact constant.
    """
    if n_samples < 1:
        raise BadParams("n_samples must be >= 1")
    d = weight.d
    rng = np.random.default_rng(seed)
    candidates = [np.eye(d)]
    for _ in range(n_samples):
        e = rng.standard_normal(d)
        e /= np.sqrt(e @ e)
        candidates.append(np.outer(e, e))
    for _ in range(n_samples):
        lam = np.exp(rng.uniform(np.log(0.25), np.log(4.0), size=d))
        gauss = rng.standard_normal((d, d))
        skew = 0.5 * (gauss - gauss.T)
        q = np.linalg.solve(np.eye(d) - skew, np.eye(d) + skew)
        cand = q @ np.diag(lam) @ q.T
        candidates.append(0.5 * (cand + cand.T))

    worst = 1.0
    for a in candidates:
        sandwich = np.einsum("ij,mjk,kl->mil", a, weight.leaves, a)
        sandwich = 0.5 * (sandwich + sandwich.transpose(0, 2, 1))
        norms = linalg.top_eig_sym_batch(sandwich) if d > 1 else sandwich[:, 0, 0]
        worst = max(worst, _interval_ratio_max(weight, np.asarray(norms, dtype=float)))

    # per-interval candidate <W>_J^{-1}: ratio only needs the leaves inside J
    for level in range(weight.depth + 1):
        avgs = weight.averages_level(level)
        inv_avgs = linalg.inv_spd_batch(avgs, min_eig=1e-300)
        block = weight.config.n_leaves >> level
        leaves = weight.leaves.reshape(1 << level, block, d, d)
        sandwich = np.einsum("gij,gbjk,gkl->gbil", inv_avgs, leaves, inv_avgs)
        sandwich = 0.5 * (sandwich + sandwich.transpose(0, 1, 3, 2))
        if d > 1:
            norms = linalg.top_eig_sym_batch(sandwich.reshape(-1, d, d)).reshape(
                1 << level, block
            )
        else:
            norms = sandwich[:, :, 0, 0]
        num = norms.mean(axis=1)
        den = np.sqrt(norms).mean(axis=1) ** 2
        worst = max(worst, float(np.max(num / den)))
    return max(1.0, worst)


_KINDS = ("identity", "scalar_power", "rotating_diagonal", "random_a2", "explicit")


def generate_weight(
    kind: str,
    d: int,
    depth: int,
    params: dict | None = None,
    seed: int = 0,
    eps_pd: float = DEFAULT_EPS_PD,
) -> WeightGrid:
    """Deterministic weight generators; see _KINDS for the available kinds."""
    params = dict(params or {})
    if kind not in _KINDS:
        raise BadParams(f"unknown weight kind {kind!r}; expected one of {_KINDS}")
    if d < 1 or depth < 1:
        raise BadParams(f"need d >= 1 and depth >= 1, got d={d}, depth={depth}")
    n = 1 << depth

    if kind == "identity":
        leaves = np.broadcast_to(np.eye(d), (n, d, d)).copy()

    elif kind == "scalar_power":
        exponent = float(params.get("exponent", 0.5))
        mids = (np.arange(n) + 0.5) / n
        vals = mids**exponent
        leaves = vals[:, None, None] * np.eye(d)

    elif kind == "rotating_diagonal":
        if d < 2:
            raise BadParams("rotating_diagonal needs d >= 2")
        t = float(params.get("t", 4.0))
        if t < 1.0:
            raise BadParams("eccentricity t must be >= 1")
        scale = float(params.get("angle_scale", 1.0))
        thetas = scale * np.pi * (np.arange(n) + 0.5) / n
        diag = np.eye(d).copy()
        diag[0, 0], diag[1, 1] = t, 1.0 / t
        leaves = np.empty((n, d, d))
        for k, theta in enumerate(thetas):
            rot = np.eye(d)
            c, s = np.cos(theta), np.sin(theta)
            rot[0, 0], rot[0, 1], rot[1, 0], rot[1, 1] = c, -s, s, c
            leaves[k] = rot @ diag @ rot.T
        leaves = 0.5 * (leaves + leaves.transpose(0, 2, 1))

    elif kind == "random_a2":
        t = float(params.get("t", 4.0))
        if t < 1.0:
            raise BadParams("eccentricity t must be >= 1")
        scale = float(params.get("angle_scale", 1.0))
        rng = np.random.default_rng(seed)
        lam = t ** rng.uniform(-1.0, 1.0, size=(n, d))
        leaves = np.empty((n, d, d))
        eye = np.eye(d)
        for k in range(n):
            gauss = rng.standard_normal((d, d))
            skew = 0.5 * scale * (gauss - gauss.T)
            q = np.linalg.solve(eye - skew, eye + skew)
            mat = q @ np.diag(lam[k]) @ q.T
            leaves[k] = 0.5 * (mat + mat.T)
        if t == 1.0:
            leaves = np.broadcast_to(eye, (n, d, d)).copy()

    else:  # explicit
        if "leaves" not in params:
            raise BadParams("explicit kind needs params['leaves']")
        leaves = np.asarray(params["leaves"], dtype=np.float64)

    return WeightGrid(leaves, eps_pd=eps_pd)
