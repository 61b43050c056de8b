"""Matrix Carleson embedding: testing constants, the exact truncated sharp
constant, stopping trees with decay measurement, and the sequence extracted
from an operator's paraproduct.

The sharp embedding constant is the largest generalized eigenvalue of the
quadratic form sum_I <A_I <f>_I, <f>_I> against ||f||^2 in the inverse-weight
space, computed by whitening with the block-diagonal leaf factor and a
deterministic extreme-eigenvalue iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BadParams, ShapeMismatch
from .haar import build_system
from .operators import BandOperator, _check_shapes, leaf_action_matrix
from .tree import DyadicInterval, TreeConfig, ancestor
from .weights import WeightGrid

PSD_TOL = 1e-12


class CarlesonInstance:
    """Sparse map interval -> PSD d x d matrix; omitted intervals are zero."""

    def __init__(self, d: int, depth: int, a_seq: dict[DyadicInterval, np.ndarray]):
        if d < 1 or depth < 1:
            raise BadParams(f"need d >= 1 and depth >= 1, got d={d}, depth={depth}")
        self.d = d
        self.depth = depth
        self.config = TreeConfig(depth)
        seq = {}
        for interval, mat in a_seq.items():
            self.config.require_member(interval)
            mat = np.asarray(mat, dtype=np.float64)
            if mat.shape != (d, d):
                raise ShapeMismatch(f"entry at {interval} has shape {mat.shape}, want ({d},{d})")
            mat = 0.5 * (mat + mat.T)
            w, _ = linalg.eigh(mat)
            if w[-1] < -PSD_TOL:
                raise BadParams(f"entry at {interval} has eigenvalue {w[-1]:.3e} < -{PSD_TOL:.0e}")
            seq[interval] = mat
        self.a_seq = seq

    def scaled(self, t: float) -> "CarlesonInstance":
        if t < 0:
            raise BadParams("scale must be nonnegative")
        return CarlesonInstance(self.d, self.depth, {k: t * v for k, v in self.a_seq.items()})

    def require_match(self, weight: WeightGrid) -> None:
        if self.d != weight.d or self.depth != weight.depth:
            raise ShapeMismatch(
                f"instance (d={self.d}, N={self.depth}) does not match weight "
                f"(d={weight.d}, N={weight.depth})"
            )

    def to_json(self) -> dict:
        entries = [
            [interval.level, interval.index, mat.reshape(-1).tolist()]
            for interval, mat in sorted(self.a_seq.items())
        ]
        return {"d": self.d, "depth": self.depth, "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "CarlesonInstance":
        try:
            d = int(obj["d"])
            depth = int(obj["depth"])
            seq = {
                DyadicInterval(int(lev), int(idx)): np.asarray(flat, dtype=float).reshape(d, d)
                for lev, idx, flat in obj.get("entries", [])
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParams(f"malformed Carleson JSON: {exc}") from exc
        return cls(d, depth, seq)


def random_instance(d: int, depth: int, seed: int = 0, density: float = 0.7) -> CarlesonInstance:
    """Seeded random PSD sequence, scaled by |I| so subtree sums stay O(1)."""
    rng = np.random.default_rng(seed)
    config = TreeConfig(depth)
    seq = {}
    for interval in config.intervals():
        if rng.uniform() > density:
            continue
        g = rng.standard_normal((d, d))
        seq[interval] = (g @ g.T) * interval.measure * rng.uniform(0.1, 1.0)
    return CarlesonInstance(d, depth, seq)


def _subtree_sums(instance: CarlesonInstance, per_interval) -> list[np.ndarray]:
    """Bottom-up subtree sums of per-interval quantities (matrices or scalars)."""
    depth = instance.depth
    probe = np.asarray(per_interval(DyadicInterval(0, 0)))
    shape = probe.shape
    levels = [np.zeros((1 << lev,) + shape) for lev in range(depth + 1)]
    for lev in range(depth + 1):
        for k in range(1 << lev):
            levels[lev][k] = per_interval(DyadicInterval(lev, k))
    for lev in range(depth - 1, -1, -1):
        levels[lev] += levels[lev + 1][0::2] + levels[lev + 1][1::2]
    return levels


def cet2_testing_constant(instance: CarlesonInstance, weight: WeightGrid) -> float:
    """Smallest C2 with (1/|J|) sum_{I <= J} <W>_I A_I <W>_I <= C2 <W>_J."""
    instance.require_match(weight)
    d = instance.d

    def term(interval: DyadicInterval) -> np.ndarray:
        mat = instance.a_seq.get(interval)
        if mat is None:
            return np.zeros((d, d))
        avg = weight.average(interval)
        return avg @ mat @ avg

    sums = _subtree_sums(instance, term)
    worst = 0.0
    for lev in range(instance.depth + 1):
        inv_root = linalg.invsqrt_spd_batch(weight.averages_level(lev), min_eig=1e-300)
        normalized = np.einsum("kij,kjl,klm->kim", inv_root, sums[lev] * (2.0**lev), inv_root)
        normalized = 0.5 * (normalized + normalized.transpose(0, 2, 1))
        worst = max(worst, float(np.max(linalg.top_eig_sym_batch(normalized))))
    return worst


def cet1_testing_constant(instance: CarlesonInstance, weight: WeightGrid) -> float:
    """Smallest C2 with (1/|J|) sum_{I <= J} ||<W>_I^{1/2} A_I <W>_I^{1/2}|| <= C2."""
    instance.require_match(weight)

    def term(interval: DyadicInterval) -> float:
        mat = instance.a_seq.get(interval)
        if mat is None:
            return 0.0
        root = linalg.sqrt_spd(weight.average(interval))
        return float(linalg.sym_spectral_norm_batch(root @ mat @ root))

    sums = _subtree_sums(instance, term)
    worst = 0.0
    for lev in range(instance.depth + 1):
        worst = max(worst, float(np.max(sums[lev] * (2.0**lev))))
    return worst


def embedding_quadratic_form(instance: CarlesonInstance) -> np.ndarray:
    """Dense matrix of f -> sum_I <A_I <f>_I, <f>_I> on flattened leaf values."""
    d, depth = instance.d, instance.depth
    n = 1 << depth
    q = np.zeros((n, d, n, d))
    for interval, mat in instance.a_seq.items():
        lo, hi = instance.config.leaf_range(interval)
        frac = (2.0**-depth) / interval.measure
        q[lo:hi, :, lo:hi, :] += (frac * frac) * mat[None, :, None, :]
    return q.reshape(n * d, n * d)


def embedding_sharp_constant(instance: CarlesonInstance, weight: WeightGrid) -> float:
    """Exact truncated sharp constant in  sum <A_I <f>_I, <f>_I> <= C ||f||^2_{L2(W^-1)}.

    Whitens the quadratic form by the block-diagonal inverse-weight norm and
    returns the top eigenvalue of the resulting PSD matrix.
    """
    instance.require_match(weight)
    d, depth = instance.d, instance.depth
    n = 1 << depth
    q = embedding_quadratic_form(instance)
    # G = blockdiag(|L| W_L^{-1})  =>  G^{-1/2} = blockdiag(|L|^{-1/2} W_L^{1/2})
    white_blocks = linalg.sqrt_spd_batch(weight.leaves) * (2.0 ** (depth / 2.0))
    q4 = q.reshape(n, d, n, d)
    q4 = np.einsum("lij,ljme,mek->limk", white_blocks, q4, white_blocks)
    s = q4.reshape(n * d, n * d)
    return linalg.top_eigval_psd(0.5 * (s + s.T))


def carleson_from_operator(
    op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid, radius: int
) -> CarlesonInstance:
    """The sequence A_K = sum over (L, l) with L <= K, |L| = 2^-r |K| of
    <W>_K^{-1} alpha alpha^T <W>_K^{-1},  alpha = integral over K of W T_V* h_L^{V,l}."""
    if radius < 0:
        raise BadParams("radius must be >= 0")
    if weight_w.depth <= radius:
        raise BadParams(f"need depth > radius, got depth={weight_w.depth}, r={radius}")
    _check_shapes(op, weight_w)
    _check_shapes(op, weight_v)
    d, depth = weight_w.d, weight_w.depth
    n = 1 << depth
    sys_v = build_system(weight_v)
    adj_action = leaf_action_matrix(op.transpose())
    config = weight_w.config

    accum: dict[DyadicInterval, np.ndarray] = {}
    bv3 = sys_v.basis_matrix().reshape(n, d, sys_v.dim)
    for lev in range(radius, depth):
        for k in range(1 << lev):
            interval_l = DyadicInterval(lev, k)
            interval_k = ancestor(interval_l, radius)
            lo, hi = config.leaf_range(interval_k)
            col = sys_v.offset(interval_l, 0)
            h_vals = bv3[:, :, col : col + d]  # columns: h_L^{V,l} leaf values
            vg = np.einsum("lij,ljc->lic", weight_v.leaves, h_vals)
            u = (adj_action @ vg.reshape(n * d, d)).reshape(n, d, d)
            alphas = (
                np.einsum("lij,ljc->ic", weight_w.leaves[lo:hi], u[lo:hi]) * 2.0**-depth
            )
            contrib = alphas @ alphas.T
            if interval_k in accum:
                accum[interval_k] += contrib
            else:
                accum[interval_k] = contrib

    seq = {}
    for interval_k, mat in accum.items():
        inv_avg = linalg.inv_spd(weight_w.average(interval_k), min_eig=1e-300)
        seq[interval_k] = inv_avg @ mat @ inv_avg
    return CarlesonInstance(d, depth, seq)


@dataclass
class StoppingTree:
    """Generations of maximal lambda-jump intervals under one root interval."""

    root: DyadicInterval
    lam: float
    generations: list[list[DyadicInterval]] = field(default_factory=list)

    def generation_measures(self) -> list[float]:
        return [sum(j.measure for j in gen) for gen in self.generations]


def _stopping_children(
    weight: WeightGrid, interval: DyadicInterval, lam: float
) -> list[DyadicInterval]:
    """Maximal dyadic J strictly inside `interval` where either whitened
    average ratio exceeds lam."""
    avg_root = weight.average(interval)
    root_sqrt = linalg.sqrt_spd(avg_root)
    root_invsqrt = linalg.invsqrt_spd(avg_root, min_eig=1e-300)
    config = weight.config
    found = []
    stack = []
    if interval.level < weight.depth:
        stack.extend(config.children(interval))
    while stack:
        j = stack.pop(0)
        avg_j = weight.average(j)
        up = linalg.invsqrt_spd(avg_j, min_eig=1e-300) @ root_sqrt
        down = linalg.sqrt_spd(avg_j) @ root_invsqrt
        big = float(linalg.spectral_norm_small_batch(up)) ** 2
        small = float(linalg.spectral_norm_small_batch(down)) ** 2
        if big > lam or small > lam:
            found.append(j)
        elif j.level < weight.depth:
            stack.extend(config.children(j))
    return sorted(found)


def build_stopping_tree(
    weight: WeightGrid, root: DyadicInterval, lam: float
) -> StoppingTree:
    if lam <= 1.0:
        raise BadParams(f"lambda must exceed 1, got {lam}")
    weight.config.require_member(root)
    tree = StoppingTree(root=root, lam=lam, generations=[[root]])
    current = [root]
    while current:
        nxt = []
        for interval in current:
            nxt.extend(_stopping_children(weight, interval, lam))
        if not nxt:
            break
        tree.generations.append(sorted(nxt))
        current = nxt
    return tree


def stopping_decay(tree: StoppingTree) -> list[float]:
    """Relative measure of each generation j >= 1 against the root interval."""
    measures = tree.generation_measures()
    root = tree.root.measure
    return [m / root for m in measures[1:]]


def find_lambda_star(
    weight: WeightGrid,
    root: DyadicInterval | None = None,
    a2: float | None = None,
    multipliers=(4, 8, 16, 32, 64),
) -> tuple[float, int]:
    """Smallest lambda = mult * d * a2 whose generations decay below 2^-j.

    Returns (lambda_star, multiplier); raises BadParams if none in the
    escalation range works.
    """
    from .weights import a2_characteristic

    if root is None:
        root = DyadicInterval(0, 0)
    if a2 is None:
        a2 = a2_characteristic(weight)
    for mult in multipliers:
        lam = mult * weight.d * a2
        if lam <= 1.0:
            continue
        tree = build_stopping_tree(weight, root, lam)
        decay = stopping_decay(tree)
        if all(val <= 2.0**-j for j, val in enumerate(decay, start=1)):
            return lam, mult
    raise BadParams(f"no lambda in {multipliers} x d x a2 achieves 2^-j decay")
