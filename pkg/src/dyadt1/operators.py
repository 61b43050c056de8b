"""Band operators on the truncated tree as sparse Haar-coefficient tables.

An operator is stored as the table <T h_I e_i, h_J e_j> over internal
intervals plus an explicit root block coupling the constant functions
1_root e_i. The weighted action T_W f = T(W f) expands W f in the unweighted
basis {h_I e_i} union {1_root e_i}, applies the table, and returns leaf
values. Couplings to scales above the root are zero by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .errors import BadParams, ShapeMismatch
from .haar import HaarSystem, build_system
from .tree import DyadicInterval, TreeConfig, ancestor, contains, tree_distance
from .weights import WeightGrid, generate_weight

STRUCTURAL_ZERO = 1e-14
WELLLOC_REL_TOL = 1e-12


@lru_cache(maxsize=32)
def std_system(d: int, depth: int) -> HaarSystem:
    """The unweighted basis = Haar system of the identity weight (exact)."""
    return build_system(generate_weight("identity", d, depth))


class BandOperator:
    """Sparse coefficient table plus root block; radius is declared, not checked."""

    def __init__(self, d: int, depth: int, radius: int):
        if d < 1 or depth < 1 or radius < 0:
            raise BadParams(f"bad operator shape d={d}, depth={depth}, radius={radius}")
        self.d = d
        self.depth = depth
        self.radius = radius
        self.config = TreeConfig(depth)
        # ((I, i), (J, j)) -> <T h_I e_i, h_J e_j>
        self.entries: dict[tuple, float] = {}
        # (J, j, i) -> <T 1_root e_i, h_J e_j>
        self.root_col: dict[tuple, float] = {}
        # (i, I, ii) -> <T h_I e_ii, 1_root e_i>
        self.root_row: dict[tuple, float] = {}
        # [i, k] = <T 1_root e_k, 1_root e_i>
        self.root_corner = np.zeros((d, d))
        self._std_matrix: np.ndarray | None = None

    # -- construction --------------------------------------------------------

    def set_entry(self, src: DyadicInterval, i: int, dst: DyadicInterval, j: int, value: float):
        for interval in (src, dst):
            self.config.require_member(interval)
            if interval.level >= self.depth:
                raise BadParams(f"{interval} is a leaf; it carries no Haar function")
        if not (0 <= i < self.d and 0 <= j < self.d):
            raise BadParams(f"vector indices ({i}, {j}) out of range for d={self.d}")
        if not np.isfinite(value):
            raise BadParams("coefficients must be finite")
        if tree_distance(src, dst) > self.radius:
            if abs(value) > STRUCTURAL_ZERO:
                raise BadParams(
                    f"entry ({src}, {dst}) at tree distance {tree_distance(src, dst)} "
                    f"exceeds declared radius {self.radius}"
                )
            return  # structural zero: not stored
        self.entries[((src, i), (dst, j))] = float(value)
        self._std_matrix = None

    def scaled(self, c: float) -> "BandOperator":
        out = BandOperator(self.d, self.depth, self.radius)
        out.entries = {k: c * v for k, v in self.entries.items()}
        out.root_col = {k: c * v for k, v in self.root_col.items()}
        out.root_row = {k: c * v for k, v in self.root_row.items()}
        out.root_corner = c * self.root_corner
        return out

    def transpose(self) -> "BandOperator":
        out = BandOperator(self.d, self.depth, self.radius)
        out.entries = {((dst, j), (src, i)): v for ((src, i), (dst, j)), v in self.entries.items()}
        out.root_col = {(ivl, jj, i): v for (i, ivl, jj), v in self.root_row.items()}
        out.root_row = {(i, ivl, jj): v for (ivl, jj, i), v in self.root_col.items()}
        out.root_corner = self.root_corner.T.copy()
        return out

    def coefficient_scale(self) -> float:
        vals = [abs(v) for v in self.entries.values()]
        vals += [abs(v) for v in self.root_col.values()]
        vals += [abs(v) for v in self.root_row.values()]
        vals.append(float(np.max(np.abs(self.root_corner))) if self.d else 0.0)
        return max(vals) if vals else 0.0

    # -- dense standard-basis action ------------------------------------------

    def std_matrix(self) -> np.ndarray:
        """Dense matrix in canonical standard-basis coordinates (row = output)."""
        if self._std_matrix is None:
            std = std_system(self.d, self.depth)
            dim = std.dim
            root = std.root_offset
            s = np.zeros((dim, dim))
            for ((src, i), (dst, j)), v in self.entries.items():
                s[std.offset(dst, j), std.offset(src, i)] = v
            for (dst, j, i), v in self.root_col.items():
                s[std.offset(dst, j), root + i] = v
            for (i, src, ii), v in self.root_row.items():
                s[root + i, std.offset(src, ii)] = v
            s[root:, root:] = self.root_corner
            self._std_matrix = s
        return self._std_matrix

    # -- JSON -------------------------------------------------------------------

    def to_json(self) -> dict:
        entries = [
            [src.as_json(), i, dst.as_json(), j, v]
            for ((src, i), (dst, j)), v in sorted(self.entries.items())
        ]
        return {
            "d": self.d,
            "depth": self.depth,
            "radius": self.radius,
            "entries": entries,
            "root": {
                "corner": self.root_corner.tolist(),
                "col": [[ivl.as_json(), j, i, v] for (ivl, j, i), v in sorted(self.root_col.items())],
                "row": [[i, ivl.as_json(), ii, v] for (i, ivl, ii), v in sorted(self.root_row.items())],
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BandOperator":
        try:
            op = cls(int(obj["d"]), int(obj["depth"]), int(obj["radius"]))
            for src, i, dst, j, v in obj.get("entries", []):
                op.set_entry(
                    DyadicInterval(*map(int, src)), int(i),
                    DyadicInterval(*map(int, dst)), int(j), float(v),
                )
            root = obj.get("root", {})
            corner = np.asarray(root.get("corner", np.zeros((op.d, op.d))), dtype=float)
            if corner.shape != (op.d, op.d):
                raise BadParams(f"root corner shape {corner.shape} != ({op.d}, {op.d})")
            op.root_corner = corner
            for ivl, j, i, v in root.get("col", []):
                op.root_col[(DyadicInterval(*map(int, ivl)), int(j), int(i))] = float(v)
            for i, ivl, ii, v in root.get("row", []):
                op.root_row[(int(i), DyadicInterval(*map(int, ivl)), int(ii))] = float(v)
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParams(f"malformed operator JSON: {exc}") from exc
        return op


# -- generators ------------------------------------------------------------------


def make_haar_multiplier(
    d: int, depth: int, symbols, root_symbol: float = 1.0
) -> BandOperator:
    """Diagonal table T h_I e_i = sigma(I, i) h_I e_i; radius 0.

    `symbols` is a scalar, a mapping (I, i) -> scalar, or a callable (I, i)
    -> scalar. The identity operator is symbols=1 with root_symbol=1.
    """
    op = BandOperator(d, depth, radius=0)
    if callable(symbols):
        get = symbols
    elif np.isscalar(symbols):
        get = lambda interval, i: symbols
    else:
        get = lambda interval, i: symbols.get((interval, i), 0.0)
    for interval in op.config.internal():
        for i in range(d):
            value = float(get(interval, i))
            if value != 0.0:
                op.set_entry(interval, i, interval, i, value)
    op.root_corner = root_symbol * np.eye(d)
    return op


def identity_operator(d: int, depth: int) -> BandOperator:
    return make_haar_multiplier(d, depth, 1.0, root_symbol=1.0)


def zero_operator(d: int, depth: int) -> BandOperator:
    return BandOperator(d, depth, radius=0)


def make_dyadic_shift(d: int, depth: int, coeff_left: float, coeff_right: float) -> BandOperator:
    """T h_I e_i = cl h_{I-} e_i + cr h_{I+} e_i for non-leaf-level I; radius 1."""
    op = BandOperator(d, depth, radius=1)
    for interval in op.config.internal():
        if interval.level + 1 >= depth:
            continue  # children are leaves: no Haar functions there
        for i in range(d):
            if coeff_left != 0.0:
                op.set_entry(interval, i, interval.left(), i, coeff_left)
            if coeff_right != 0.0:
                op.set_entry(interval, i, interval.right(), i, coeff_right)
    return op


def make_counterexample(d: int, depth: int, base: DyadicInterval, coeffs) -> BandOperator:
    """T h_base e_i = sum over same-level K of c_K h_K e_i, zero elsewhere.

    Spreads one row across its whole level, so it fails every band radius
    below the level's diameter while passing size-restricted triangularity
    checks; the recorded radius is the largest occurring tree distance.
    """
    config = TreeConfig(depth)
    config.require_member(base)
    if base.level >= depth:
        raise BadParams("base interval must carry a Haar function")
    level_intervals = [DyadicInterval(base.level, k) for k in range(1 << base.level)]
    if callable(coeffs):
        cmap = {k: float(coeffs(k)) for k in level_intervals}
    else:
        cmap = {k: float(coeffs[k]) for k in level_intervals}
    if any(v == 0.0 for v in cmap.values()):
        raise BadParams("counterexample coefficients must all be nonzero")
    radius = max(tree_distance(base, k) for k in level_intervals)
    op = BandOperator(d, depth, radius=radius)
    for k in level_intervals:
        for i in range(d):
            op.set_entry(base, i, k, i, cmap[k])
    return op


def make_random_band(
    d: int, depth: int, radius: int, seed: int = 0, fill: float = 0.6,
    with_corner: bool = True,
) -> BandOperator:
    """Seeded random coefficients on every Haar pair within the tree-distance band."""
    if not 0.0 < fill <= 1.0:
        raise BadParams("fill must be in (0, 1]")
    op = BandOperator(d, depth, radius=radius)
    rng = np.random.default_rng(seed)
    internal = list(op.config.internal())
    for src in internal:
        for dst in internal:
            if tree_distance(src, dst) > radius:
                continue
            for i in range(d):
                for j in range(d):
                    if rng.uniform() <= fill:
                        op.set_entry(src, i, dst, j, rng.normal())
    if with_corner:
        op.root_corner = rng.normal(size=(d, d))
    return op


# -- predicates and actions ---------------------------------------------------


def is_band(op: BandOperator, radius: int) -> bool:
    """True iff every stored coefficient beyond the radius is structurally zero."""
    for ((src, _), (dst, _)), v in op.entries.items():
        if tree_distance(src, dst) > radius and abs(v) > STRUCTURAL_ZERO:
            return False
    return True


def _check_shapes(op: BandOperator, weight: WeightGrid):
    if op.d != weight.d or op.depth != weight.depth:
        raise ShapeMismatch(
            f"operator (d={op.d}, N={op.depth}) does not match weight "
            f"(d={weight.d}, N={weight.depth})"
        )


def weighted_apply(op: BandOperator, weight: WeightGrid, values: np.ndarray) -> np.ndarray:
    """T_W f = T(W f): leaf values in, leaf values out."""
    _check_shapes(op, weight)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (weight.config.n_leaves, weight.d):
        raise ShapeMismatch(f"leaf values shape {values.shape} does not match weight")
    std = std_system(op.d, op.depth)
    wf = np.einsum("lij,lj->li", weight.leaves, values)
    return std.synthesize(op.std_matrix() @ std.analyze(wf))


def weighted_adjoint_apply(op: BandOperator, weight: WeightGrid, values: np.ndarray) -> np.ndarray:
    """T_V* g = T*(V g); transpose table applied to the weighted input."""
    return weighted_apply(op.transpose(), weight, values)


def leaf_action_matrix(op: BandOperator) -> np.ndarray:
    """Dense matrix of T on flattened leaf vectors (synthesis o table o analysis)."""
    std = std_system(op.d, op.depth)
    return std.basis_matrix() @ op.std_matrix() @ std.analysis_matrix()


def matrix_form(op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid) -> np.ndarray:
    """Matrix of T_W from the W-adapted basis to the V-adapted basis.

    Entry ((K,k),(J,j)) = <T_W h_J^{W,j}, h_K^{V,k}>_{L2(V)}; both bases are
    orthonormal in their weighted spaces, so its largest singular value is
    the weighted operator norm.
    """
    _check_shapes(op, weight_w)
    _check_shapes(op, weight_v)
    sys_w = build_system(weight_w)
    sys_v = build_system(weight_v)
    return matrix_form_from_systems(op, sys_w, sys_v)


def matrix_form_from_systems(op: BandOperator, sys_w: HaarSystem, sys_v: HaarSystem) -> np.ndarray:
    n = 1 << op.depth
    bw3 = sys_w.basis_matrix().reshape(n, op.d, sys_w.dim)
    wbw = np.einsum("lij,ljc->lic", sys_w.weight.leaves, bw3).reshape(n * op.d, sys_w.dim)
    return sys_v.analysis_matrix() @ (leaf_action_matrix(op) @ wbw)


def operator_norm(op: BandOperator, weight_w: WeightGrid, weight_v: WeightGrid) -> float:
    """|| T_W ||_{L2(W) -> L2(V)}, exact at truncation via power iteration."""
    return linalg.spectral_norm_dense(matrix_form(op, weight_w, weight_v))


@dataclass(frozen=True)
class WellLocReport:
    passed: bool
    worst_violation: float
    witness: tuple | None  # (I, J, j, side) of the largest forbidden pairing
    scale: float

    def to_json(self) -> dict:
        witness = None
        if self.witness is not None:
            interval_i, interval_j, j, side = self.witness
            witness = {
                "I": interval_i.as_json(),
                "J": interval_j.as_json(),
                "j": j,
                "side": side,
            }
        return {
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "witness": witness,
            "scale": self.scale,
        }


def _forbidden(interval_i: DyadicInterval, interval_j: DyadicInterval, radius: int,
               relaxed: bool) -> bool:
    """Is (I, J) a pair whose pairing must vanish for an r-lower-triangular map?"""
    size_cap = 0 if relaxed else -1  # relaxed: |J| <= |I|; full: |J| <= 2|I|
    if interval_j.level < interval_i.level + size_cap:
        return False
    if interval_i.level > radius:  # ancestor exists strictly inside the tree
        up = ancestor(interval_i, radius + 1)
        if not contains(up, interval_j):
            return True
    if interval_j.level >= interval_i.level + radius and not contains(interval_i, interval_j):
        return True
    return False


def is_well_localized(
    op: BandOperator,
    weight_w: WeightGrid,
    weight_v: WeightGrid,
    radius: int,
    relaxed: bool = False,
) -> WellLocReport:
    """Exhaustive check of the lower-triangularity of T_W and T_V*.

    Forbidden pairings <T_W 1_I e, h_J^{V,j}> (and the adjoint analogue with
    W, V swapped) are scanned over every admissible (I, J, e-basis, j); pass
    means the largest magnitude stays below 1e-12 times the coefficient
    scale of the table. `relaxed` restricts admissibility to |J| <= |I|
    (the size range whose insufficiency the counterexample operator shows).
    """
    _check_shapes(op, weight_w)
    _check_shapes(op, weight_v)
    weight_w.require_same_shape(weight_v)
    sys_w = build_system(weight_w)
    sys_v = build_system(weight_v)
    d, depth = op.d, op.depth
    config = op.config
    n = config.n_leaves

    worst = 0.0
    witness = None
    for side, table, win, sys_out in (
        ("forward", op, weight_w, sys_v),
        ("adjoint", op.transpose(), weight_v, sys_w),
    ):
        pipeline = sys_out.analysis_matrix() @ leaf_action_matrix(table)
        pipeline3 = pipeline.reshape(sys_out.dim, n, d)
        for interval_i in config.intervals():
            lo, hi = config.leaf_range(interval_i)
            # coefficients of T_(win) 1_I e_a in the output-adapted basis
            coeffs = np.einsum("cle,lea->ca", pipeline3[:, lo:hi], win.leaves[lo:hi])
            for interval_j in config.internal():
                if not _forbidden(interval_i, interval_j, radius, relaxed):
                    continue
                block = coeffs[
                    sys_out.offset(interval_j, 0) : sys_out.offset(interval_j, 0) + d
                ]
                value = float(np.max(np.abs(block)))
                if value > worst:
                    worst = value
                    j = int(np.unravel_index(np.argmax(np.abs(block)), block.shape)[0])
                    witness = (interval_i, interval_j, j, side)
    scale = op.coefficient_scale()
    return WellLocReport(
        passed=worst <= WELLLOC_REL_TOL * scale,
        worst_violation=worst,
        witness=witness,
        scale=scale,
    )
