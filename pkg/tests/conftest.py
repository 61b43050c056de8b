import numpy as np
import pytest

from dyadt1.linalg import inv_spd_batch
from dyadt1.operators import BandOperator, std_system
from dyadt1.weights import WeightGrid, generate_weight


@pytest.fixture
def scalar_14():
    """d=1, depth 1, leaf values (1, 4): the worked-through small case."""
    return WeightGrid(np.array([1.0, 4.0]))


@pytest.fixture
def random_pair():
    w = generate_weight("random_a2", 2, 3, {"t": 3.0}, seed=2)
    v = generate_weight("random_a2", 2, 3, {"t": 3.0}, seed=3)
    return w, v


def operator_from_std_matrix(d, depth, dense, radius):
    """Build a coefficient table from a dense standard-basis matrix."""
    op = BandOperator(d, depth, radius)
    std = std_system(d, depth)
    root = std.root_offset
    internal = list(std.weight.config.internal())
    for src in internal:
        for i in range(d):
            col = std.offset(src, i)
            for dst in internal:
                for j in range(d):
                    val = dense[std.offset(dst, j), col]
                    if val != 0.0:
                        op.set_entry(src, i, dst, j, val)
            for j in range(d):
                val = dense[root + j, col]
                if val != 0.0:
                    op.root_row[(j, src, i)] = val
    for i in range(d):
        for dst in internal:
            for j in range(d):
                val = dense[std.offset(dst, j), root + i]
                if val != 0.0:
                    op.root_col[(dst, j, i)] = val
    op.root_corner = dense[root:, root:].copy()
    return op


def inclusion_operator(weight):
    """Table of multiplication by W^{-1}: makes T_W the identity map on L2(W)."""
    std = std_system(weight.d, weight.depth)
    n = weight.config.n_leaves
    inv = inv_spd_batch(weight.leaves)
    basis = std.basis_matrix().reshape(n, weight.d, std.dim)
    action = np.einsum("lij,ljc->lic", inv, basis).reshape(n * weight.d, std.dim)
    dense = std.analysis_matrix() @ action
    return operator_from_std_matrix(weight.d, weight.depth, dense, radius=2 * weight.depth)
