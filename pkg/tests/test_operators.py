import numpy as np
import numpy.testing as npt
import pytest

from dyadt1.errors import BadParams, ShapeMismatch
from dyadt1.haar import build_system, weighted_norm
from dyadt1.operators import (
    BandOperator,
    identity_operator,
    is_band,
    is_well_localized,
    make_counterexample,
    make_dyadic_shift,
    make_haar_multiplier,
    make_random_band,
    matrix_form,
    operator_norm,
    weighted_adjoint_apply,
    weighted_apply,
    zero_operator,
)
from dyadt1.oracles import spectral_norm_oracle
from dyadt1.tree import DyadicInterval
from dyadt1.weights import generate_weight


def eye_weight(d=2, depth=3):
    return generate_weight("identity", d, depth)


def test_identity_multiplier_is_identity():
    w = eye_weight()
    op = identity_operator(2, 3)
    rng = np.random.default_rng(0)
    f = rng.standard_normal((8, 2))
    npt.assert_allclose(weighted_apply(op, w, f), f, atol=1e-12)
    assert is_band(op, 0)
    assert operator_norm(op, w, w) == pytest.approx(1.0, abs=1e-12)


def test_zero_operator():
    w = eye_weight()
    op = zero_operator(2, 3)
    f = np.ones((8, 2))
    npt.assert_array_equal(weighted_apply(op, w, f), np.zeros((8, 2)))
    assert operator_norm(op, w, w) == 0.0
    npt.assert_array_equal(matrix_form(op, w, w), np.zeros((16, 16)))


def test_sign_multiplier_is_involution():
    w = eye_weight()
    signs = {}
    rng = np.random.default_rng(4)
    for interval in w.config.internal():
        for i in range(2):
            signs[(interval, i)] = float(rng.choice([-1.0, 1.0]))
    op = make_haar_multiplier(2, 3, signs, root_symbol=-1.0)
    mf = matrix_form(op, w, w)
    npt.assert_allclose(mf @ mf, np.eye(16), atol=1e-12)


def test_multiplier_action_multiplies_w_f():
    # identity table with general weight acts as multiplication by W
    w = generate_weight("random_a2", 2, 3, {"t": 3.0}, seed=1)
    op = identity_operator(2, 3)
    rng = np.random.default_rng(2)
    f = rng.standard_normal((8, 2))
    expected = np.einsum("lij,lj->li", w.leaves, f)
    npt.assert_allclose(weighted_apply(op, w, f), expected, atol=1e-12)


def test_dyadic_shift_band_and_norm():
    w = eye_weight(2, 3)
    op = make_dyadic_shift(2, 3, 1.0, -1.0)
    assert not is_band(op, 0)
    assert is_band(op, 1)
    assert operator_norm(op, w, w) == pytest.approx(np.sqrt(2.0), rel=1e-12)
    zero = make_dyadic_shift(2, 3, 0.0, 0.0)
    assert operator_norm(zero, w, w) == 0.0


@pytest.mark.parametrize("cl,cr", [(1.0, -1.0), (0.3, 0.7), (-2.0, 0.0)])
def test_dyadic_shift_norm_matches_svd_oracle(cl, cr):
    w = eye_weight(1, 3)
    op = make_dyadic_shift(1, 3, cl, cr)
    got = operator_norm(op, w, w)
    oracle = spectral_norm_oracle(matrix_form(op, w, w))
    assert got == pytest.approx(oracle, abs=1e-10)
    assert got == pytest.approx(np.hypot(cl, cr), rel=1e-12)


def test_duality_identity():
    w = generate_weight("random_a2", 2, 3, {"t": 3.0}, seed=5)
    v = generate_weight("random_a2", 2, 3, {"t": 3.0}, seed=6)
    op = make_random_band(2, 3, 1, seed=7)
    rng = np.random.default_rng(8)
    for _ in range(5):
        f = rng.standard_normal((8, 2))
        g = rng.standard_normal((8, 2))
        lhs = np.einsum("li,lij,lj->", weighted_apply(op, w, f), v.leaves, g) * 0.125
        rhs = np.einsum("li,lij,lj->", f, w.leaves, weighted_adjoint_apply(op, v, g)) * 0.125
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_adjoint_of_symmetric_table():
    w = eye_weight(1, 3)
    op = make_dyadic_shift(1, 3, 0.5, 0.5)
    sym = BandOperator(1, 3, 1)
    for key, val in op.entries.items():
        sym.entries[key] = val
    for ((src, i), (dst, j)), val in op.entries.items():
        sym.entries[((dst, j), (src, i))] = val
    rng = np.random.default_rng(3)
    g = rng.standard_normal((8, 1))
    npt.assert_allclose(
        weighted_adjoint_apply(sym, w, g), weighted_apply(sym, w, g), atol=1e-12
    )


def test_identity_map_matrix_form_is_change_of_basis():
    # T = multiplication by W^{-1} gives T_W = identity map from L2(W) to
    # itself; its matrix from H_W to H_W is the identity for ANY weight
    from conftest import inclusion_operator

    w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=21)
    op = inclusion_operator(w)
    npt.assert_allclose(matrix_form(op, w, w), np.eye(16), atol=1e-10)
    assert operator_norm(op, w, w) == pytest.approx(1.0, abs=1e-10)


def test_matrix_form_identity_and_diagonal():
    w = eye_weight(2, 3)
    npt.assert_allclose(matrix_form(identity_operator(2, 3), w, w), np.eye(16), atol=1e-10)
    symbols = {}
    rng = np.random.default_rng(11)
    for interval in w.config.internal():
        for i in range(2):
            symbols[(interval, i)] = float(rng.normal())
    op = make_haar_multiplier(2, 3, symbols, root_symbol=2.0)
    mf = matrix_form(op, w, w)
    assert np.max(np.abs(mf - np.diag(np.diag(mf)))) <= 1e-12


def test_multiplier_norm_is_max_symbol():
    w = eye_weight(1, 3)
    symbols = {}
    for interval in w.config.internal():
        symbols[(interval, 0)] = 3.0 if interval == DyadicInterval(1, 1) else 0.5
    op = make_haar_multiplier(1, 3, symbols, root_symbol=1.0)
    assert operator_norm(op, w, w) == pytest.approx(3.0, rel=1e-12)


def test_matrix_form_consistency_random():
    w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=2)
    v = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=3)
    op = make_random_band(2, 3, 2, seed=4)
    sys_w, sys_v = build_system(w), build_system(v)
    mf = matrix_form(op, w, v)
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = rng.standard_normal((8, 2))
        lhs = mf @ sys_w.analyze(f)
        rhs = sys_v.analyze(weighted_apply(op, w, f))
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * weighted_norm(w, f)


def test_norm_duality_and_scaling():
    w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=6)
    v = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=7)
    op = make_random_band(2, 3, 1, seed=8)
    norm = operator_norm(op, w, v)
    assert norm == pytest.approx(operator_norm(op.transpose(), v, w), rel=1e-9)
    assert operator_norm(op.scaled(2.5), w, v) == pytest.approx(2.5 * norm, rel=1e-10)


@pytest.mark.parametrize("radius", [0, 1, 2])
def test_band_implies_well_localized(radius, random_pair):
    w, v = random_pair
    op = make_random_band(2, 3, radius, seed=10 + radius)
    assert is_band(op, radius)
    report = is_well_localized(op, w, v, radius)
    assert report.passed, report


def test_well_localized_fails_below_band_radius(random_pair):
    w, v = random_pair
    op = make_dyadic_shift(2, 3, 1.0, 1.0)
    assert not is_well_localized(op, w, v, 0).passed
    assert is_well_localized(op, w, v, 1).passed


def test_root_column_coupling_breaks_localization(random_pair):
    # a coupling from the constant block into a deep Haar function sits above
    # every scale and must be flagged
    w, v = random_pair
    op = zero_operator(2, 3)
    op.root_col[(DyadicInterval(2, 3), 0, 0)] = 1.0
    report = is_well_localized(op, w, v, 0)
    assert not report.passed
    # corner couplings are invisible to adapted Haar functions
    op2 = zero_operator(2, 3)
    op2.root_corner = np.eye(2)
    assert is_well_localized(op2, w, v, 0).passed


def test_counterexample_structure():
    op = make_counterexample(1, 3, DyadicInterval(2, 0), lambda k: 1.0)
    assert len(op.entries) == 4
    assert op.radius == 4
    assert not is_band(op, 3)
    assert is_band(op, 4)
    with pytest.raises(BadParams):
        make_counterexample(1, 3, DyadicInterval(2, 0), lambda k: float(k.index))


def test_counterexample_relaxed_vs_full():
    identity = eye_weight(1, 3)
    op = make_counterexample(1, 3, DyadicInterval(2, 0), lambda k: 1.0 + k.index)
    relaxed = is_well_localized(op, identity, identity, 0, relaxed=True)
    full = is_well_localized(op, identity, identity, 0)
    assert relaxed.passed
    assert not full.passed
    # witness sits at a |J| = 2|I| pair
    interval_i, interval_j, _, _ = full.witness
    assert interval_j.level == interval_i.level - 1


def test_zero_operator_well_localized(random_pair):
    w, v = random_pair
    assert is_well_localized(zero_operator(2, 3), w, v, 0).passed


def test_shape_mismatch_raises():
    op = identity_operator(2, 3)
    with pytest.raises(ShapeMismatch):
        weighted_apply(op, generate_weight("identity", 2, 4), np.zeros((16, 2)))
    with pytest.raises(ShapeMismatch):
        weighted_apply(op, eye_weight(), np.zeros((4, 2)))


def test_json_roundtrip():
    op = make_random_band(2, 3, 1, seed=3)
    op.root_row[(0, DyadicInterval(1, 1), 1)] = 0.25
    op.root_col[(DyadicInterval(2, 2), 0, 1)] = -0.5
    back = BandOperator.from_json(op.to_json())
    assert back.entries == op.entries
    assert back.root_row == op.root_row
    assert back.root_col == op.root_col
    npt.assert_array_equal(back.root_corner, op.root_corner)
    npt.assert_array_equal(back.std_matrix(), op.std_matrix())


def test_norm_is_weighted_variational_supremum():
    # the spectral norm of matrix_form must dominate every Rayleigh ratio
    # ||T_W f||_{L2(V)} / ||f||_{L2(W)}, and function-space power iteration
    # (an independent route that never touches the adapted bases) attains it
    w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=30)
    v = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=31)
    op = make_random_band(2, 3, 1, seed=32)
    norm = operator_norm(op, w, v)
    rng = np.random.default_rng(33)
    best = 0.0
    for _ in range(50):
        f = rng.standard_normal((8, 2))
        ratio = weighted_norm(v, weighted_apply(op, w, f)) / weighted_norm(w, f)
        assert ratio <= norm * (1 + 1e-9)
        best = max(best, ratio)
    # power iteration with the weighted adjoint: f -> T_V*(T_W f), normalized
    # in L2(W); converges to the top singular pair of T_W
    f = rng.standard_normal((8, 2))
    for _ in range(300):
        f = weighted_adjoint_apply(op, v, weighted_apply(op, w, f))
        f /= weighted_norm(w, f)
    attained = weighted_norm(v, weighted_apply(op, w, f))
    assert attained == pytest.approx(norm, rel=1e-8)


def test_norm_matches_jacobi_svd_oracle_random():
    w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=12)
    v = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=13)
    for seed in range(4):
        op = make_random_band(2, 3, 1, seed=seed)
        mf = matrix_form(op, w, v)
        assert operator_norm(op, w, v) == pytest.approx(
            spectral_norm_oracle(mf), abs=1e-8 * max(1.0, spectral_norm_oracle(mf))
        )
