import numpy as np
import numpy.testing as npt
import pytest

import dyadt1.certifier as ct
from dyadt1.certifier import build_paraproduct, certify
from dyadt1.errors import BadParams
from dyadt1.haar import build_system
from dyadt1.linalg import spectral_norm_dense
from dyadt1.operators import (
    identity_operator,
    make_dyadic_shift,
    make_haar_multiplier,
    make_random_band,
    matrix_form,
    operator_norm,
    zero_operator,
)
from dyadt1.oracles import a3_direction_search
from dyadt1.tree import TreeConfig
from dyadt1.weights import generate_weight


def test_a1_identity():
    w = generate_weight("identity", 2, 3)
    assert ct.testing_a1(identity_operator(2, 3), w, w) == pytest.approx(1.0, abs=1e-12)
    assert ct.testing_a2_dual(identity_operator(2, 3), w, w) == pytest.approx(1.0, abs=1e-12)


def test_a1_zero():
    w = generate_weight("identity", 2, 3)
    assert ct.testing_a1(zero_operator(2, 3), w, w) == 0.0


def test_a1_projection_multiplier_sqrt3_over_2():
    # all symbols one, root symbol zero: T 1_I = 1_I - |I| 1_root, so the
    # ratio is sqrt(1 - |I|), maximized at the smallest interval
    w = generate_weight("identity", 1, 2)
    op = make_haar_multiplier(1, 2, 1.0, root_symbol=0.0)
    assert ct.testing_a1(op, w, w) == pytest.approx(np.sqrt(3.0) / 2.0, rel=1e-12)


def test_a2_dual_of_symmetric_table():
    w = generate_weight("random_a2", 1, 3, {"t": 3.0}, seed=1)
    op = make_haar_multiplier(1, 3, lambda interval, i: 1.0 + 0.3 * interval.level, 0.7)
    assert ct.testing_a1(op, w, w) == pytest.approx(ct.testing_a2_dual(op, w, w), abs=1e-10)


def test_local_constants_bounded_by_global(random_pair):
    w, v = random_pair
    op = make_random_band(2, 3, 1, seed=5)
    a1l, a2l = ct.testing_local(op, w, v)
    assert a1l <= ct.testing_a1(op, w, v) + 1e-10
    assert a2l <= ct.testing_a2_dual(op, w, v) + 1e-10


def test_identity_map_constants_are_one_for_any_weight(random_pair):
    # the table of multiplication by W^{-1} makes T_W the identity map on
    # L2(W); every cutoff is then inert on 1_I e and all constants are 1
    from conftest import inclusion_operator

    w, _ = random_pair
    op = inclusion_operator(w)
    a1l, a2l = ct.testing_local(op, w, w)
    assert a1l == pytest.approx(1.0, abs=1e-9)
    assert a2l == pytest.approx(1.0, abs=1e-9)
    assert ct.testing_a1(op, w, w) == pytest.approx(1.0, abs=1e-9)
    assert ct.testing_a3(op, w, w, 0) == pytest.approx(1.0, abs=1e-9)


def test_a3_identity_and_zero():
    w = generate_weight("identity", 2, 3)
    assert ct.testing_a3(identity_operator(2, 3), w, w, 0) == pytest.approx(1.0, abs=1e-12)
    assert ct.testing_a3(zero_operator(2, 3), w, w, 1) == 0.0


@pytest.mark.parametrize("d", [1, 2])
def test_a3_matches_direction_search(d):
    w = generate_weight("random_a2", d, 3, {"t": 3.0}, seed=7)
    v = generate_weight("random_a2", d, 3, {"t": 3.0}, seed=8)
    op = make_random_band(d, 3, 1, seed=9)
    exact = ct.testing_a3(op, w, v, 1)
    sampled = a3_direction_search(op, w, v, 1)
    assert sampled <= exact + 1e-9  # converges from below
    assert sampled >= exact - 1e-6 * max(1.0, exact)


def test_paraproduct_lemma_blocks(random_pair):
    w, v = random_pair
    sys_w, sys_v = build_system(w), build_system(v)
    d = 2
    for radius, op in [
        (0, make_haar_multiplier(2, 3, lambda i, j: 0.5 + j, 1.0)),
        (1, make_random_band(2, 3, 1, seed=3)),
    ]:
        pi = build_paraproduct(op, w, v, radius)
        mf = matrix_form(op, w, v)
        config = TreeConfig(3)
        for src in config.internal():
            col = sys_w.offset(src, 0)
            for dst in config.internal():
                row = sys_v.offset(dst, 0)
                block = pi[row : row + d, col : col + d]
                if dst.level <= src.level + radius:
                    assert np.max(np.abs(block)) <= 1e-10
                else:
                    tblock = mf[row : row + d, col : col + d]
                    assert np.max(np.abs(block - tblock)) <= 1e-9
        # rows for the root block vanish: the paraproduct lands on Haar functions
        assert np.max(np.abs(pi[sys_v.root_offset :, :])) == 0.0


def test_paraproduct_zero_operator(random_pair):
    w, v = random_pair
    npt.assert_array_equal(build_paraproduct(zero_operator(2, 3), w, v, 1), np.zeros((16, 16)))


def test_paraproduct_depth_guard(random_pair):
    w, v = random_pair
    with pytest.raises(BadParams):
        build_paraproduct(make_random_band(2, 3, 0, seed=1), w, v, 3)


def test_certify_identity_report():
    w = generate_weight("identity", 1, 2)
    report = certify(identity_operator(1, 2), w, w, 0, c_cfg=1.0)
    assert report.constants.a1 == pytest.approx(1.0, abs=1e-12)
    assert report.constants.a2 == pytest.approx(1.0, abs=1e-12)
    assert report.measured_norm == pytest.approx(1.0, abs=1e-12)
    assert report.char_w.b_w == pytest.approx(1.0, abs=1e-12)
    assert report.bound_thm1 == pytest.approx(2.0, rel=1e-10)
    assert report.necessity_ok
    assert report.warnings == ()


def test_certify_zero_operator():
    w = generate_weight("identity", 2, 3)
    report = certify(zero_operator(2, 3), w, w, 0, c_cfg=1.0)
    assert report.constants.a1 == 0.0
    assert report.measured_norm == 0.0
    assert report.necessity_ok


def test_certify_records_band_warning(random_pair):
    w, v = random_pair
    op = make_dyadic_shift(2, 3, 1.0, 1.0)
    report = certify(op, w, v, 0, c_cfg=1.0)
    assert any("not band" in msg for msg in report.warnings)


def test_necessity_on_random_suite():
    for seed in range(5):
        w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=20 + seed)
        v = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=30 + seed)
        op = make_random_band(2, 3, 1, seed=seed)
        tc = ct.testing_constants(op, w, v, 1)
        norm = operator_norm(op, w, v)
        slack = norm * (1.0 + 1e-9)
        assert tc.a1 <= slack and tc.a2 <= slack and tc.a3 <= slack
        assert tc.a1_local <= tc.a1 + 1e-10
        assert tc.a2_local <= tc.a2 + 1e-10


def test_expectation_bound_sqrt_d():
    # |I|^{1/2} || <W>_I^{-1/2} <W f>_I || <= sqrt(d) || f 1_I ||_{L2(W)}
    from dyadt1.linalg import invsqrt_spd
    from dyadt1.haar import weighted_norm

    rng = np.random.default_rng(0)
    for d in (1, 2, 3):
        w = generate_weight("random_a2", d, 4, {"t": 5.0}, seed=d)
        config = TreeConfig(4)
        for _ in range(5):
            f = rng.standard_normal((16, d))
            for interval in config.intervals():
                lo, hi = config.leaf_range(interval)
                wf = np.einsum("lij,lj->i", w.leaves[lo:hi], f[lo:hi]) * 2.0**-4
                wf /= interval.measure
                lhs = np.sqrt(interval.measure) * np.linalg.norm(
                    invsqrt_spd(w.average(interval)) @ wf
                )
                cut = np.zeros_like(f)
                cut[lo:hi] = f[lo:hi]
                assert lhs <= np.sqrt(d) * weighted_norm(w, cut) + 1e-9


def test_paraproduct_norm_bounded_by_local_constant(random_pair):
    from dyadt1.weights import Characteristics
    from dyadt1 import regression

    w, v = random_pair
    op = make_random_band(2, 3, 1, seed=17)
    a1l, _ = ct.testing_local(op, w, v)
    char = Characteristics.compute(w, n_samples=8, seed=0)
    pi_norm = spectral_norm_dense(build_paraproduct(op, w, v, 1))
    assert pi_norm <= regression.K_REG[2] * a1l * char.b_w
