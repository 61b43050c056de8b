import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadt1.errors import BadParams, OutOfTree, SingularLeaf
from dyadt1.tree import DyadicInterval, TreeConfig
from dyadt1.weights import (
    Characteristics,
    WeightGrid,
    a2_characteristic,
    generate_weight,
    r2_estimate,
)


def test_integral_identity_weight():
    w = generate_weight("identity", 2, 3)
    npt.assert_array_equal(w.integral(DyadicInterval(1, 0)), 0.5 * np.eye(2))


def test_integral_scalar_average(scalar_14):
    root = DyadicInterval(0, 0)
    assert scalar_14.integral(root)[0, 0] == 2.5
    assert scalar_14.average(root)[0, 0] == 2.5
    assert scalar_14.average(DyadicInterval(1, 1))[0, 0] == 4.0


def test_integral_additivity_exact():
    w = generate_weight("random_a2", 3, 5, {"t": 6.0}, seed=4)
    for interval in TreeConfig(4).intervals():
        left, right = interval.left(), interval.right()
        npt.assert_array_equal(w.integral(interval), w.integral(left) + w.integral(right))


def test_integral_out_of_tree(scalar_14):
    with pytest.raises(OutOfTree):
        scalar_14.integral(DyadicInterval(5, 0))


def test_inverse_weight_examples():
    w = WeightGrid(np.array([2.0, 0.5]))
    npt.assert_allclose(w.inverse().leaves[:, 0, 0], [0.5, 2.0])
    diag = WeightGrid(np.array([np.diag([2.0, 4.0]), np.diag([0.5, 1.0])]))
    npt.assert_allclose(diag.inverse().leaves, [np.diag([0.5, 0.25]), np.diag([2.0, 1.0])],
                        atol=1e-14)
    eye = generate_weight("identity", 3, 2)
    npt.assert_allclose(eye.inverse().leaves, eye.leaves, atol=1e-14)


def test_double_inverse_returns_weight():
    w = generate_weight("random_a2", 2, 4, {"t": 5.0}, seed=9)
    npt.assert_allclose(w.inverse().inverse().leaves, w.leaves, atol=1e-10)


def test_a2_characteristic_examples(scalar_14):
    assert a2_characteristic(generate_weight("identity", 2, 3)) == 1.0
    npt.assert_allclose(a2_characteristic(scalar_14), 25.0 / 16.0, atol=1e-12)
    diag = WeightGrid(np.array([np.diag([1.0, 4.0]), np.diag([4.0, 1.0])]))
    npt.assert_allclose(a2_characteristic(diag), 25.0 / 16.0, atol=1e-12)


def test_a2_exhaustive_oracle():
    # brute-force over every interval with numpy eigensolves
    w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=21)
    inv = w.inverse()
    expected = 1.0
    for interval in TreeConfig(3).intervals():
        a = w.average(interval)
        b = inv.average(interval)
        ra, va = np.linalg.eigh(a)
        root = (va * np.sqrt(ra)) @ va.T
        expected = max(expected, np.linalg.eigvalsh(root @ b @ root)[-1])
    npt.assert_allclose(a2_characteristic(w), expected, rtol=1e-12)


def test_a2_inverse_symmetry():
    for seed in range(5):
        w = generate_weight("random_a2", 3, 4, {"t": 4.0}, seed=seed)
        assert abs(a2_characteristic(w) - a2_characteristic(w.inverse())) <= 1e-9


def test_r2_scalar_exact(scalar_14):
    npt.assert_allclose(r2_estimate(scalar_14, 1, 0), 10.0 / 9.0, atol=1e-12)
    # seed/sample independence in d = 1
    assert r2_estimate(scalar_14, 1, 123) == r2_estimate(scalar_14, 7, 0)


def test_r2_scalar_matches_enumeration():
    w = generate_weight("scalar_power", 1, 4, {"exponent": 1.5})
    vals = w.leaves[:, 0, 0]
    expected = 1.0
    for interval in TreeConfig(4).intervals():
        lo, hi = TreeConfig(4).leaf_range(interval)
        expected = max(expected, vals[lo:hi].mean() / np.sqrt(vals[lo:hi]).mean() ** 2)
    npt.assert_allclose(r2_estimate(w, 3, 5), expected, rtol=1e-12)


def test_r2_constant_weight_is_one():
    const = WeightGrid(np.tile(np.array([[2.0, 0.3], [0.3, 1.0]]), (8, 1, 1)))
    assert r2_estimate(const, 4, 0) == 1.0


def test_r2_lower_bounds_rh_on_more_samples():
    w = generate_weight("random_a2", 2, 3, {"t": 5.0}, seed=3)
    few = r2_estimate(w, 2, 0)
    many = r2_estimate(w, 64, 0)
    assert few <= many + 1e-12  # candidate set only grows


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_scaling_invariance(c):
    w = generate_weight("random_a2", 2, 4, {"t": 4.0}, seed=6)
    assert abs(a2_characteristic(w.scaled(c)) - a2_characteristic(w)) <= 1e-10
    assert abs(r2_estimate(w.scaled(c), 4, 1) - r2_estimate(w, 4, 1)) <= 1e-10


def test_integral_monotone_psd():
    w = generate_weight("random_a2", 3, 4, {"t": 4.0}, seed=8)
    config = TreeConfig(4)
    for interval in config.intervals():
        if interval.level == 0:
            continue
        diff = w.integral(interval.parent()) - w.integral(interval)
        assert np.linalg.eigvalsh(diff)[0] >= -1e-12


def test_generate_identity():
    w = generate_weight("identity", 2, 3)
    assert w.leaves.shape == (8, 2, 2)
    npt.assert_array_equal(w.leaves, np.broadcast_to(np.eye(2), (8, 2, 2)))


def test_generate_scalar_power_zero_exponent():
    w = generate_weight("scalar_power", 1, 3, {"exponent": 0.0})
    npt.assert_array_equal(w.leaves[:, 0, 0], np.ones(8))


def test_generate_random_t1_is_identity():
    for seed in (0, 5, 99):
        w = generate_weight("random_a2", 2, 3, {"t": 1.0}, seed=seed)
        npt.assert_array_equal(w.leaves, np.broadcast_to(np.eye(2), (8, 2, 2)))


def test_generate_rotating_diagonal():
    w = generate_weight("rotating_diagonal", 2, 3, {"t": 4.0})
    eigs = np.linalg.eigvalsh(w.leaves)
    npt.assert_allclose(eigs[:, 0], 0.25, atol=1e-12)
    npt.assert_allclose(eigs[:, 1], 4.0, atol=1e-12)
    with pytest.raises(BadParams):
        generate_weight("rotating_diagonal", 1, 3, {"t": 4.0})


def test_generate_determinism():
    a = generate_weight("random_a2", 3, 4, {"t": 3.0}, seed=17)
    b = generate_weight("random_a2", 3, 4, {"t": 3.0}, seed=17)
    npt.assert_array_equal(a.leaves, b.leaves)


def test_generator_rejects_bad_params():
    with pytest.raises(BadParams):
        generate_weight("random_a2", 2, 3, {"t": 0.5})
    with pytest.raises(BadParams):
        generate_weight("nope", 2, 3)
    with pytest.raises(BadParams):
        generate_weight("explicit", 2, 3)


def test_constructor_rejects_degenerate():
    with pytest.raises(SingularLeaf):
        WeightGrid(np.zeros((2, 1, 1)))
    with pytest.raises(BadParams):
        WeightGrid(np.array([[[1.0, 0.5], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]]))
    with pytest.raises(BadParams):
        WeightGrid(np.ones((3, 1, 1)))  # not a power of two


def test_json_roundtrip_bit_exact():
    w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=12)
    back = WeightGrid.from_json(w.to_json())
    npt.assert_array_equal(back.leaves, w.leaves)


def test_characteristics_fields():
    w = generate_weight("random_a2", 2, 3, {"t": 4.0}, seed=1)
    ch = Characteristics.compute(w, n_samples=4, seed=0)
    assert ch.a2 >= 1.0 and ch.r2_lower >= 1.0
    assert ch.b_w == pytest.approx(np.sqrt(ch.a2 * ch.r2_lower), abs=0)
    assert ch.to_json(2)["r2_proxy_d_a2"] == 2 * ch.a2


@settings(deadline=None, max_examples=25)
@given(st.lists(st.floats(0.1, 10.0), min_size=4, max_size=4), st.integers(0, 3))
def test_scalar_a2_at_least_one(vals, level_seed):
    w = WeightGrid(np.array(vals))
    assert a2_characteristic(w) >= 1.0
    assert r2_estimate(w, 1, level_seed) >= 1.0
