import numpy as np
import numpy.testing as npt
import pytest

from dyadt1 import linalg
from dyadt1.errors import SingularLeaf
from dyadt1.kernels import BACKEND, _ref, jacobi_eigh, jacobi_eigh_batch

try:
    from dyadt1.kernels import _fast
except ImportError:
    _fast = None


def random_symmetric(rng, m, n):
    a = rng.standard_normal((m, n, n))
    return 0.5 * (a + a.transpose(0, 2, 1))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_jacobi_matches_numpy(n):
    rng = np.random.default_rng(0)
    a = random_symmetric(rng, 50, n)
    w, v = jacobi_eigh_batch(a)
    w_np = np.sort(np.linalg.eigvalsh(a), axis=1)[:, ::-1]
    npt.assert_allclose(w, w_np, atol=1e-12 * max(1, np.max(np.abs(w_np))))
    recon = np.einsum("mij,mj,mkj->mik", v, w, v)
    npt.assert_allclose(recon, a, atol=1e-12)
    ident = np.einsum("mji,mjk->mik", v, v)
    npt.assert_allclose(ident, np.broadcast_to(np.eye(n), (50, n, n)), atol=1e-13)


def test_eigenvalues_sorted_descending_stably():
    w, v = jacobi_eigh(np.eye(4) * 2.0)
    npt.assert_array_equal(w, [2.0, 2.0, 2.0, 2.0])
    npt.assert_array_equal(v, np.eye(4))


def test_sign_convention_first_significant_positive():
    rng = np.random.default_rng(3)
    a = random_symmetric(rng, 20, 3)
    _, v = jacobi_eigh_batch(a)
    for mat in v:
        for col in mat.T:
            lead = col[np.abs(col) > 1e-8 * np.max(np.abs(col))][0]
            assert lead > 0


@pytest.mark.skipif(_fast is None, reason="compiled backend not built")
def test_backends_agree():
    rng = np.random.default_rng(11)
    for n in (1, 2, 3, 6, 8):
        a = random_symmetric(rng, 30, n)
        w1, v1 = _ref.jacobi_eigh_batch(a)
        w2, v2 = _fast.jacobi_eigh_batch(a)
        npt.assert_allclose(w1, w2, rtol=0, atol=1e-12)
        npt.assert_allclose(v1, v2, rtol=0, atol=1e-12)


def test_backend_reported():
    assert BACKEND in ("cython", "python")


def test_spd_transforms_roundtrip():
    rng = np.random.default_rng(5)
    g = rng.standard_normal((10, 4, 4))
    spd = np.einsum("mij,mkj->mik", g, g) + 0.1 * np.eye(4)
    root = linalg.sqrt_spd_batch(spd)
    npt.assert_allclose(np.einsum("mij,mjk->mik", root, root), spd, atol=1e-10)
    inv = linalg.inv_spd_batch(spd)
    npt.assert_allclose(np.einsum("mij,mjk->mik", inv, spd),
                        np.broadcast_to(np.eye(4), spd.shape), atol=1e-9)
    invroot = linalg.invsqrt_spd_batch(spd)
    npt.assert_allclose(np.einsum("mij,mjk,mkl->mil", invroot, spd, invroot),
                        np.broadcast_to(np.eye(4), spd.shape), atol=1e-9)


def test_inverse_guard_raises():
    with pytest.raises(SingularLeaf):
        linalg.inv_spd(np.zeros((2, 2)), min_eig=1e-14)


def test_spectral_norm_dense_matches_svd():
    rng = np.random.default_rng(7)
    for shape in [(1, 1), (5, 5), (40, 40), (30, 50)]:
        m = rng.standard_normal(shape)
        got = linalg.spectral_norm_dense(m)
        want = np.linalg.svd(m, compute_uv=False)[0]
        assert abs(got - want) <= 1e-10 * want


def test_top_eigval_psd_matches_numpy():
    rng = np.random.default_rng(9)
    g = rng.standard_normal((60, 60))
    s = g @ g.T
    got = linalg.top_eigval_psd(s)
    want = np.linalg.eigvalsh(s)[-1]
    assert abs(got - want) <= 1e-10 * want
    assert linalg.top_eigval_psd(np.zeros((12, 12))) == 0.0


def test_small_batch_spectral_norm():
    rng = np.random.default_rng(13)
    mats = rng.standard_normal((25, 3, 3))
    got = linalg.spectral_norm_small_batch(mats)
    want = np.linalg.svd(mats, compute_uv=False)[:, 0]
    npt.assert_allclose(got, want, atol=1e-12)
