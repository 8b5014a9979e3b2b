import numpy as np
import pytest
from numpy.testing import assert_allclose

from sdec import spectral
from sdec.errors import (
    DimensionMismatch,
    NonFinite,
    NotOrthonormal,
    ShapeNotTwoDim,
    ZeroMatrix,
)

RNG = np.random.default_rng(20260821)


def random_sizes(count, max_n=77, max_d=256):
    rng = np.random.default_rng(99)
    for _ in range(count):
        yield int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_d + 1))


# --- svd_decompose -----------------------------------------------------------


def test_svd_diagonal_values():
    f = spectral.svd_decompose(np.diag([3.0, 4.0]))
    # oracle: eigenvalues of A^T A, descending square roots
    oracle = np.sqrt(np.sort(np.linalg.eigvalsh(np.diag([9.0, 16.0])))[::-1])
    assert_allclose(f.s, oracle, rtol=0, atol=1e-12)
    assert_allclose(f.s, [4.0, 3.0], rtol=0, atol=0)


def test_svd_identity():
    f = spectral.svd_decompose(np.eye(2))
    assert_allclose(f.s, [1.0, 1.0], rtol=0, atol=0)
    assert_allclose(f.u @ f.v.T, np.eye(2), atol=1e-15)


def test_svd_rank_one_grid():
    a = np.fromfunction(lambda i, j: (i + 1) * (j + 1) / 10.0, (4, 3))
    f = spectral.svd_decompose(a)
    assert np.linalg.norm(f.reconstruct() - a) <= 1e-12
    # a = (1/10) * outer((1,2,3,4), (1,2,3)) has a single nonzero singular value
    assert f.rank() == 1
    assert_allclose(f.s[0], np.sqrt(30.0 * 14.0) / 10.0, rtol=1e-12)


def test_svd_reconstruction_random():
    for n, d in random_sizes(200):
        a = RNG.standard_normal((n, d))
        f = spectral.svd_decompose(a)
        bound = 1e-10 * max(1.0, np.linalg.norm(a))
        assert np.linalg.norm(f.reconstruct() - a) <= bound
        assert np.all(np.diff(f.s) <= 0) and np.all(f.s >= 0)
        r = min(n, d)
        assert np.linalg.norm(f.u.T @ f.u - np.eye(r)) <= 1e-10
        assert np.linalg.norm(f.v.T @ f.v - np.eye(r)) <= 1e-10


def test_svd_sign_convention_and_determinism():
    for _ in range(25):
        a = RNG.standard_normal((12, 7))
        f1 = spectral.svd_decompose(a)
        f2 = spectral.svd_decompose(a.copy())
        for m1, m2 in [(f1.u, f2.u), (f1.s, f2.s), (f1.v, f2.v)]:
            assert np.array_equal(m1, m2)
        pick = np.argmax(np.abs(f1.v), axis=0)
        assert np.all(f1.v[pick, np.arange(f1.v.shape[1])] > 0)


def test_svd_rejects_bad_input():
    with pytest.raises(NonFinite):
        spectral.svd_decompose(np.array([[np.nan, 1.0], [0.0, 2.0]]))
    with pytest.raises(ShapeNotTwoDim):
        spectral.svd_decompose(np.ones(3))
    with pytest.raises(ShapeNotTwoDim):
        spectral.svd_decompose(np.ones((0, 3)))


# --- orth ---------------------------------------------------------------------


def test_orth_axis_aligned():
    b = spectral.orth(np.array([[2.0, 0.0], [0.0, 0.0]]))
    assert_allclose(b, [[1.0], [0.0]], atol=1e-15)


def test_orth_duplicate_rows():
    b = spectral.orth(np.array([[1.0, 1.0], [2.0, 2.0]]))
    assert b.shape == (2, 1)
    assert_allclose(b[:, 0], [1.0 / np.sqrt(2.0)] * 2, rtol=1e-15)


def test_orth_rank_cutoff():
    a = np.vstack([np.eye(3), np.eye(3) * 1e-14])
    assert spectral.orth(a).shape == (3, 3)
    assert spectral.orth(np.array([[1.0, 0.0, 0.0], [1e-14, 0.0, 0.0]])).shape == (3, 1)


def test_orth_zero_matrix():
    with pytest.raises(ZeroMatrix):
        spectral.orth(np.zeros((3, 4)))


# --- projector_from_basis ------------------------------------------------------


def test_projector_half_plane():
    b = spectral.orth(np.array([[1.0, 1.0]]))
    p = spectral.projector_from_basis(b)
    assert_allclose(p.data, np.full((2, 2), 0.5), atol=1e-15)
    assert p.rank == 1 and p.dim == 2


def test_projector_properties_random():
    for _ in range(50):
        d = int(RNG.integers(2, 24))
        k = int(RNG.integers(0, d + 1))
        b = spectral.random_orthonormal(d, k, RNG)
        p = spectral.projector_from_basis(b)
        assert p.rank == k
        assert np.linalg.norm(p.data - p.data.T) <= 1e-10
        assert np.linalg.norm(p.data @ p.data - p.data) <= 1e-9
        assert abs(np.trace(p.data) - k) <= 1e-8
        w = np.linalg.eigvalsh(p.data)
        assert np.all((np.abs(w) <= 1e-8) | (np.abs(w - 1.0) <= 1e-8))


def test_projector_rejects_non_orthonormal():
    with pytest.raises(NotOrthonormal):
        spectral.projector_from_basis(np.array([[1.0], [1.0]]))


# --- norms ---------------------------------------------------------------------


def test_spectral_norm_values():
    assert spectral.spectral_norm(np.array([[0.0, 2.5], [2.5, 0.0]])) == pytest.approx(2.5)
    assert spectral.spectral_norm(np.zeros((3, 3))) == 0.0
    assert spectral.spectral_norm(np.array([3.0, 4.0])) == pytest.approx(5.0)


def test_norm_rejects_nan():
    with pytest.raises(NonFinite):
        spectral.spectral_norm(np.array([[np.inf, 0.0]]))
    with pytest.raises(NonFinite):
        spectral.frobenius_norm(np.array([[np.nan]]))


def test_spectral_norm_submultiplicative():
    for _ in range(200):
        n = int(RNG.integers(1, 12))
        k = int(RNG.integers(1, 12))
        m = int(RNG.integers(1, 12))
        a = RNG.standard_normal((n, k))
        b = RNG.standard_normal((k, m))
        lhs = spectral.spectral_norm(a @ b)
        rhs = spectral.spectral_norm(a) * spectral.spectral_norm(b)
        assert lhs <= rhs * (1.0 + 1e-12)


def test_frobenius_dominates_spectral():
    for _ in range(50):
        a = RNG.standard_normal((9, 5))
        assert spectral.spectral_norm(a) <= spectral.frobenius_norm(a) * (1.0 + 1e-12)


# --- principal_angle_cosines -----------------------------------------------------


def test_principal_angles_identical_and_orthogonal():
    b = spectral.random_orthonormal(8, 3, np.random.default_rng(5))
    assert_allclose(spectral.principal_angle_cosines(b, b), np.ones(3), atol=1e-12)

    e = np.eye(4)
    cos = spectral.principal_angle_cosines(e[:, :2], e[:, 2:])
    assert_allclose(cos, np.zeros(2), atol=1e-15)


def test_principal_angles_rotated_plane():
    # planes sharing e1, second axis rotated by 10 degrees into e3
    theta = np.deg2rad(10.0)
    b1 = np.eye(3)[:, :2]
    b2 = np.column_stack([
        np.array([1.0, 0.0, 0.0]),
        np.array([0.0, np.cos(theta), np.sin(theta)]),
    ])
    cos = spectral.principal_angle_cosines(b1, b2)
    assert_allclose(cos, [1.0, np.cos(theta)], rtol=0, atol=1e-12)
    assert cos[1] == pytest.approx(0.984807753012208, abs=1e-12)


def test_principal_angles_symmetry_and_range():
    for _ in range(40):
        d = int(RNG.integers(2, 16))
        r1 = int(RNG.integers(1, d + 1))
        r2 = int(RNG.integers(1, d + 1))
        b1 = spectral.random_orthonormal(d, r1, RNG)
        b2 = spectral.random_orthonormal(d, r2, RNG)
        c12 = spectral.principal_angle_cosines(b1, b2)
        c21 = spectral.principal_angle_cosines(b2, b1)
        assert c12.shape == (min(r1, r2),)
        assert np.all((0.0 <= c12) & (c12 <= 1.0))
        assert_allclose(c12, c21, atol=1e-10)


def test_principal_angles_validation():
    e = np.eye(3)
    with pytest.raises(DimensionMismatch):
        spectral.principal_angle_cosines(e[:, :1], np.eye(4)[:, :1])
    with pytest.raises(NotOrthonormal):
        spectral.principal_angle_cosines(e[:, :2] * 2.0, e[:, :1])


def test_random_orthonormal_deterministic():
    a = spectral.random_orthonormal(10, 4, np.random.default_rng(3))
    b = spectral.random_orthonormal(10, 4, np.random.default_rng(3))
    assert np.array_equal(a, b)
    assert np.linalg.norm(a.T @ a - np.eye(4)) <= 1e-12
