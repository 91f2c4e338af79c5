"""Compiled and numpy kernels must agree, and both must keep the exact-centre property."""
import numpy as np
import pytest

from vsc import _pykernels, kernels

compiled = kernels.available_backends().get("compiled")
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def _random_geometry(rng, N=50, k=30, n=7):
    X = rng.normal(size=(N, n))
    xp = rng.normal(size=(k, n))
    xm = rng.normal(size=(k, n))
    v = xp - xm
    normals = v / np.linalg.norm(v, axis=1, keepdims=True)
    return X, (xp + xm) / 2, normals, v / 2


def test_backend_flag_is_consistent():
    assert kernels.BACKEND in kernels.available_backends()


@needs_compiled
@pytest.mark.parametrize("use_conf", [True, False])
def test_feature_matrix_agree(rng, use_conf):
    X, centers, normals, halves = _random_geometry(rng)
    a = compiled.feature_matrix(X, centers, normals, halves, 0.01, use_conf)
    b = _pykernels.feature_matrix(X, centers, normals, halves, 0.01, use_conf)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


@needs_compiled
def test_confidence_matrix_agree(rng):
    X, centers, _, halves = _random_geometry(rng, n=13)
    a = compiled.confidence_matrix(X, centers, halves, 0.01)
    b = _pykernels.confidence_matrix(X, centers, halves, 0.01)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


@needs_compiled
def test_cholesky_agree(rng):
    B = rng.normal(size=(40, 40))
    A = B @ B.T + np.eye(40)
    A = (A + A.T) / 2
    La, bad_a = compiled.cholesky(A)
    Lb, bad_b = _pykernels.cholesky(A)
    assert bad_a == bad_b == -1
    np.testing.assert_allclose(La, Lb, rtol=1e-10, atol=1e-12)
    b = rng.normal(size=40)
    np.testing.assert_allclose(compiled.cho_solve(La, b), _pykernels.cho_solve(Lb, b), rtol=1e-9)


@pytest.mark.parametrize("impl", sorted(kernels.available_backends()))
@pytest.mark.parametrize("n", [1, 2, 7, 8, 9, 16, 33])
def test_centre_is_exactly_half(impl, n, rng):
    mod = kernels.available_backends()[impl]
    _, centers, _, halves = _random_geometry(rng, k=25, n=n)
    C = mod.confidence_matrix(centers, centers, halves, 0.01)
    assert np.all(np.diag(C) == 0.5)


@pytest.mark.parametrize("impl", sorted(kernels.available_backends()))
def test_cholesky_reports_bad_pivot(impl):
    mod = kernels.available_backends()[impl]
    _, bad = mod.cholesky(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 2.0], [0.0, 2.0, 1.0]]))
    assert bad == 2


def test_fallback_chunking_matches_single_pass(rng, monkeypatch):
    X, centers, normals, halves = _random_geometry(rng, N=90, k=11, n=5)
    whole = _pykernels.feature_matrix(X, centers, normals, halves, 0.01, True)
    monkeypatch.setattr(_pykernels, "_CHUNK_ELEMS", 7)
    np.testing.assert_array_equal(
        _pykernels.feature_matrix(X, centers, normals, halves, 0.01, True), whole
    )
