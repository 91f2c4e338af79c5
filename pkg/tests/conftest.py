import numpy as np
import pytest

from vsc import kernels
from vsc.data import gen_twonorm

BACKENDS = kernels.available_backends()
_KERNEL_NAMES = ("confidence_matrix", "feature_matrix", "gram", "cholesky", "cho_solve")


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    impl = BACKENDS[request.param]
    for name in _KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def blobs():
    """Two well separated Gaussian blobs, 100 points each, in 2-D."""
    r = np.random.default_rng(3)
    x = np.vstack([r.normal(2.0, 0.5, (100, 2)), r.normal(-2.0, 0.5, (100, 2))])
    y = np.array([1] * 100 + [-1] * 100)
    from vsc.data import Dataset

    return Dataset(x=x, y=y, source="blobs")


@pytest.fixture(scope="session")
def twonorm_small():
    return gen_twonorm(400, 20, 1)
