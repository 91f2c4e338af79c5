"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, or when
``VSC_BACKEND=python`` is set.  Signatures and results match the compiled
module; only summation order (hence the last few bits) may differ.

Pair geometry is passed as ``centers`` (midpoints) and ``halves``
(``(x_plus - x_minus) / 2``).  Distances to the endpoints are taken from the
offset ``u = x - center`` as ``|half - u|`` and ``|half + u|``; at the centre
both reduce bitwise to ``|half|**2``, which is what makes the confidence there
exactly one half.
"""
import numpy as np

# max elements of one (rows, k, n) temporary
_CHUNK_ELEMS = 1 << 20


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _row_chunks(n_rows, k, n):
    step = max(1, _CHUNK_ELEMS // max(1, k * n))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def _pair_terms(X, centers, halves, normals, epsilon, want_conf):
    """Yield (rows, projection, confidence) per row chunk."""
    k, n = centers.shape
    half_sq = (halves * halves).sum(axis=-1)
    d = np.sqrt(half_sq)
    width = 2.0 * d / (half_sq + epsilon)
    for rows in _row_chunks(X.shape[0], k, n):
        U = X[rows, None, :] - centers[None, :, :]
        proj = None
        if normals is not None:
            proj = (U * normals[None, :, :]).sum(axis=-1)
        conf = None
        if want_conf:
            a = halves[None, :, :] - U
            b = halves[None, :, :] + U
            a = (a * a).sum(axis=-1)
            b = (b * b).sum(axis=-1)
            z = d / (a + epsilon) + d / (b + epsilon) - width
            conf = _sigmoid(z)
        yield rows, proj, conf


def confidence_matrix(X, centers, halves, epsilon):
    X = np.ascontiguousarray(X, dtype=np.float64)
    out = np.empty((X.shape[0], centers.shape[0]))
    for rows, _, conf in _pair_terms(X, centers, halves, None, epsilon, True):
        out[rows] = conf
    return out


def feature_matrix(X, centers, normals, halves, epsilon, use_confidence):
    X = np.ascontiguousarray(X, dtype=np.float64)
    N, k = X.shape[0], centers.shape[0]
    out = np.empty((N, k + 1))
    out[:, 0] = 1.0
    for rows, proj, conf in _pair_terms(
        X, centers, halves, normals, epsilon, use_confidence
    ):
        feat = np.tanh(proj)
        if use_confidence:
            feat *= conf
        out[rows, 1:] = feat
    return out


def gram(X):
    X = np.asarray(X, dtype=np.float64)
    G = X.T @ X
    upper = np.triu(G)
    return upper + np.triu(G, 1).T


def cholesky(A):
    """Lower Cholesky factor of ``A``.

    Returns ``(L, bad)`` where ``bad`` is the index of the first non-positive
    pivot, or -1 on success.
    """
    A = np.asarray(A, dtype=np.float64)
    m = A.shape[0]
    L = np.zeros_like(A)
    for j in range(m):
        row = L[j, :j]
        piv = A[j, j] - row @ row
        if not piv > 0.0:
            return L, j
        ljj = np.sqrt(piv)
        L[j, j] = ljj
        if j + 1 < m:
            L[j + 1 :, j] = (A[j + 1 :, j] - L[j + 1 :, :j] @ row) / ljj
    return L, -1


def cho_solve(L, b):
    m = L.shape[0]
    z = np.empty(m)
    for i in range(m):
        z[i] = (b[i] - L[i, :i] @ z[:i]) / L[i, i]
    x = np.empty(m)
    for i in range(m - 1, -1, -1):
        x[i] = (z[i] - L[i + 1 :, i] @ x[i + 1 :]) / L[i, i]
    return x
