# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: pair confidence / feature matrices and Cholesky.

Mirrors ``vsc._pykernels`` function for function.  Do not build with
-ffast-math: the exact 1/2 confidence at a pair centre relies on the two
endpoint distances being summed in the same order as the half-width.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt, tanh

cnp.import_array()


cdef inline double _sigmoid(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef void _geometry(const double[:, ::1] halves, double epsilon,
                    double[::1] d, double[::1] width) noexcept nogil:
    cdef Py_ssize_t j, l
    cdef double s, h
    for j in range(halves.shape[0]):
        s = 0.0
        for l in range(halves.shape[1]):
            h = halves[j, l]
            s = s + h * h
        d[j] = sqrt(s)
        width[j] = 2.0 * d[j] / (s + epsilon)


cdef inline double _conf(const double[:, ::1] X, const double[:, ::1] centers,
                         const double[:, ::1] halves, Py_ssize_t i, Py_ssize_t j,
                         double dj, double wj, double epsilon) noexcept nogil:
    cdef Py_ssize_t l
    cdef double u, a, b, t
    a = 0.0
    b = 0.0
    for l in range(X.shape[1]):
        u = X[i, l] - centers[j, l]
        t = halves[j, l] - u
        a = a + t * t
        t = halves[j, l] + u
        b = b + t * t
    return _sigmoid(dj / (a + epsilon) + dj / (b + epsilon) - wj)


def confidence_matrix(X, centers, halves, double epsilon):
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] C = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const double[:, ::1] H = np.ascontiguousarray(halves, dtype=np.float64)
    cdef Py_ssize_t N = Xv.shape[0], k = C.shape[0], i, j
    out = np.empty((N, k))
    cdef double[:, ::1] o = out
    cdef double[::1] d = np.empty(k)
    cdef double[::1] width = np.empty(k)
    with nogil:
        _geometry(H, epsilon, d, width)
        for i in range(N):
            for j in range(k):
                o[i, j] = _conf(Xv, C, H, i, j, d[j], width[j], epsilon)
    return out


def feature_matrix(X, centers, normals, halves, double epsilon, bint use_confidence):
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] C = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const double[:, ::1] V = np.ascontiguousarray(normals, dtype=np.float64)
    cdef const double[:, ::1] H = np.ascontiguousarray(halves, dtype=np.float64)
    cdef Py_ssize_t N = Xv.shape[0], k = C.shape[0], n = Xv.shape[1], i, j, l
    out = np.empty((N, k + 1))
    cdef double[:, ::1] o = out
    cdef double[::1] d = np.empty(k)
    cdef double[::1] width = np.empty(k)
    cdef double proj, f
    with nogil:
        _geometry(H, epsilon, d, width)
        for i in range(N):
            o[i, 0] = 1.0
            for j in range(k):
                proj = 0.0
                for l in range(n):
                    proj = proj + V[j, l] * (Xv[i, l] - C[j, l])
                f = tanh(proj)
                if use_confidence:
                    f = f * _conf(Xv, C, H, i, j, d[j], width[j], epsilon)
                o[i, j + 1] = f
    return out


def gram(X):
    # BLAS beats any hand loop here; symmetrize so the result is bitwise symmetric
    X = np.asarray(X, dtype=np.float64)
    G = X.T @ X
    return np.triu(G) + np.triu(G, 1).T


cdef inline double _dot(const double* a, const double* b, Py_ssize_t n) noexcept nogil:
    # four partial sums break the dependency chain so the loop pipelines
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t p = 0
    while p + 4 <= n:
        s0 += a[p] * b[p]
        s1 += a[p + 1] * b[p + 1]
        s2 += a[p + 2] * b[p + 2]
        s3 += a[p + 3] * b[p + 3]
        p += 4
    while p < n:
        s0 += a[p] * b[p]
        p += 1
    return (s0 + s1) + (s2 + s3)


def cholesky(A):
    """Return ``(L, bad)``; ``bad`` is the first non-positive pivot or -1."""
    cdef const double[:, ::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef Py_ssize_t m = Av.shape[0], i, j
    L = np.zeros((m, m))
    cdef double[:, ::1] Lv = L
    cdef double s
    cdef Py_ssize_t bad = -1
    with nogil:
        for j in range(m):
            s = Av[j, j] - _dot(&Lv[j, 0], &Lv[j, 0], j)
            if not s > 0.0:
                bad = j
                break
            Lv[j, j] = sqrt(s)
            for i in range(j + 1, m):
                Lv[i, j] = (Av[i, j] - _dot(&Lv[i, 0], &Lv[j, 0], j)) / Lv[j, j]
    return L, bad


def cho_solve(L, b):
    cdef const double[:, ::1] Lv = np.ascontiguousarray(L, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t m = Lv.shape[0], i, p
    z_arr = np.empty(m)
    x_arr = np.empty(m)
    cdef double[::1] z = z_arr
    cdef double[::1] x = x_arr
    cdef double s
    with nogil:
        for i in range(m):
            s = bv[i]
            for p in range(i):
                s = s - Lv[i, p] * z[p]
            z[i] = s / Lv[i, i]
        for i in range(m - 1, -1, -1):
            s = z[i]
            for p in range(i + 1, m):
                s = s - Lv[p, i] * x[p]
            x[i] = s / Lv[i, i]
    return x_arr
