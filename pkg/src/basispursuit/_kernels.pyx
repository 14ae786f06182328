# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled span-test and subset-rank kernels.

Every function here has a line-for-line twin in ``_kernels_py`` and must
return the same answers; ``basispursuit._backend`` picks one at import.
Column sets are passed transposed, one column per row of a C-contiguous
``(n, m)`` array, so each column is a contiguous vector.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef double _norm(const double *x, Py_ssize_t m) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(m):
        s += x[i] * x[i]
    return sqrt(s)


cdef bint _extend(double *basis, Py_ssize_t count, const double *v,
                  Py_ssize_t m, double tol, double *res, double *coef) noexcept nogil:
    # classical Gram-Schmidt, two passes; on success the unit residual is
    # written to basis row ``count``
    cdef Py_ssize_t i, l, p
    cdef double vnorm, rnorm, s, scale
    for i in range(m):
        res[i] = v[i]
    vnorm = _norm(v, m)
    for p in range(2):
        for l in range(count):
            s = 0.0
            for i in range(m):
                s += basis[l * m + i] * res[i]
            coef[l] = s
        for l in range(count):
            s = coef[l]
            for i in range(m):
                res[i] -= s * basis[l * m + i]
    rnorm = _norm(res, m)
    scale = vnorm if vnorm > 1.0 else 1.0
    if rnorm <= tol * scale:
        return False
    if count >= m:
        return False
    for i in range(m):
        basis[count * m + i] = res[i] / rnorm
    return True


def gs_extend(double[:, ::1] basis, Py_ssize_t count, const double[::1] v, double tol):
    """Try to append ``v`` to the orthonormal rows ``basis[:count]``.

    Returns 1 when ``v`` left the span and row ``count`` now holds the new
    unit vector, 0 when ``v`` is in the span, and -1 when the basis is
    already full yet ``v`` still has a residual above tolerance.
    """
    cdef Py_ssize_t m = v.shape[0]
    if m == 0:
        raise ValueError("ambient dimension must be positive")
    if basis.shape[1] != m:
        raise ValueError("dimension mismatch")
    if count >= basis.shape[0]:
        raise ValueError("basis storage is full")
    cdef double[::1] res = np.empty(m)
    cdef double[::1] coef = np.empty(max(count, 1))
    cdef bint ok
    cdef double rnorm, vnorm
    with nogil:
        ok = _extend(&basis[0, 0], count, &v[0], m, tol, &res[0], &coef[0])
    if ok:
        return 1
    if count >= m:
        rnorm = _norm(&res[0], m)
        vnorm = _norm(&v[0], m)
        if rnorm > tol * (vnorm if vnorm > 1.0 else 1.0):
            return -1
    return 0


cdef Py_ssize_t _subset_rank(const double *cols, Py_ssize_t m,
                             const Py_ssize_t *idx, Py_ssize_t count,
                             Py_ssize_t stop_at, double tol,
                             double *basis, double *res, double *coef) noexcept nogil:
    cdef Py_ssize_t rank = 0, t
    for t in range(count):
        if rank >= m:
            break
        if _extend(basis, rank, cols + idx[t] * m, m, tol, res, coef):
            rank += 1
            if stop_at >= 0 and rank >= stop_at:
                break
    return rank


def column_rank(const double[:, ::1] cols, double tol, Py_ssize_t stop_at=-1):
    """Numerical rank of the columns stored as rows of ``cols``."""
    cdef Py_ssize_t n = cols.shape[0], m = cols.shape[1]
    if n == 0 or m == 0:
        return 0
    cdef Py_ssize_t[::1] idx = np.arange(n, dtype=np.intp)
    cdef double[::1] basis = np.empty(m * m)
    cdef double[::1] res = np.empty(m)
    cdef double[::1] coef = np.empty(m)
    cdef Py_ssize_t rank
    with nogil:
        rank = _subset_rank(&cols[0, 0], m, &idx[0], n, stop_at, tol,
                            &basis[0], &res[0], &coef[0])
    return rank


def first_rank_drop(const double[:, ::1] cols, Py_ssize_t r, double tol, Py_ssize_t max_size):
    """Smallest lexicographically-first column set whose removal drops rank.

    Removal sets are scanned by increasing size ``1..max_size`` and in
    lexicographic order within a size.  Returns the removed indices as a
    tuple, or ``None`` when no set up to ``max_size`` lowers the rank
    below ``r``.
    """
    cdef Py_ssize_t n = cols.shape[0], m = cols.shape[1]
    if r <= 0 or n == 0:
        return None
    cdef double[::1] basis = np.empty(m * m)
    cdef double[::1] res = np.empty(m)
    cdef double[::1] coef = np.empty(m)
    cdef Py_ssize_t[::1] comb = np.empty(n + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] keep = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t s, i, j, t, nk, rank
    cdef bint found = False
    with nogil:
        for s in range(1, min(max_size, n) + 1):
            for i in range(s):
                comb[i] = i
            while True:
                # complement of comb[0:s], in increasing order
                nk = 0
                t = 0
                for j in range(n):
                    if t < s and comb[t] == j:
                        t += 1
                    else:
                        keep[nk] = j
                        nk += 1
                rank = _subset_rank(&cols[0, 0], m, &keep[0], nk, r, tol,
                                    &basis[0], &res[0], &coef[0])
                if rank < r:
                    found = True
                    break
                # next combination
                i = s - 1
                while i >= 0 and comb[i] == n - s + i:
                    i -= 1
                if i < 0:
                    break
                comb[i] += 1
                for j in range(i + 1, s):
                    comb[j] = comb[j - 1] + 1
            if found:
                break
    if not found:
        return None
    return tuple(int(comb[i]) for i in range(s))


def first_refuting_removal(const double[:, ::1] cols, Py_ssize_t r, double tol,
                           const Py_ssize_t[:, ::1] removals):
    """Index of the first row of ``removals`` that drops the rank, or -1."""
    cdef Py_ssize_t n = cols.shape[0], m = cols.shape[1]
    cdef Py_ssize_t trials = removals.shape[0], k = removals.shape[1]
    if r <= 0 or n == 0 or trials == 0:
        return -1
    cdef double[::1] basis = np.empty(m * m)
    cdef double[::1] res = np.empty(m)
    cdef double[::1] coef = np.empty(m)
    cdef Py_ssize_t[::1] keep = np.empty(n, dtype=np.intp)
    cdef unsigned char[::1] drop = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t t, j, nk, rank, hit = -1
    with nogil:
        for t in range(trials):
            for j in range(k):
                drop[removals[t, j]] = 1
            nk = 0
            for j in range(n):
                if not drop[j]:
                    keep[nk] = j
                    nk += 1
            for j in range(k):
                drop[removals[t, j]] = 0
            rank = _subset_rank(&cols[0, 0], m, &keep[0], nk, r, tol,
                                &basis[0], &res[0], &coef[0])
            if rank < r:
                hit = t
                break
    return hit
