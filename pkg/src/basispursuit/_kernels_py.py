"""Pure-numpy versions of the kernels in ``_kernels.pyx``.

Same signatures, same scan orders, same tolerance rule.  Used when the
compiled extension is missing or ``BASISPURSUIT_PURE=1`` is set.
"""
from itertools import combinations

import numpy as np


def _residual(basis, count, v):
    res = np.array(v, dtype=float)
    if count:
        w = basis[:count]
        for _ in range(2):
            res -= (w @ res) @ w
    return res


def gs_extend(basis, count, v, tol):
    m = v.shape[0]
    if m == 0:
        raise ValueError("ambient dimension must be positive")
    if basis.shape[1] != m:
        raise ValueError("dimension mismatch")
    if count >= basis.shape[0]:
        raise ValueError("basis storage is full")
    res = _residual(basis, count, v)
    rnorm = np.sqrt(res @ res)
    if rnorm <= tol * max(1.0, np.sqrt(v @ v)):
        return 0
    if count >= m:
        return -1
    basis[count] = res / rnorm
    return 1


def _subset_rank(cols, idx, stop_at, tol, basis):
    m = cols.shape[1]
    rank = 0
    for j in idx:
        if rank >= m:
            break
        v = cols[j]
        res = _residual(basis, rank, v)
        rnorm = np.sqrt(res @ res)
        if rnorm > tol * max(1.0, np.sqrt(v @ v)):
            basis[rank] = res / rnorm
            rank += 1
            if 0 <= stop_at <= rank:
                break
    return rank


def column_rank(cols, tol, stop_at=-1):
    n, m = cols.shape
    if n == 0 or m == 0:
        return 0
    return _subset_rank(cols, range(n), stop_at, tol, np.empty((m, m)))


def first_rank_drop(cols, r, tol, max_size):
    n, m = cols.shape
    if r <= 0 or n == 0:
        return None
    basis = np.empty((m, m))
    for s in range(1, min(max_size, n) + 1):
        for removed in combinations(range(n), s):
            gone = set(removed)
            keep = [j for j in range(n) if j not in gone]
            if _subset_rank(cols, keep, r, tol, basis) < r:
                return removed
    return None


def first_refuting_removal(cols, r, tol, removals):
    n, m = cols.shape
    if r <= 0 or n == 0 or len(removals) == 0:
        return -1
    basis = np.empty((m, m))
    for t, removed in enumerate(removals):
        gone = set(int(j) for j in removed)
        keep = [j for j in range(n) if j not in gone]
        if _subset_rank(cols, keep, r, tol, basis) < r:
            return t
    return -1
