from itertools import combinations

import numpy as np
import pytest


def ge_rank(M, tol=1e-9):
    """Rank by Gaussian elimination with full pivoting (no SVD, no Gram-Schmidt)."""
    A = np.array(M, dtype=float)
    if A.size == 0:
        return 0
    scale = max(1.0, np.max(np.abs(A)))
    rank = 0
    rows, cols = A.shape
    for step in range(min(rows, cols)):
        sub = np.abs(A[step:, step:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= tol * scale:
            break
        i += step
        j += step
        A[[step, i]] = A[[i, step]]
        A[:, [step, j]] = A[:, [j, step]]
        A[step + 1 :] -= np.outer(A[step + 1 :, step] / A[step, step], A[step])
        rank += 1
    return rank


def brute_stability(A, tol=1e-9):
    """Column stability via SVD ranks of every column subset (independent of the kernels)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    r = np.linalg.matrix_rank(A, tol=tol * max(1.0, np.linalg.norm(A)))
    if r == 0:
        return 0, n
    for s in range(1, n - r + 2):
        for removed in combinations(range(n), s):
            keep = [j for j in range(n) if j not in removed]
            sub = A[:, keep]
            if sub.shape[1] == 0 or np.linalg.matrix_rank(sub, tol=tol * max(1.0, np.linalg.norm(A))) < r:
                return r, s - 1
    raise AssertionError("unreachable")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
