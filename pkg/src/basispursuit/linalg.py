"""Small dense linear algebra used by the reconstruction algorithms.

Matrices are plain ``float64`` numpy arrays; :func:`as_matrix` enforces the
shape and finiteness rules.  Span and rank decisions all go through
:class:`OrthonormalBasisTracker`, whose inner loop lives in the compiled
kernel when it is available.
"""
from __future__ import annotations

import enum
import io
import os
import warnings
from typing import Iterable, TextIO

import numpy as np
import scipy.linalg as sla

from . import _backend
from .errors import DimensionError, RankDeficiencyError, SingularMatrixError, ToleranceError

DEFAULT_TOL = 1e-9


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a C-contiguous finite float64 2-D array."""
    M = np.ascontiguousarray(A, dtype=np.float64)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {M.shape}")
    if M.shape[0] < 1 or M.shape[1] < 1:
        raise DimensionError(f"{name} must have positive dimensions, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains NaN or Inf")
    return M


class SpanTest(enum.Enum):
    IN_SPAN = "in_span"
    EXTENDED = "extended"


class OrthonormalBasisTracker:
    """Incrementally built orthonormal basis of a subspace of R^m.

    A vector ``v`` counts as in the span when the residual after projection
    satisfies ``||v - P v|| <= tol * max(1, ||v||)``.  New directions are
    orthogonalised twice (classical Gram-Schmidt with one full
    re-orthogonalisation) before normalising.
    """

    def __init__(self, ambient_dim: int, tol: float = DEFAULT_TOL, capacity: int | None = None):
        if ambient_dim < 1:
            raise DimensionError("ambient_dim must be positive")
        self.ambient_dim = int(ambient_dim)
        self.tol = float(tol)
        cap = self.ambient_dim if capacity is None else max(1, min(capacity, self.ambient_dim))
        self._store = np.empty((cap, self.ambient_dim))
        self._count = 0

    def __len__(self) -> int:
        return self._count

    @property
    def basis(self) -> np.ndarray:
        """Current basis vectors, one per row (read-only view)."""
        view = self._store[: self._count]
        view.flags.writeable = False
        return view

    def _check(self, v) -> np.ndarray:
        v = np.ascontiguousarray(v, dtype=np.float64)
        if v.shape != (self.ambient_dim,):
            raise DimensionError(
                f"vector of shape {v.shape} does not match ambient dimension {self.ambient_dim}"
            )
        return v

    def project(self, v) -> np.ndarray:
        v = self._check(v)
        if self._count == 0:
            return np.zeros(self.ambient_dim)
        W = self._store[: self._count]
        return (W @ v) @ W

    def try_extend(self, v) -> SpanTest:
        v = self._check(v)
        if not np.all(np.isfinite(v)):
            raise ValueError("vector contains NaN or Inf")
        if self._count == self._store.shape[0] and self._count < self.ambient_dim:
            grown = np.empty((min(2 * self._count, self.ambient_dim), self.ambient_dim))
            grown[: self._count] = self._store[: self._count]
            self._store = grown
        if self._count == self.ambient_dim:
            # full basis: nothing can be new, but a large residual means the
            # stored vectors have lost orthogonality
            res = v - self.project(v)
            if np.linalg.norm(res) > self.tol * max(1.0, np.linalg.norm(v)):
                raise ToleranceError("span would exceed the ambient dimension")
            return SpanTest.IN_SPAN
        status = _backend.gs_extend(self._store, self._count, v, self.tol)
        if status < 0:
            raise ToleranceError("span would exceed the ambient dimension")
        if status:
            self._count += 1
            return SpanTest.EXTENDED
        return SpanTest.IN_SPAN


def project_onto_span(tracker: OrthonormalBasisTracker, v) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the tracker's span (zero when empty)."""
    return tracker.project(v)


def try_extend(tracker: OrthonormalBasisTracker, v) -> SpanTest:
    return tracker.try_extend(v)


def rank(M, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank: the number of columns that extend a running basis."""
    M = as_matrix(M)
    return int(_backend.column_rank(np.ascontiguousarray(M.T), tol))


def find_independent_rows(M, r: int, tol: float = DEFAULT_TOL) -> tuple[int, ...]:
    """Indices of the first ``r`` rows (in index order) that are linearly independent.

    Raises
    ------
    RankDeficiencyError
        When fewer than ``r`` independent rows exist.
    """
    M = as_matrix(M)
    if r == 0:
        return ()
    tracker = OrthonormalBasisTracker(M.shape[1], tol, capacity=r)
    picked = []
    for i in range(M.shape[0]):
        if tracker.try_extend(M[i]) is SpanTest.EXTENDED:
            picked.append(i)
            if len(picked) == r:
                return tuple(picked)
    raise RankDeficiencyError(f"found only {len(picked)} independent rows, needed {r}")


class SquareSolver:
    """LU factorisation (partial pivoting) of a nonsingular square matrix, reusable across right-hand sides."""

    def __init__(self, B, tol: float = DEFAULT_TOL):
        B = as_matrix(B, "B")
        if B.shape[0] != B.shape[1]:
            raise DimensionError(f"expected a square matrix, got {B.shape}")
        self.shape = B.shape
        scale = np.max(np.abs(B))
        if scale == 0.0:
            raise SingularMatrixError("zero matrix")
        with warnings.catch_warnings():
            # singularity is reported below with our own tolerance
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            self._lu, self._piv = sla.lu_factor(B, check_finite=False)
        pivots = np.abs(np.diag(self._lu))
        if np.min(pivots) <= tol * scale:
            raise SingularMatrixError(
                f"pivot {np.min(pivots):.3e} below tolerance relative to max entry {scale:.3e}"
            )

    def solve(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if y.shape[0] != self.shape[0]:
            raise DimensionError(f"right-hand side has {y.shape[0]} rows, expected {self.shape[0]}")
        return sla.lu_solve((self._lu, self._piv), y, check_finite=False)


def solve_square(B, y, tol: float = DEFAULT_TOL) -> np.ndarray:
    return SquareSolver(B, tol).solve(y)


# -- matrix text format -----------------------------------------------------

def _lines(src: str | os.PathLike | TextIO) -> Iterable[str]:
    if hasattr(src, "read"):
        yield from src
    else:
        with open(src, encoding="utf-8") as fh:
            yield from fh


def read_matrix(src) -> np.ndarray:
    """Parse the ``m n`` header + rows text format; ``#`` lines are comments."""
    rows = []
    header = None
    for raw in _lines(src):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"bad header line: {line!r}")
            header = (int(parts[0]), int(parts[1]))
            continue
        rows.append([float(tok) for tok in line.split()])
    if header is None:
        raise ValueError("missing 'm n' header")
    m, n = header
    if len(rows) != m or any(len(row) != n for row in rows):
        raise ValueError(f"expected {m} rows of {n} values")
    return as_matrix(np.array(rows, dtype=np.float64).reshape(m, n))


def write_matrix(dst, A, comment: str | None = None) -> None:
    A = as_matrix(A)
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    buf.write(f"{A.shape[0]} {A.shape[1]}\n")
    for row in A:
        buf.write(" ".join(f"{x:.17g}" for x in row))
        buf.write("\n")
    if hasattr(dst, "write"):
        dst.write(buf.getvalue())
    else:
        with open(dst, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
