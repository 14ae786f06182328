"""Column/row k-stability and subspace coherence.

A rank-r matrix is (column) k-stable when deleting any k columns keeps the
rank at r while some k+1 columns cannot be deleted without losing rank.
The exhaustive routine is the ground-truth oracle for small n; the
certified routine is a one-sided random spot check for larger n.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import RankDeficiencyError
from .linalg import DEFAULT_TOL, OrthonormalBasisTracker, as_matrix, rank
from .rng import make_rng

EXHAUSTIVE_CAP = 16


@dataclass(frozen=True)
class StabilityReport:
    rank: int
    k: int
    witness: tuple[int, ...] | None
    method: str = "exhaustive"
    axis: str = "column"

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "k": self.k,
            "method": self.method,
            "axis": self.axis,
            "witness": list(self.witness) if self.witness is not None else None,
        }


@dataclass(frozen=True)
class Certification:
    """Outcome of a randomized stability spot check.

    ``certified=False`` is a proof (``witness`` drops the rank);
    ``certified=True`` is only evidence.
    """

    certified: bool
    rank: int
    k_claim: int
    trials: int
    witness: tuple[int, ...] | None = None
    method: str = "certified"

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "k": self.k_claim,
            "method": self.method,
            "certified": self.certified,
            "trials": self.trials,
            "witness": list(self.witness) if self.witness is not None else None,
        }


@dataclass(frozen=True)
class CoherenceValue:
    mu: float
    subspace_dim: int
    ambient_dim: int


def _columns(A) -> np.ndarray:
    return np.ascontiguousarray(as_matrix(A).T)


def stability_index_exhaustive(A, tol: float = DEFAULT_TOL, cap: int = EXHAUSTIVE_CAP) -> StabilityReport:
    """Exact column stability by enumerating removal sets.

    Sets are tried by increasing size and lexicographically within a size;
    the first one that lowers the rank is the witness and fixes ``k`` as its
    size minus one.  No witness is reported when ``k = n - r`` (any r-1
    surviving columns trivially lose rank).
    """
    cols = _columns(A)
    n = cols.shape[0]
    if n > cap:
        raise ValueError(
            f"n={n} exceeds the exhaustive cap {cap}; use stability_index_certified instead"
        )
    r = int(_backend.column_rank(cols, tol))
    if r == 0:
        return StabilityReport(rank=0, k=n, witness=None)
    witness = _backend.first_rank_drop(cols, r, tol, n - r + 1)
    if witness is None:
        raise AssertionError("removing n-r+1 columns must drop the rank")
    k = len(witness) - 1
    return StabilityReport(rank=r, k=k, witness=None if k == n - r else tuple(witness))


def row_stability_index_exhaustive(A, tol: float = DEFAULT_TOL, cap: int = EXHAUSTIVE_CAP) -> StabilityReport:
    rep = stability_index_exhaustive(as_matrix(A).T, tol, cap)
    return StabilityReport(rep.rank, rep.k, rep.witness, rep.method, axis="row")


def stability_index_certified(A, k_claim: int, trials: int, seed=None, tol: float = DEFAULT_TOL) -> Certification:
    """Delete ``k_claim`` uniformly random columns ``trials`` times and watch the rank.

    A claim above ``n - rank`` is refuted by the first trial, since fewer
    than ``rank`` columns survive.
    """
    cols = _columns(A)
    n = cols.shape[0]
    r = int(_backend.column_rank(cols, tol))
    if not 0 <= k_claim <= n:
        raise ValueError(f"k_claim must lie in [0, n] = [0, {n}]")
    if k_claim == 0 or r == 0 or trials <= 0:
        return Certification(True, r, k_claim, max(trials, 0))
    rng = make_rng(seed)
    removals = np.empty((trials, k_claim), dtype=np.intp)
    for t in range(trials):
        removals[t] = np.sort(rng.choice(n, size=k_claim, replace=False))
    hit = _backend.first_refuting_removal(cols, r, tol, removals)
    if hit < 0:
        return Certification(True, r, k_claim, trials)
    return Certification(False, r, k_claim, int(hit) + 1, tuple(int(j) for j in removals[hit]))


def orthonormal_columns(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of ``M``'s independent columns."""
    M = as_matrix(M)
    tracker = OrthonormalBasisTracker(M.shape[0], tol, capacity=min(M.shape))
    for j in range(M.shape[1]):
        tracker.try_extend(M[:, j])
    return np.array(tracker.basis).T


def coherence_of_orthonormal(U, tol: float = 1e-8) -> CoherenceValue:
    """``(n / r) * max_i ||U[i]||^2`` for ``U`` with orthonormal columns."""
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    U = as_matrix(U, "U")
    n, r = U.shape
    gram = U.T @ U
    if np.max(np.abs(gram - np.eye(r))) > tol:
        raise ValueError("columns of U are not orthonormal")
    mu = (n / r) * float(np.max(np.einsum("ij,ij->i", U, U)))
    return CoherenceValue(mu=mu, subspace_dim=r, ambient_dim=n)


def coherence_of_subspace(M, tol: float = DEFAULT_TOL) -> CoherenceValue:
    """Coherence of the column space of a full-column-rank ``M``."""
    M = as_matrix(M)
    Q = orthonormal_columns(M, tol)
    if Q.shape[1] != M.shape[1]:
        raise RankDeficiencyError(f"M has rank {Q.shape[1]} < {M.shape[1]} columns")
    return coherence_of_orthonormal(Q)


def right_coherence(A, tol: float = DEFAULT_TOL) -> CoherenceValue:
    """Coherence of the row space of ``A`` (the span of V in A = U S V^T)."""
    Q = orthonormal_columns(as_matrix(A).T, tol)
    if Q.shape[1] == 0:
        raise RankDeficiencyError("zero matrix has no row space")
    return coherence_of_orthonormal(Q)


@dataclass(frozen=True)
class CoherenceStabilityCheck:
    applicable: bool
    holds: bool | None
    k: int
    rank: int
    mu_v: float | None
    observed_s: int | None

    @property
    def status(self) -> str:
        if not self.applicable:
            return "NotApplicable"
        return "BoundHolds" if self.holds else "BoundViolated"


def check_coherence_implies_stability(A, k: int, tol: float = DEFAULT_TOL,
                                      cap: int = EXHAUSTIVE_CAP) -> CoherenceStabilityCheck:
    """Test "mu(V) < n / (k r)  implies  stability >= k" on one matrix.

    When the coherence hypothesis fails the check is reported as not
    applicable rather than as a failure.
    """
    A = as_matrix(A)
    n = A.shape[1]
    r = rank(A, tol)
    if not 0 <= k <= n - r:
        raise ValueError(f"k must lie in [0, n - rank] = [0, {n - r}]")
    if r == 0:
        return CoherenceStabilityCheck(False, None, k, 0, None, None)
    mu = right_coherence(A, tol).mu
    if mu * k * r >= n:
        return CoherenceStabilityCheck(False, None, k, r, mu, None)
    s = stability_index_exhaustive(A, tol, cap).k
    return CoherenceStabilityCheck(True, s >= k, k, r, mu, s)
