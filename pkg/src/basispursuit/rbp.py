"""Randomized basis pursuit (rank known).

Columns are drawn uniformly from the candidate set until ``rank`` of them
are linearly independent; then ``rank`` independent rows of those columns
are located, those rows are read in full, and every other column is
rebuilt as a combination of the basis columns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RankMismatchError
from .linalg import DEFAULT_TOL, OrthonormalBasisTracker, SpanTest, SquareSolver, find_independent_rows
from .oracle import EntryOracle
from .rng import make_rng


@dataclass
class ReconstructionResult:
    """Reconstruction plus the audit trail of what was looked at."""

    matrix: np.ndarray
    basis_cols: tuple[int, ...]
    pivot_rows: tuple[int, ...]
    inspected: np.ndarray
    draws: int
    success: bool
    algorithm: str = "rbp"
    epoch_draws: list[int] = field(default_factory=list)
    distinct_columns: int = 0
    all_columns_examined: bool = False
    spot_check_row: int | None = None
    info: dict = field(default_factory=dict)

    @property
    def entries_inspected(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in zip(*np.nonzero(self.inspected))}

    @property
    def entries_inspected_count(self) -> int:
        return int(self.inspected.sum())

    @property
    def basis_count(self) -> int:
        return len(self.basis_cols)

    def audit(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "draws": self.draws,
            "entries_inspected_count": self.entries_inspected_count,
            "distinct_columns": self.distinct_columns,
            "basis_cols": list(self.basis_cols),
            "pivot_rows": list(self.pivot_rows),
            "epoch_draws": list(self.epoch_draws),
            "all_columns_examined": self.all_columns_examined,
            "spot_check_row": self.spot_check_row,
            "success": self.success,
        }
        out.update(self.info)
        return out


@dataclass(frozen=True)
class RbpConfig:
    """Parameters for :func:`rbp_reconstruct`.

    ``cap_k`` switches on the deterministic draw cap for a claimed
    stability ``k``; ``prune_spanned`` drops a column from the candidate
    set once it is found to be spanned (faster, but not the variant the
    sampling bound is proved for).
    """

    rank: int
    delta: float = 0.01
    cap_k: int | None = None
    seed: int | None = None
    tol: float = DEFAULT_TOL
    prune_spanned: bool = False
    spot_check: bool = True
    verify_tol: float = 1e-6

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.cap_k is not None and self.cap_k < 0:
            raise ValueError("cap_k must be nonnegative")


def rbp_sampling_bound(m: int, n: int, r: int, k: int, delta: float) -> float:
    """Entry count that RBP exceeds with probability at most ``r * delta``."""
    if not 0 <= k <= n - r:
        raise ValueError("need 0 <= k <= n - r")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return n * r + m * n * r * (1.0 + math.log(1.0 / delta)) / (k + 1)


def draw_cap(n: int, r: int, k: int, delta: float) -> int:
    """Deterministic Step-2b budget ``ceil(n r (1 + ln(1/delta)) / (k + 1))``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return math.ceil(n * r * (1.0 + math.log(1.0 / delta)) / (k + 1))


def geometric_tail(p: float, delta: float) -> float:
    """Upper bound ``exp(-delta)`` on ``P(X > (1 + delta) / p)`` for X ~ Geometric(p)."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if delta <= 0:
        raise ValueError("delta must be positive")
    return math.exp(-delta)


def simulate_geometric_tail(p: float, delta: float, draws: int, seed=None) -> float:
    """Empirical ``P(X > (1 + delta) / p)`` with X on {1, 2, ...}."""
    rng = make_rng(seed)
    x = rng.geometric(p, size=draws)
    return float(np.mean(x > (1.0 + delta) / p))


class _Candidates:
    """Index set supporting O(1) uniform draws and removals."""

    def __init__(self, n):
        self.items = list(range(n))
        self.pos = {j: j for j in range(n)}

    def __len__(self):
        return len(self.items)

    def draw(self, rng) -> int:
        return self.items[int(rng.integers(len(self.items)))]

    def remove(self, j):
        p = self.pos.pop(j)
        last = self.items.pop()
        if last != j:
            self.items[p] = last
            self.pos[last] = p


def _finish(oracle: EntryOracle, cols: dict, basis: list, tol: float):
    """Row identification and reconstruction; returns (matrix, pivot_rows)."""
    m, n = oracle.shape
    out = np.zeros((m, n))
    r = len(basis)
    if r == 0:
        for j, c in cols.items():
            out[:, j] = c
        return out, ()
    A_S = np.column_stack([cols[j] for j in basis])
    pivots = find_independent_rows(A_S, r, tol)
    rows = np.vstack([oracle.row(i) for i in pivots])
    solver = SquareSolver(A_S[list(pivots)], tol)
    others = np.setdiff1d(np.arange(n), basis, assume_unique=True)
    if others.size:
        coeffs = solver.solve(rows[:, others])
        out[:, others] = A_S @ coeffs
    out[:, basis] = A_S
    # inspected entries are copied verbatim, not recomputed
    for j, c in cols.items():
        out[:, j] = c
    out[list(pivots), :] = rows
    return out, pivots


def _direct(oracle: EntryOracle, cols: dict) -> np.ndarray:
    out = np.empty(oracle.shape)
    for j, c in cols.items():
        out[:, j] = c
    return out


def rbp_reconstruct(oracle: EntryOracle, cfg: RbpConfig) -> ReconstructionResult:
    """Run randomized basis pursuit against ``oracle``.

    Raises
    ------
    RankMismatchError
        ``cfg.rank`` disagrees with the data: every remaining candidate is
        already spanned (rank too high) or the spot-check row does not match
        the reconstruction (rank too low).  ``err.result`` holds the audit.
    """
    rng = make_rng(cfg.seed)
    m, n = oracle.shape
    r = cfg.rank
    if r > min(m, n):
        raise ValueError("rank exceeds min(m, n)")
    cap = draw_cap(n, r, cfg.cap_k, cfg.delta) if cfg.cap_k is not None else None

    tracker = OrthonormalBasisTracker(m, cfg.tol, capacity=max(r, 1))
    cand = _Candidates(n)
    basis: list[int] = []
    cols: dict[int, np.ndarray] = {}
    spanned: set[int] = set()
    epoch_draws = [0] * r
    draws = 0
    capped = stalled = exhausted = False

    while len(basis) < r:
        if len(cand) == 0:
            exhausted = True
            break
        if cap is not None and draws >= cap:
            capped = True
            break
        if len(spanned) == len(cand):
            stalled = True
            break
        j = cand.draw(rng)
        draws += 1
        epoch_draws[len(basis)] += 1
        if j in spanned:
            continue
        if j not in cols:
            cols[j] = oracle.column(j)
        if tracker.try_extend(cols[j]) is SpanTest.EXTENDED:
            basis.append(j)
            cand.remove(j)
        elif cfg.prune_spanned:
            cand.remove(j)
        else:
            spanned.add(j)

    def result(matrix, pivots, success, spot=None):
        return ReconstructionResult(
            matrix=matrix,
            basis_cols=tuple(basis),
            pivot_rows=tuple(pivots),
            inspected=oracle.inspected.copy(),
            draws=draws,
            success=success,
            algorithm="rbp",
            epoch_draws=epoch_draws[: len(basis) + (0 if len(basis) == r else 1)],
            distinct_columns=len(cols),
            all_columns_examined=exhausted,
            spot_check_row=spot,
            info={"draw_cap": cap},
        )

    if capped:
        return result(np.zeros((m, n)), (), False)
    if stalled:
        raise RankMismatchError(
            f"all {len(cand)} remaining candidates lie in the span of {len(basis)} basis columns; "
            f"rank {r} is too high",
            result(np.zeros((m, n)), (), False),
        )
    if exhausted:
        res = result(_direct(oracle, cols), (), True)
        if len(basis) < r:
            res.success = False
            raise RankMismatchError(f"every column examined but only {len(basis)} are independent", res)
        return res

    matrix, pivots = _finish(oracle, cols, basis, cfg.tol)
    spot = None
    if cfg.spot_check and m > len(pivots):
        free = np.setdiff1d(np.arange(m), pivots)
        spot = int(free[rng.integers(free.size)])
        truth = oracle.spot_check_row(spot)
        if np.linalg.norm(matrix[spot] - truth) > cfg.verify_tol * max(1.0, np.linalg.norm(truth)):
            raise RankMismatchError(
                f"spot-check row {spot} disagrees with the reconstruction; rank {r} is too low",
                result(matrix, pivots, False, spot),
            )
    return result(matrix, pivots, True, spot)
