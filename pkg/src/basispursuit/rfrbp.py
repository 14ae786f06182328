"""Rank-free randomized basis pursuit.

Same column pursuit as :mod:`basispursuit.rbp` but with no rank input: the
search stops once ``lam`` consecutive draws land in the current span.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, OrthonormalBasisTracker, SpanTest
from .oracle import EntryOracle
from .rbp import ReconstructionResult, _Candidates, _direct, _finish
from .rng import make_rng


@dataclass(frozen=True)
class RfRbpConfig:
    lam: int
    seed: int | None = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if int(self.lam) != self.lam or self.lam < 1:
            raise ValueError("stopping threshold must be an integer >= 1")


def compute_lambda(m: int, n: int, k0: int, delta: float) -> int:
    """Stopping threshold ``ceil(log(delta / min(m, n)) / log(1 - (k0 + 1) / n))``.

    When ``k0 + 1 == n`` the denominator is ``log 0``; the quotient tends
    to 0 and we return the smallest legal threshold, 1.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not 0 <= k0 <= n - 1:
        raise ValueError("need 0 <= k0 <= n - 1")
    if k0 + 1 == n:
        return 1
    lam = math.log(delta / min(m, n)) / math.log1p(-(k0 + 1) / n)
    return max(1, math.ceil(lam))


def success_probability_lower_bound(n: int, k: int, r: int, lam: int) -> float:
    """``prod_{i=1..r} [1 - (1 - (k+1)/(n-i+1))^lam]``: chance all r basis columns are found."""
    if r < 0 or k < 0 or k + r > n:
        raise ValueError("need k, r >= 0 and k + r <= n")
    if lam < 1:
        raise ValueError("lam must be >= 1")
    prob = 1.0
    for i in range(1, r + 1):
        prob *= 1.0 - (1.0 - (k + 1) / (n - i + 1)) ** lam
    return prob


def rfrbp_reconstruct(oracle: EntryOracle, cfg: RfRbpConfig) -> ReconstructionResult:
    """Run rank-free basis pursuit against ``oracle``.

    The algorithm cannot tell a premature stop from a complete one; the
    caller judges exactness.  ``success`` here only means it terminated.
    """
    rng = make_rng(cfg.seed)
    m, n = oracle.shape
    lam = int(cfg.lam)
    tracker = OrthonormalBasisTracker(m, cfg.tol, capacity=min(m, n))
    cand = _Candidates(n)
    basis: list[int] = []
    cols: dict[int, np.ndarray] = {}
    spanned: set[int] = set()
    epoch_draws: list[int] = []
    draws = 0
    miss_max = 0
    exhausted = False

    while True:
        if len(cand) == 0:
            exhausted = True
            break
        misses = 0
        epoch_draws.append(0)
        found = False
        while misses < lam:
            j = cand.draw(rng)
            draws += 1
            epoch_draws[-1] += 1
            if j not in spanned:
                if j not in cols:
                    cols[j] = oracle.column(j)
                if tracker.try_extend(cols[j]) is SpanTest.EXTENDED:
                    basis.append(j)
                    cand.remove(j)
                    found = True
                    break
                spanned.add(j)
            misses += 1
            miss_max = max(miss_max, misses)
        if not found:
            break

    if exhausted:
        matrix, pivots = _direct(oracle, cols), ()
    else:
        matrix, pivots = _finish(oracle, cols, basis, cfg.tol)
    return ReconstructionResult(
        matrix=matrix,
        basis_cols=tuple(basis),
        pivot_rows=tuple(pivots),
        inspected=oracle.inspected.copy(),
        draws=draws,
        success=True,
        algorithm="rfrbp",
        epoch_draws=epoch_draws,
        distinct_columns=len(cols),
        all_columns_examined=exhausted,
        info={
            "lambda": lam,
            "basis_count": len(basis),
            "consecutive_miss_max": miss_max,
        },
    )
