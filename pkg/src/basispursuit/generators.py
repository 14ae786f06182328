"""Constructors for the structured and random matrix families.

Each family has a known (rank, column stability) pair, which makes them the
ground truth for both the stability oracle and the reconstruction runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .linalg import as_matrix
from .rng import make_rng

FAMILIES = (
    "first-row",
    "rank-two-odd",
    "cauchy",
    "generic",
    "random-orthogonal",
    "stable-coherent",
)


def gen_first_row(m: int, n: int, a=None) -> np.ndarray:
    """``m x n`` matrix whose first row is ``a`` and every other entry zero.

    Rank one and (n-1)-stable provided ``a`` has no zero entry.  ``a``
    defaults to ``(1, 2, ..., n)``.
    """
    a = np.arange(1.0, n + 1) if a is None else np.asarray(a, dtype=float)
    if a.shape != (n,):
        raise ValueError(f"a must have length n={n}")
    if np.any(a == 0):
        raise ValueError("a must have no zero entry")
    A = np.zeros((m, n))
    A[0] = a
    return as_matrix(A)


def gen_rank_two_odd(n: int) -> np.ndarray:
    """Row 0 all ones, rows 1..n-1 equal to ``(-(n-1)/2, ..., (n-1)/2)``."""
    if n < 3 or n % 2 == 0:
        raise ValueError("n must be an odd integer >= 3")
    half = (n - 1) // 2
    u = np.arange(-half, half + 1, dtype=float)
    A = np.tile(u, (n, 1))
    A[0] = 1.0
    return as_matrix(A)


def gen_cauchy(u, v) -> np.ndarray:
    """Cauchy matrix ``A[i, j] = 1 / (u[i] + v[j])``; rank m and (n-m)-stable."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.size < 1 or v.size < u.size:
        raise ValueError("need 1 <= len(u) <= len(v)")
    if np.unique(u).size != u.size or np.unique(v).size != v.size:
        raise ValueError("u and v entries must be distinct")
    denom = u[:, None] + v[None, :]
    if np.any(denom == 0):
        raise ValueError("u[i] + v[j] must be nonzero")
    return as_matrix(1.0 / denom)


def gen_generic(m: int, n: int, r: int, seed=None) -> np.ndarray:
    """``Q @ R`` with standard normal ``Q`` (m x r) and ``R`` (r x n)."""
    if not 1 <= r <= min(m, n):
        raise ValueError("need 1 <= r <= min(m, n)")
    rng = make_rng(seed)
    Q = rng.standard_normal((m, r))
    R = rng.standard_normal((r, n))
    return as_matrix(Q @ R)


def haar_orthogonal(n: int, rng) -> np.ndarray:
    """Haar-distributed ``n x n`` orthogonal matrix.

    QR of a standard normal matrix, with the signs of ``diag(R)`` folded into
    ``Q`` so the distribution is exactly Haar.
    """
    rng = make_rng(rng)
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


def gen_random_orthogonal_model(m: int, n: int, r: int, singular_values=None, seed=None) -> np.ndarray:
    """``U_r diag(s) V_r^T`` with Haar ``U`` (m x m) and ``V`` (n x n).

    ``singular_values`` defaults to ``(r, r-1, ..., 1)``.
    """
    if not 1 <= r <= min(m, n):
        raise ValueError("need 1 <= r <= min(m, n)")
    s = np.arange(r, 0, -1, dtype=float) if singular_values is None else np.asarray(singular_values, dtype=float)
    if s.shape != (r,):
        raise ValueError(f"need exactly r={r} singular values")
    if np.any(s == 0):
        raise ValueError("singular values must be nonzero")
    rng = make_rng(seed)
    V = haar_orthogonal(n, rng)
    U = haar_orthogonal(m, rng)
    return as_matrix((U[:, :r] * s) @ V[:, :r].T)


def stable_coherent_vector(n: int, k: int, epsilon: float) -> np.ndarray:
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n-1")
    if not 0 < epsilon < 0.5:
        raise ValueError("need 0 < epsilon < 1/2")
    u = np.zeros(n)
    u[0] = np.sqrt(1 - epsilon)
    u[1 : k + 1] = np.sqrt(epsilon / k)
    return u


def gen_stable_coherent(n: int, k: int, epsilon: float) -> np.ndarray:
    """``u u^T`` for a unit ``u`` with k+1 nonzeros: k-stable yet coherence (1-eps) n."""
    u = stable_coherent_vector(n, k, epsilon)
    return as_matrix(np.outer(u, u))


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one matrix; ``generate`` is deterministic in all fields."""

    family: str
    m: int
    n: int
    r: int | None = None
    params: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.m < 1 or self.n < 1:
            raise ValueError("dimensions must be positive")
        if self.r is not None and not 0 <= self.r <= min(self.m, self.n):
            raise ValueError("rank must lie in [0, min(m, n)]")

    @property
    def rank(self) -> int:
        """Rank the family produces (by construction)."""
        if self.family in ("first-row", "stable-coherent"):
            return 1
        if self.family == "rank-two-odd":
            return 2
        if self.family == "cauchy":
            return self.m
        return int(self.r)

    @property
    def stability(self) -> int:
        """Column stability the family is known to have."""
        if self.family == "first-row":
            return self.n - 1
        if self.family == "rank-two-odd":
            return self.n - 2
        if self.family == "cauchy":
            return self.n - self.m
        if self.family == "stable-coherent":
            return int(self.params["k"])
        return self.n - int(self.r)

    def replace_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(self.family, self.m, self.n, self.r, dict(self.params), seed)

    def to_dict(self) -> dict:
        params = {k: (list(v) if isinstance(v, (list, tuple, np.ndarray)) else v) for k, v in self.params.items()}
        return {"family": self.family, "m": self.m, "n": self.n, "r": self.r, "params": params, "seed": self.seed}


def generate(spec: GeneratorSpec) -> np.ndarray:
    p = spec.params
    if spec.family == "first-row":
        return gen_first_row(spec.m, spec.n, p.get("a"))
    if spec.family == "rank-two-odd":
        if spec.m != spec.n:
            raise ValueError("rank-two-odd matrices are square")
        return gen_rank_two_odd(spec.n)
    if spec.family == "cauchy":
        u = p.get("u", np.arange(1.0, spec.m + 1))
        v = p.get("v", np.arange(1.0, spec.n + 1) + spec.m)
        if len(u) != spec.m or len(v) != spec.n:
            raise ValueError("len(u), len(v) must equal m, n")
        return gen_cauchy(u, v)
    if spec.family == "generic":
        return gen_generic(spec.m, spec.n, spec.r, spec.seed)
    if spec.family == "random-orthogonal":
        return gen_random_orthogonal_model(spec.m, spec.n, spec.r, p.get("singular_values"), spec.seed)
    if spec.m != spec.n:
        raise ValueError("stable-coherent matrices are square")
    return gen_stable_coherent(spec.n, int(p["k"]), float(p.get("epsilon", 0.25)))
