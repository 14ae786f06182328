"""Experiment harness: seeded Monte Carlo trials, counting arguments and an SVD oracle.

Nothing here is used by the reconstruction algorithms themselves; it holds
the ground truth they are checked against.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .errors import BasisPursuitError
from .generators import GeneratorSpec, generate
from .linalg import as_matrix
from .oracle import EntryOracle
from .rbp import RbpConfig, rbp_reconstruct, rbp_sampling_bound
from .rfrbp import RfRbpConfig, compute_lambda, rfrbp_reconstruct
from .rng import ALGORITHM, make_rng, split_seeds

VERIFY_TOL = 1e-8


def degrees_of_freedom(m: int, n: int, r: int) -> int:
    """Parameter count ``r (m + n - r)`` of a rank-r m x n matrix."""
    if m < 1 or n < 1 or not 0 <= r <= min(m, n):
        raise ValueError("need m, n >= 1 and 0 <= r <= min(m, n)")
    return r * (m + n - r)


def binomial_slack(p: float, trials: int, z: float = 3.0) -> float:
    """``z`` standard errors of a Bernoulli(p) frequency over ``trials`` draws."""
    return z * math.sqrt(max(p * (1.0 - p), 0.0) / trials)


# -- entry-wise uniform sampling -------------------------------------------

def uniform_sampling_bound(m: int, n: int, l: int) -> float:
    return (l / (m * n)) ** n


def uniform_sampling_exact_rate(m: int, n: int, l: int) -> Fraction:
    """``C(mn - n, l - n) / C(mn, l)``: chance l uniform entries cover a fixed row."""
    if l < n:
        return Fraction(0)
    return Fraction(comb(m * n - n, l - n), comb(m * n, l))


def enumerate_uniform_sampling(m: int, n: int, l: int) -> Fraction:
    """Exact coverage rate by listing every l-subset of the m*n positions."""
    first_row = set(range(n))
    hits = total = 0
    for subset in combinations(range(m * n), l):
        total += 1
        hits += first_row.issubset(subset)
    return Fraction(hits, total)


@dataclass(frozen=True)
class UniformSamplingDemo:
    m: int
    n: int
    l: int
    trials: int
    empirical_success_rate: float
    paper_bound: float
    exact_rate: float
    note: str = ""


def uniform_sampling_failure_demo(m: int, n: int, l: int, trials: int, seed=None,
                                  chunk: int = 20000) -> UniformSamplingDemo:
    """Sample l distinct positions per trial and count how often row 0 is fully covered."""
    if not 0 <= l <= m * n:
        raise ValueError("need 0 <= l <= m n")
    bound = uniform_sampling_bound(m, n, l)
    exact = float(uniform_sampling_exact_rate(m, n, l))
    if l < n:
        return UniformSamplingDemo(m, n, l, trials, 0.0, bound, exact,
                                   note="l < n: the first row can never be covered")
    rng = make_rng(seed)
    hits = 0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        # rank of each position in a random permutation; the first l are sampled
        order = np.argsort(rng.random((b, m * n)), axis=1)
        ranks = np.argsort(order, axis=1)
        hits += int(np.all(ranks[:, :n] < l, axis=1).sum())
        done += b
    return UniformSamplingDemo(m, n, l, trials, hits / trials, bound, exact)


# -- SVD oracle -------------------------------------------------------------

@dataclass(frozen=True)
class SVDResult:
    singular_values: np.ndarray
    left: np.ndarray
    right: np.ndarray
    sweeps: int


def svd_oracle(M, tol: float = 1e-12, max_sweeps: int = 60) -> SVDResult:
    """One-sided Jacobi SVD, independent of LAPACK.

    Returns ``left (m x p)``, ``singular_values (p,)`` and ``right (n x p)``
    with ``p = min(m, n)`` and ``M = left @ diag(s) @ right.T``.
    """
    M = as_matrix(M)
    transposed = M.shape[0] < M.shape[1]
    W = (M.T if transposed else M).copy()
    p = W.shape[1]
    V = np.eye(p)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        rotated = False
        for i in range(p - 1):
            for j in range(i + 1, p):
                a = W[:, i] @ W[:, i]
                b = W[:, j] @ W[:, j]
                g = W[:, i] @ W[:, j]
                if abs(g) <= tol * math.sqrt(a * b) or g == 0.0:
                    continue
                rotated = True
                zeta = (b - a) / (2.0 * g)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                wi, wj = W[:, i].copy(), W[:, j].copy()
                W[:, i] = c * wi - s * wj
                W[:, j] = s * wi + c * wj
                vi, vj = V[:, i].copy(), V[:, j].copy()
                V[:, i] = c * vi - s * vj
                V[:, j] = s * vi + c * vj
        if not rotated:
            break
    else:
        raise BasisPursuitError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")
    sv = np.sqrt(np.einsum("ij,ij->j", W, W))
    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    W = W[:, order]
    V = V[:, order]
    U = np.zeros_like(W)
    nz = sv > 0
    U[:, nz] = W[:, nz] / sv[nz]
    if transposed:
        U, V = V, U
    return SVDResult(singular_values=sv, left=U, right=V, sweeps=sweeps)


# -- experiments ------------------------------------------------------------

@dataclass
class TrialRecord:
    index: int
    seed: int
    entries_inspected: int
    draws: int
    success: bool
    wall_time: float
    basis_count: int = 0
    distinct_columns: int = 0
    rel_error: float | None = None
    inspected_exact: bool | None = None
    oracle_gate: bool | None = None
    exceeds_bound: bool = False
    error: str | None = None


@dataclass
class ExperimentStats:
    algorithm: str
    spec: dict
    config: dict
    master_seed: int
    trials: int
    per_trial: list[TrialRecord]
    aggregate: dict = field(default_factory=dict)
    rng_algorithm: str = ALGORITHM

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentStats":
        d = dict(d)
        d["per_trial"] = [TrialRecord(**t) for t in d["per_trial"]]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentStats":
        return cls.from_dict(json.loads(text))


def _resolve_config(spec: GeneratorSpec, algo: str, cfg: dict) -> dict:
    cfg = dict(cfg)
    r = cfg.setdefault("rank", spec.rank)
    cfg.setdefault("delta", 0.01)
    if algo == "rbp":
        cfg.setdefault("k", spec.stability)
        cfg["bound"] = rbp_sampling_bound(spec.m, spec.n, r, cfg["k"], cfg["delta"])
    elif algo == "rfrbp":
        if "lam" not in cfg:
            cfg.setdefault("k0", spec.stability)
            cfg["lam"] = compute_lambda(spec.m, spec.n, cfg["k0"], cfg["delta"])
        cfg["bound"] = spec.n * r + spec.m * (r + 1) * cfg["lam"]
        cfg["draw_bound"] = (r + 1) * cfg["lam"]
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    return cfg


def run_trial(spec: GeneratorSpec, algo: str, cfg: dict, index: int, seed: int,
              verify_tol: float = VERIFY_TOL) -> TrialRecord:
    """One seeded trial; replaying with the same ``seed`` gives identical counts."""
    gen_seed, algo_seed = split_seeds(seed, 2)
    t0 = time.perf_counter()
    try:
        A = generate(spec.replace_seed(gen_seed))
        oracle = EntryOracle(A)
        if algo == "rbp":
            res = rbp_reconstruct(oracle, RbpConfig(
                rank=cfg["rank"], delta=cfg["delta"], cap_k=cfg.get("cap_k"), seed=algo_seed,
                prune_spanned=cfg.get("prune_spanned", False),
            ))
        else:
            res = rfrbp_reconstruct(oracle, RfRbpConfig(lam=cfg["lam"], seed=algo_seed))
    except (BasisPursuitError, ValueError) as exc:
        return TrialRecord(index, seed, 0, 0, False, time.perf_counter() - t0,
                           error=f"{type(exc).__name__}: {exc}")
    wall = time.perf_counter() - t0
    scale = np.linalg.norm(A)
    rel = float(np.linalg.norm(res.matrix - A) / scale) if scale > 0 else float(np.linalg.norm(res.matrix))
    exact = bool(np.array_equal(res.matrix[res.inspected], A[res.inspected]))
    gate = bool(np.array_equal(oracle.inspected, res.inspected))
    count = res.entries_inspected_count
    return TrialRecord(
        index=index,
        seed=seed,
        entries_inspected=count,
        draws=res.draws,
        success=bool(res.success and rel <= verify_tol and exact),
        wall_time=wall,
        basis_count=res.basis_count,
        distinct_columns=res.distinct_columns,
        rel_error=rel,
        inspected_exact=exact,
        oracle_gate=gate,
        exceeds_bound=count > cfg["bound"],
    )


def _run_one(args):
    return run_trial(*args)


def run_experiment(spec: GeneratorSpec, algo: str, algo_cfg: dict | None, trials: int,
                   master_seed: int, workers: int = 1,
                   verify_tol: float = VERIFY_TOL) -> ExperimentStats:
    """Run ``trials`` seeded reconstructions of fresh matrices drawn from ``spec``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = _resolve_config(spec, algo, algo_cfg or {})
    seeds = split_seeds(master_seed, trials)
    jobs = [(spec, algo, cfg, i, s, verify_tol) for i, s in enumerate(seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        records = [_run_one(job) for job in jobs]

    entries = np.array([t.entries_inspected for t in records], dtype=float)
    successes = sum(t.success for t in records)
    aggregate = {
        "success_rate": successes / trials,
        "mean_entries": float(entries.mean()),
        "p95_entries": float(np.percentile(entries, 95)),
        "max_draws": max(t.draws for t in records),
        "bound_value": cfg["bound"],
        "bound_violation_rate": sum(t.exceeds_bound for t in records) / trials,
        "degrees_of_freedom": degrees_of_freedom(spec.m, spec.n, cfg["rank"]),
        "errors": sum(t.error is not None for t in records),
    }
    if "draw_bound" in cfg:
        aggregate["draw_bound"] = cfg["draw_bound"]
    return ExperimentStats(
        algorithm=algo,
        spec=spec.to_dict(),
        config=cfg,
        master_seed=master_seed,
        trials=trials,
        per_trial=records,
        aggregate=aggregate,
    )
