import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from basispursuit.errors import RankDeficiencyError
from basispursuit.generators import gen_cauchy, gen_first_row, gen_random_orthogonal_model, gen_stable_coherent
from basispursuit.linalg import rank
from basispursuit.stability import (
    check_coherence_implies_stability,
    coherence_of_orthonormal,
    coherence_of_subspace,
    row_stability_index_exhaustive,
    stability_index_certified,
    stability_index_exhaustive,
)

from conftest import brute_stability


def sparse_low_rank(rng, m, n, r, density):
    R = rng.standard_normal((r, n)) * (rng.random((r, n)) < density)
    return rng.standard_normal((m, r)) @ R


class TestExhaustive:
    def test_first_row(self):
        rep = stability_index_exhaustive(gen_first_row(2, 3, [1, 2, 3]))
        assert (rep.rank, rep.k, rep.witness) == (1, 2, None)

    def test_identity(self):
        rep = stability_index_exhaustive(np.eye(3))
        assert (rep.rank, rep.k) == (3, 0)

    def test_cauchy(self):
        rep = stability_index_exhaustive(gen_cauchy([1, 2], [3, 4, 5, 6]))
        assert (rep.rank, rep.k) == (2, 2)

    def test_witness_is_first_minimal_set(self):
        # columns 2 and 4 are the only ones with a second-row entry
        A = np.array([[1.0, 1.0, 1.0, 2.0, 0.0], [0.0, 0.0, 3.0, 0.0, 1.0]])
        rep = stability_index_exhaustive(A)
        assert (rep.rank, rep.k, rep.witness) == (2, 1, (2, 4))

    def test_zero_matrix(self):
        rep = stability_index_exhaustive(np.zeros((3, 4)))
        assert (rep.rank, rep.k, rep.witness) == (0, 4, None)

    def test_cap(self):
        with pytest.raises(ValueError, match="certified"):
            stability_index_exhaustive(np.ones((2, 17)))

    def test_rows_vs_columns_differ(self):
        A = gen_first_row(4, 6)
        assert stability_index_exhaustive(A).k == 5
        assert row_stability_index_exhaustive(A).k == 0

    @settings(max_examples=40, deadline=None)
    @given(
        m=st.integers(1, 6),
        n=st.integers(1, 8),
        r=st.integers(1, 4),
        density=st.sampled_from([1.0, 0.7, 0.4]),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_matches_svd_brute_force(self, m, n, r, density, seed):
        rng = np.random.default_rng(seed)
        A = sparse_low_rank(rng, m, n, min(r, m, n), density)
        rep = stability_index_exhaustive(A)
        assert (rep.rank, rep.k) == brute_stability(A)

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(3, 9), r=st.integers(1, 3), seed=st.integers(0, 2**32 - 1))
    def test_definition_consistency(self, n, r, seed):
        rng = np.random.default_rng(seed)
        A = sparse_low_rank(rng, 5, n, min(r, n - 1), 0.5)
        rep = stability_index_exhaustive(A)
        if rep.rank == 0:
            return
        if rep.witness is not None:
            assert len(rep.witness) == rep.k + 1
            keep = [j for j in range(n) if j not in rep.witness]
            assert rank(A[:, keep]) == rep.rank - 1
        for _ in range(1000 if n > 6 else 100):
            removed = rng.choice(n, rep.k, replace=False)
            keep = np.setdiff1d(np.arange(n), removed)
            assert rank(A[:, keep]) == rep.rank


class TestCertified:
    def test_identity_refuted(self):
        assert stability_index_certified(np.eye(5), 0, 10, seed=1).certified
        cert = stability_index_certified(np.eye(5), 1, 10, seed=1)
        assert not cert.certified and len(cert.witness) == 1 and cert.trials == 1
        with pytest.raises(ValueError):
            stability_index_certified(np.eye(5), 6, 10, seed=1)

    def test_refutes_with_witness(self):
        A = np.hstack([np.eye(3), np.eye(3)[:, :1]])  # rank 3, only e1 is duplicated
        cert = stability_index_certified(A, 1, 50, seed=3)
        assert not cert.certified
        keep = [j for j in range(4) if j not in cert.witness]
        assert rank(A[:, keep]) < 3

    def test_first_row_large(self):
        cert = stability_index_certified(gen_first_row(3, 100), 99, 50, seed=0)
        assert cert.certified and cert.trials == 50

    def test_random_orthogonal(self):
        A = gen_random_orthogonal_model(12, 12, 3, seed=5)
        assert stability_index_certified(A, 9, 200, seed=5).certified


class TestCoherence:
    def test_coordinate_subspace(self):
        assert coherence_of_orthonormal(np.eye(4)[:, :2]).mu == pytest.approx(2.0)

    def test_flat_vector(self):
        assert coherence_of_orthonormal(np.full(8, 1 / np.sqrt(8))).mu == pytest.approx(1.0)

    def test_stable_coherent_vector(self):
        n, k, eps = 16, 3, 0.25
        u = np.zeros(n)
        u[0] = np.sqrt(1 - eps)
        u[1 : k + 1] = np.sqrt(eps / k)
        assert coherence_of_orthonormal(u).mu == pytest.approx(12.0, abs=1e-12)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            coherence_of_orthonormal(np.ones((4, 2)))

    def test_scaled_columns(self):
        M = np.zeros((4, 2))
        M[0, 0], M[1, 1] = 3.0, 5.0
        assert coherence_of_subspace(M).mu == pytest.approx(2.0)

    def test_full_space(self, rng):
        assert coherence_of_subspace(rng.standard_normal((5, 5))).mu == pytest.approx(1.0)

    def test_matches_projector(self, rng):
        M = rng.standard_normal((6, 2))
        Q, _ = np.linalg.qr(M)
        P = Q @ Q.T
        brute = 6 / 2 * max(np.linalg.norm(P[:, i]) ** 2 for i in range(6))
        assert coherence_of_subspace(M).mu == pytest.approx(brute, rel=1e-12)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficiencyError):
            coherence_of_subspace(np.ones((4, 2)))

    @settings(max_examples=50, deadline=None)
    @given(n=st.integers(2, 12), r=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
    def test_range_and_basis_independence(self, n, r, seed):
        rng = np.random.default_rng(seed)
        r = min(r, n)
        M = rng.standard_normal((n, r))
        M[rng.random((n, r)) < 0.3] = 0.0
        if rank(M) < r:
            return
        mu = coherence_of_subspace(M).mu
        assert 1 - 1e-9 <= mu <= n / r + 1e-9
        G = rng.standard_normal((r, r)) + 3 * np.eye(r)
        assert coherence_of_subspace(M @ G).mu == pytest.approx(mu, rel=1e-8)


class TestCoherenceImpliesStability:
    def test_random_orthogonal(self):
        checks = [check_coherence_implies_stability(gen_random_orthogonal_model(10, 10, 2, seed=s), 2)
                  for s in range(20)]
        applicable = [c for c in checks if c.applicable]
        assert applicable
        for chk in applicable:
            assert chk.mu_v * 2 * 2 < 10
            assert chk.status == "BoundHolds" and chk.observed_s >= 2
        for chk in checks:
            if not chk.applicable:
                assert chk.mu_v * 2 * 2 >= 10

    def test_flat_first_row(self):
        chk = check_coherence_implies_stability(gen_first_row(3, 6, np.ones(6)), 5)
        assert chk.mu_v == pytest.approx(1.0)
        assert chk.status == "BoundHolds" and chk.observed_s == 5

    def test_maximally_coherent_not_applicable(self):
        A = np.zeros((5, 5))
        A[0, 0] = 1.0
        chk = check_coherence_implies_stability(A, 1)
        assert chk.mu_v == pytest.approx(5.0)
        assert chk.status == "NotApplicable"

    def test_stable_but_coherent(self):
        A = gen_stable_coherent(10, 4, 0.25)
        assert stability_index_exhaustive(A).k == 4
        assert check_coherence_implies_stability(A, 4).status == "NotApplicable"
