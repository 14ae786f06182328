import math
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from basispursuit.generators import GeneratorSpec
from basispursuit.harness import (
    ExperimentStats,
    degrees_of_freedom,
    enumerate_uniform_sampling,
    run_experiment,
    run_trial,
    svd_oracle,
    uniform_sampling_exact_rate,
    uniform_sampling_failure_demo,
)
from basispursuit.oracle import EntryOracle


class TestDegreesOfFreedom:
    def test_values(self):
        assert degrees_of_freedom(4, 4, 2) == 12
        assert degrees_of_freedom(5, 7, 0) == 0
        assert degrees_of_freedom(6, 6, 6) == 36

    def test_matches_parameter_count(self):
        # r + r(2m-r-1)/2 + r(2n-r-1)/2
        for m, n, r in [(5, 7, 2), (10, 3, 3), (8, 8, 1)]:
            assert degrees_of_freedom(m, n, r) == r + r * (2 * m - r - 1) // 2 + r * (2 * n - r - 1) // 2

    def test_range(self):
        with pytest.raises(ValueError):
            degrees_of_freedom(3, 4, 4)


class TestUniformSampling:
    def test_enumeration_small(self):
        assert enumerate_uniform_sampling(3, 3, 3) == Fraction(1, 84)
        assert comb(9, 3) == 84

    @pytest.mark.parametrize("m, n, l", [(2, 3, 4), (3, 3, 5), (2, 4, 6), (3, 2, 2)])
    def test_closed_form_matches_enumeration(self, m, n, l):
        assert uniform_sampling_exact_rate(m, n, l) == enumerate_uniform_sampling(m, n, l)

    def test_demo_below_bound(self):
        demo = uniform_sampling_failure_demo(4, 4, 12, 100_000, seed=3)
        bound = (12 / 16) ** 4
        assert demo.paper_bound == pytest.approx(bound)
        sigma = math.sqrt(bound * (1 - bound) / demo.trials)
        assert demo.empirical_success_rate <= bound + 3 * sigma
        exact = float(uniform_sampling_exact_rate(4, 4, 12))
        assert demo.empirical_success_rate == pytest.approx(exact, abs=4 * math.sqrt(exact * (1 - exact) / 1e5))

    def test_all_entries(self):
        demo = uniform_sampling_failure_demo(3, 4, 12, 1000, seed=0)
        assert demo.empirical_success_rate == 1.0 and demo.paper_bound == 1.0

    def test_too_few_samples(self):
        demo = uniform_sampling_failure_demo(3, 4, 3, 1000, seed=0)
        assert demo.empirical_success_rate == 0.0 and demo.note


class TestSVDOracle:
    def test_diagonal(self):
        np.testing.assert_allclose(svd_oracle(np.diag([3.0, 1.0])).singular_values, [3.0, 1.0])

    def test_orthogonal(self, rng):
        Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        np.testing.assert_allclose(svd_oracle(Q).singular_values, np.ones(5), atol=1e-12)

    @pytest.mark.parametrize("shape", [(6, 4), (4, 6), (7, 7), (1, 5)])
    def test_reconstructs(self, rng, shape):
        M = rng.standard_normal(shape)
        s = svd_oracle(M)
        assert np.all(np.diff(s.singular_values) <= 0) and np.all(s.singular_values >= 0)
        R = s.left @ np.diag(s.singular_values) @ s.right.T
        assert np.linalg.norm(R - M) <= 1e-9 * np.linalg.norm(M)
        np.testing.assert_allclose(s.singular_values, np.linalg.svd(M, compute_uv=False), rtol=1e-10)

    def test_rank_deficient(self, rng):
        M = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 5))
        s = svd_oracle(M)
        assert np.sum(s.singular_values > 1e-10) == 2
        assert np.linalg.norm(s.left @ np.diag(s.singular_values) @ s.right.T - M) <= 1e-9 * np.linalg.norm(M)


class TestOracle:
    def test_logs_before_returning(self):
        A = np.arange(12.0).reshape(3, 4)
        o = EntryOracle(A)
        assert o.query(1, 2) == 6.0
        np.testing.assert_array_equal(o.column(0), [0, 4, 8])
        np.testing.assert_array_equal(o.row(2), [8, 9, 10, 11])
        assert o.inspected_entries() == {(1, 2), (0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (2, 3)}
        assert o.entry_reads == 1 + 3 + 4

    def test_returned_values_are_copies(self):
        o = EntryOracle(np.ones((2, 2)))
        c = o.column(0)
        c[:] = 5
        assert o.column(0)[0] == 1.0


class TestExperiments:
    def test_first_row_minimum(self):
        stats = run_experiment(GeneratorSpec("first-row", 20, 30), "rbp", {"delta": 0.01}, 20, master_seed=1)
        assert all(t.entries_inspected == 49 for t in stats.per_trial)
        assert stats.aggregate["success_rate"] == 1.0

    def test_replay(self):
        spec = GeneratorSpec("generic", 15, 20, 3)
        stats = run_experiment(spec, "rbp", {}, 5, master_seed=42)
        rec = stats.per_trial[3]
        again = run_trial(spec, "rbp", stats.config, 3, rec.seed)
        assert (again.entries_inspected, again.draws, again.success) == (rec.entries_inspected, rec.draws, rec.success)

    def test_parallel_matches_serial(self):
        spec = GeneratorSpec("random-orthogonal", 12, 16, 2)
        a = run_experiment(spec, "rfrbp", {"k0": 14}, 8, master_seed=5)
        b = run_experiment(spec, "rfrbp", {"k0": 14}, 8, master_seed=5, workers=2)
        key = lambda s: [(t.seed, t.entries_inspected, t.draws, t.success) for t in s.per_trial]
        assert key(a) == key(b)

    def test_json_round_trip(self):
        stats = run_experiment(GeneratorSpec("generic", 10, 12, 2), "rfrbp", {"k0": 10}, 4, master_seed=0)
        back = ExperimentStats.from_json(stats.to_json())
        assert back == stats
        assert len(back.per_trial) == back.trials
        assert back.aggregate["success_rate"] == sum(t.success for t in back.per_trial) / back.trials

    def test_generation_failure_recorded(self):
        spec = GeneratorSpec("first-row", 3, 4, params={"a": [1.0, 0.0, 2.0, 3.0]})
        stats = run_experiment(spec, "rbp", {}, 3, master_seed=0)
        assert stats.aggregate["errors"] == 3 and stats.aggregate["success_rate"] == 0.0

    def test_rank_mismatch_recorded(self):
        stats = run_experiment(GeneratorSpec("generic", 8, 10, 3), "rbp", {"rank": 2}, 3, master_seed=0)
        assert all(t.error and "RankMismatch" in t.error for t in stats.per_trial)

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError):
            run_experiment(GeneratorSpec("generic", 8, 10, 3), "sdp", {}, 1, master_seed=0)
