import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import all_bits
from qubo_music.qubo import QuboModel
from qubo_music.solvers import (
    SaParams,
    Sample,
    SampleSet,
    SizeError,
    brute_force,
    one_hot_patterns,
    restricted_enumerate,
    simulated_annealing,
)


def random_model(rng, n, density=0.5):
    lin = {i: float(rng.integers(-5, 6)) for i in range(n)}
    quad = {(i, j): float(rng.integers(-5, 6)) for i in range(n) for j in range(i + 1, n) if rng.random() < density}
    return QuboModel(n, lin, quad, float(rng.integers(-3, 4)))


def oracle_ground(q):
    """Plain-Python exhaustive minimum, independent of the vectorised solver."""
    energies = {x: q.energy(x) for x in all_bits(q.num_vars)}
    best = min(energies.values())
    return best, sorted(x for x, e in energies.items() if e == best)


class TestBruteForce:
    def test_worked_example_unique_minimum(self):
        ss = brute_force(QuboModel.from_matrix([[5, -6], [0, 9]]))
        assert len(ss) == 1
        assert ss.first.assignment == (0, 0) and ss.first.energy == 0

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_oracle(self, seed):
        rng = np.random.default_rng(seed)
        q = random_model(rng, int(rng.integers(1, 11)))
        best, states = oracle_ground(q)
        ss = brute_force(q)
        assert ss.lowest_energy == best
        assert sorted(s.assignment for s in ss) == states

    def test_degenerate_ground_states_all_returned(self):
        q = QuboModel(3, {}, {})
        assert len(brute_force(q)) == 8

    def test_size_limit(self):
        with pytest.raises(SizeError):
            brute_force(QuboModel(30, {0: 1.0}))

    @pytest.mark.parametrize("seed", range(8))
    def test_marginalised_variables_exact(self, seed):
        rng = np.random.default_rng(100 + seed)
        q = random_model(rng, 9)
        aux = [6, 7, 8]
        best, states = oracle_ground(q)
        ss = brute_force(q, marginalize=aux)
        assert ss.lowest_energy == best
        # every primary pattern of a ground state is found
        assert {s.assignment[:6] for s in ss} == {x[:6] for x in states}


class TestRestricted:
    def test_one_hot_patterns(self):
        assert one_hot_patterns(3) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        assert one_hot_patterns(2, include_empty=True)[-1] == (0, 0)

    @pytest.mark.parametrize("max_block", [1, 7, 1 << 22])
    def test_matches_filtered_enumeration(self, max_block):
        rng = np.random.default_rng(7)
        q = random_model(rng, 9, density=0.8)
        groups = [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
        choices = [one_hot_patterns(3, include_empty=True)] * 3
        allowed = set(one_hot_patterns(3, include_empty=True))
        cand = [x for x in all_bits(9) if all(tuple(x[i] for i in g) in allowed for g in groups)]
        best = min(q.energy(x) for x in cand)
        ss = restricted_enumerate(q, groups, choices, max_block=max_block)
        assert ss.lowest_energy == pytest.approx(best)
        assert sorted(s.assignment for s in ss) == sorted(x for x in cand if q.energy(x) == pytest.approx(best))

    def test_groups_must_partition(self):
        with pytest.raises(ValueError):
            restricted_enumerate(QuboModel(3), [[0, 1]], [[(0, 0)]])

    def test_combination_limit(self):
        q = QuboModel(4)
        with pytest.raises(SizeError):
            restricted_enumerate(q, [[0, 1], [2, 3]], [all_bits(2)] * 2, limit=10)


class TestSimulatedAnnealing:
    def test_seeded_runs_identical(self):
        q = random_model(np.random.default_rng(3), 12)
        p = SaParams(num_reads=20, sweeps_per_read=200, seed=42)
        assert simulated_annealing(q, p).to_table() == simulated_annealing(q, p).to_table()

    def test_different_seeds_differ(self):
        q = QuboModel(16, {}, {})
        a = simulated_annealing(q, SaParams(num_reads=5, sweeps_per_read=10, seed=1))
        b = simulated_annealing(q, SaParams(num_reads=5, sweeps_per_read=10, seed=2))
        assert [s.assignment for s in a] != [s.assignment for s in b]

    def test_reads_counted(self):
        q = random_model(np.random.default_rng(5), 6)
        ss = simulated_annealing(q, SaParams(num_reads=37, sweeps_per_read=50, seed=0))
        assert sum(s.num_occurrences for s in ss) == 37

    @pytest.mark.parametrize("seed", range(5))
    def test_finds_small_ground_states(self, seed):
        q = random_model(np.random.default_rng(seed), 10)
        best, _ = oracle_ground(q)
        assert simulated_annealing(q, SaParams(seed=seed)).lowest_energy == best

    def test_energies_recomputed_exactly(self):
        q = random_model(np.random.default_rng(9), 8)
        for s in simulated_annealing(q, SaParams(num_reads=10, sweeps_per_read=20, seed=0)):
            assert s.energy == q.energy(s.assignment)

    def test_schedule_is_geometric(self):
        b = SaParams(sweeps_per_read=5, beta_start=0.1, beta_end=10.0).betas()
        np.testing.assert_allclose(b, [0.1, 0.1 * 10**0.5, 1.0, 10**0.5, 10.0])

    @pytest.mark.parametrize("kw", [{"num_reads": 0}, {"beta_start": 2.0, "beta_end": 1.0}, {"sweeps_per_read": 0}])
    def test_bad_params(self, kw):
        with pytest.raises(ValueError):
            SaParams(**kw)


class TestSampleSet:
    def test_duplicates_counted_and_sorted(self):
        q = QuboModel.from_matrix([[5, -6], [0, 9]])
        ss = SampleSet.from_assignments(q, [(1, 1), (0, 0), (1, 1), (0, 1)])
        assert [(s.assignment, s.num_occurrences) for s in ss] == [((0, 0), 1), ((1, 1), 2), ((0, 1), 1)]

    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=20))
    def test_table_round_trip(self, rows):
        q = QuboModel(3, {0: 0.5, 2: -1.25}, {(0, 1): 3.0})
        ss = SampleSet.from_assignments(q, rows)
        assert SampleSet.from_table(ss.to_table()) == ss

    def test_merge_adds_counts(self):
        q = QuboModel(1, {0: 1.0})
        a = SampleSet.from_assignments(q, [(0,)])
        merged = a.merge(a)
        assert merged.first.num_occurrences == 2
