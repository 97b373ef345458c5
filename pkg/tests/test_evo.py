"""Evolutionary operators, the EG solver, and the ant-colony arm."""

import numpy as np
import pytest

from conftest import make_problem
from helios.core import LengthMismatch, ValidationError
from helios.evo import (AcoParams, EvoParams, aco_solve, crossover, eg_solve,
                        lhs_init, local_search, mutate, select)
from helios.horizon import CandidateSequence, build_lattice, solve_exact


class TestParams:
    def test_elite_must_leave_room(self):
        with pytest.raises(ValidationError):
            EvoParams(population=4, elite=4)
        with pytest.raises(ValidationError):
            EvoParams(elite=1)

    def test_mutation_probability_range(self):
        with pytest.raises(ValidationError):
            EvoParams(p_mut=1.5)

    def test_evaporation_open_interval(self):
        with pytest.raises(ValidationError):
            AcoParams(evaporation=1.0)
        with pytest.raises(ValidationError):
            AcoParams(evaporation=0.0)


class TestLhsInit:
    def test_population_matching_lattice_size_is_a_permutation(self, small_lattice):
        m = len(small_lattice)
        pop = lhs_init(small_lattice, n_steps=5, m=m, seed=3)
        for j in range(5):
            column = sorted(small_lattice.actions.index(u[j]) for u in pop)
            assert column == list(range(m))

    def test_stratified_bins_each_hold_one_sample(self):
        lat = build_lattice(200.0, 150.0, 50.0)  # 8 actions
        assert len(lat) == 8
        pop = lhs_init(lat, n_steps=6, m=4, seed=9)
        for j in range(6):
            bins = sorted(lat.actions.index(u[j]) // 2 for u in pop)
            assert bins == [0, 1, 2, 3]

    def test_single_member_population(self, small_lattice):
        pop = lhs_init(small_lattice, n_steps=3, m=1, seed=0)
        assert len(pop) == 1
        assert len(pop[0]) == 3


class TestSelect:
    def test_equal_costs_select_uniformly(self):
        rng = np.random.default_rng(21)
        counts = np.zeros(4)
        for _ in range(20_000):
            counts[select([5.0, 5.0, 5.0, 5.0], rng)] += 1
        assert np.all(np.abs(counts - 5000) < 3 * np.sqrt(20_000 * 0.25 * 0.75))

    def test_dominant_candidate_nearly_always_wins(self):
        rng = np.random.default_rng(2)
        picks = [select([0.0, 10.0], rng, epsilon=1e-9) for _ in range(2000)]
        assert sum(picks) == 0  # index 1 has fitness ~1e-9 of the total

    def test_frequencies_match_fitness_distribution(self):
        costs = np.array([0.0, 10.0, 30.0])
        eps = 1.0
        f = (costs.max() - costs) + eps
        p = f / f.sum()
        rng = np.random.default_rng(12)
        n = 100_000
        counts = np.zeros(3)
        for _ in range(n):
            counts[select(costs, rng, epsilon=eps)] += 1
        for i in range(3):
            sigma = np.sqrt(n * p[i] * (1 - p[i]))
            assert abs(counts[i] - n * p[i]) <= 3 * sigma


class TestCrossover:
    def test_identical_parents_reproduce_themselves(self, small_lattice):
        rng = np.random.default_rng(1)
        u = CandidateSequence(tuple(small_lattice.actions[i % 3] for i in range(6)))
        c1, c2 = crossover(u, u, k=2, rng=rng)
        assert tuple(c1) == tuple(u)
        assert tuple(c2) == tuple(u)

    def test_single_cut_semantics(self, small_lattice):
        # with distinct parent genes the cut position is visible in the child:
        # child1 must be a-prefix then b-suffix, child2 the mirror image
        a = CandidateSequence(tuple(small_lattice.actions[1] for _ in range(4)))
        b = CandidateSequence(tuple(small_lattice.actions[2] for _ in range(4)))
        seen_cuts = set()
        for seed in range(40):
            c1, c2 = crossover(a, b, k=1, rng=np.random.default_rng(seed))
            cut = next(i for i, g in enumerate(c1) if g == b[0])
            seen_cuts.add(cut)
            assert tuple(c1) == tuple(a.actions[:cut] + b.actions[cut:])
            assert tuple(c2) == tuple(b.actions[:cut] + a.actions[cut:])
        assert seen_cuts == {1, 2, 3}

    def test_positionwise_gene_conservation(self, small_lattice):
        rng = np.random.default_rng(333)
        n = 8
        for _ in range(200):
            ai = rng.integers(0, len(small_lattice), n)
            bi = rng.integers(0, len(small_lattice), n)
            a = CandidateSequence(tuple(small_lattice.actions[i] for i in ai))
            b = CandidateSequence(tuple(small_lattice.actions[i] for i in bi))
            k = int(rng.integers(1, n))
            c1, c2 = crossover(a, b, k, rng)
            for j in range(n):
                assert {c1[j], c2[j]} == {a[j], b[j]}

    def test_length_mismatch(self, small_lattice):
        a = CandidateSequence(small_lattice.actions[:3])
        b = CandidateSequence(small_lattice.actions[:4])
        with pytest.raises(LengthMismatch):
            crossover(a, b, 1, np.random.default_rng(0))


class TestMutate:
    def test_zero_probability_is_identity(self, small_lattice):
        rng = np.random.default_rng(0)
        u = CandidateSequence(small_lattice.actions[:5])
        assert tuple(mutate(u, small_lattice, 0.0, rng)) == tuple(u)

    def test_singleton_lattice_cannot_change_anything(self):
        from helios.horizon import ActionLattice
        base = build_lattice(50.0, 50.0, 50.0)
        only = ActionLattice(delta_p=50.0, levels_ch=0, levels_dis=0,
                             actions=(base.actions[0],))
        u = CandidateSequence((base.actions[0],) * 4)
        mutated = mutate(u, only, 1.0, np.random.default_rng(0))
        assert tuple(mutated) == tuple(u)

    def test_changed_gene_count_matches_binomial(self, small_lattice):
        # each gene flips to a *different* action with p_mut * (1 - 1/|A|)
        p_mut = 0.1
        n, trials = 20, 10_000
        p_eff = p_mut * (1.0 - 1.0 / len(small_lattice))
        rng = np.random.default_rng(99)
        u = CandidateSequence((small_lattice.actions[0],) * n)
        changed = 0
        for _ in range(trials):
            v = mutate(u, small_lattice, p_mut, rng)
            changed += sum(1 for x, y in zip(u, v) if x != y)
        total = n * trials
        sigma = np.sqrt(total * p_eff * (1 - p_eff))
        assert abs(changed - total * p_eff) <= 3 * sigma


class TestLocalSearch:
    def test_zero_budget_is_identity(self):
        hp = make_problem([300.0, 100.0], [50.0, 20.0])
        u = CandidateSequence((hp.lattice.actions[0],) * 2)
        assert local_search(u, hp, budget=0) is u

    def test_global_optimum_is_a_fixed_point(self):
        hp = make_problem([320.0, 180.0], [90.0, 140.0], soc0=300.0)
        seq, _ = solve_exact(hp)
        refined = local_search(seq, hp, budget=10_000)
        assert tuple(refined) == tuple(seq)

    def test_never_worsens(self):
        rng = np.random.default_rng(6)
        hp = make_problem([300.0, 150.0, 250.0], [10.0, 80.0, 0.0], soc0=400.0)
        for _ in range(30):
            idx = rng.integers(0, len(hp.lattice), hp.n_steps)
            u = CandidateSequence(tuple(hp.lattice.actions[int(i)] for i in idx))
            for budget in (1, 7, 50):
                refined = local_search(u, hp, budget=budget)
                assert hp.cost_of(refined) <= hp.cost_of(u) + 1e-12


class TestEgSolve:
    def test_reaches_enumeration_optimum_on_small_instance(self):
        hp = make_problem([320.0, 180.0], [90.0, 140.0], soc0=300.0,
                          lattice=build_lattice(200.0, 200.0, 50.0))
        assert len(hp.lattice) == 9
        _, optimum = solve_exact(hp)
        _, cost, _ = eg_solve(hp, EvoParams(population=200, generations=100, seed=7))
        assert cost <= optimum * 1.01 + 1e-9

    def test_converges_to_zero_on_surplus_window(self):
        hp = make_problem([100.0] * 3, [250.0] * 3, soc0=500.0)
        _, cost, trace = eg_solve(hp, EvoParams(population=40, generations=30, seed=3))
        assert cost == 0.0
        assert trace[-1] == 0.0

    def test_deterministic_given_seed(self):
        hp = make_problem([320.0, 180.0, 90.0], [90.0, 140.0, 200.0], soc0=300.0)
        ep = EvoParams(population=30, generations=25, seed=1234)
        r1 = eg_solve(hp, ep)
        r2 = eg_solve(hp, ep)
        assert tuple(r1[0]) == tuple(r2[0])
        assert r1[1] == r2[1]
        assert r1[2] == r2[2]

    def test_trace_is_monotone_nonincreasing(self):
        rng = np.random.default_rng(44)
        from conftest import random_small_problem
        for _ in range(10):
            hp = random_small_problem(rng)
            _, _, trace = eg_solve(hp, EvoParams(population=20, generations=40,
                                                 seed=int(rng.integers(1 << 30))))
            assert all(b <= a for a, b in zip(trace, trace[1:]))
            assert len(trace) == 40


class TestAcoSolve:
    def test_single_action_lattice_returns_the_only_sequence(self):
        lat = build_lattice(50.0, 50.0, 50.0)
        # shrink to the idle action only
        from helios.horizon import ActionLattice
        only = ActionLattice(delta_p=50.0, levels_ch=0, levels_dis=0,
                             actions=(lat.actions[0],))
        hp = make_problem([100.0, 200.0], [50.0, 0.0], lattice=only)
        seq, cost, _ = aco_solve(hp, AcoParams(ants=5, iterations=5, seed=2))
        assert all(a.is_idle for a in seq)
        assert cost == hp.cost_of(seq)

    def test_mostly_reaches_near_optimum(self):
        hp = make_problem([350.0, 420.0], [60.0, 30.0], soc0=700.0,
                          lattice=build_lattice(200.0, 100.0, 50.0))
        _, optimum = solve_exact(hp)
        assert optimum > 0
        hits = 0
        for seed in range(20):
            _, cost, _ = aco_solve(hp, AcoParams(ants=50, iterations=100, seed=seed))
            if cost <= optimum * 1.05 + 1e-9:
                hits += 1
        assert hits >= 18  # within 5% in at least 90% of seeded runs

    def test_trace_is_running_minimum(self):
        hp = make_problem([300.0, 100.0, 220.0], [0.0, 90.0, 10.0], soc0=420.0)
        _, _, trace = aco_solve(hp, AcoParams(ants=10, iterations=30, seed=5))
        assert all(b <= a for a, b in zip(trace, trace[1:]))

    def test_deterministic_given_seed(self):
        hp = make_problem([300.0, 100.0], [0.0, 90.0], soc0=420.0)
        ap = AcoParams(ants=15, iterations=20, seed=77)
        assert aco_solve(hp, ap) == aco_solve(hp, ap)
