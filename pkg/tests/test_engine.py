import numpy as np
import pytest

from dpsea.benchmarks import NoiseModel, make_function
from dpsea.engine import (
    DpseaParams,
    adaptive_mutation_rate,
    assess_eligibility,
    evolve_pseudo,
    merge_and_resample,
    run,
    self_organize,
)
from dpsea.ga import GaParams, Individual
from dpsea.regression import ModelKind
from dpsea.stochastics import Budget, RngState


def small_params(**kwargs):
    ga = kwargs.pop("ga", GaParams(pop_size=20, n_elites=2))
    return DpseaParams(ga=ga, **kwargs)


def make_pop(genomes, fits=None, sampled=True):
    genomes = np.asarray(genomes, float)
    if fits is None:
        fits = np.arange(len(genomes), dtype=float)
    return [
        Individual(genomes[i].copy(), float(fits[i]), sampled=sampled)
        for i in range(len(genomes))
    ]


class TestSelfOrganize:
    def test_disjoint_cover_randomized(self):
        fn = make_function("sphere", dimension=3)
        rng = np.random.default_rng(0)
        params = small_params()
        for _ in range(1000):
            n = int(rng.integers(1, 31))
            genomes = rng.uniform(-100, 100, (n, 3))
            pop = make_pop(genomes, rng.normal(size=n))
            clusters = self_organize(pop, fn, params)
            seen = [id(m) for c in clusters for m in c.members]
            assert len(seen) == n
            assert len(set(seen)) == n

    def test_radius_one_gives_single_cluster(self):
        fn = make_function("sphere", dimension=3)
        params = small_params(radius_fraction=1.0)
        rng = np.random.default_rng(1)
        pop = make_pop(rng.uniform(-100, 100, (20, 3)))
        clusters = self_organize(pop, fn, params)
        assert len(clusters) == 1
        assert len(clusters[0].members) == 20

    def test_two_blob_oracle_partition(self):
        # two tight blobs in opposite corners: greedy seeding must recover
        # exactly the blob membership
        fn = make_function("sphere", dimension=2)
        params = small_params(
            ga=GaParams(pop_size=10, n_elites=2), radius_fraction=0.1
        )
        rng = np.random.default_rng(2)
        blob_a = np.full((5, 2), -80.0) + rng.normal(0, 0.5, (5, 2))
        blob_b = np.full((5, 2), 80.0) + rng.normal(0, 0.5, (5, 2))
        genomes = np.vstack([blob_a, blob_b])
        fits = [3.0, 4.0, 5.0, 6.0, 7.0, 0.0, 1.0, 2.0, 8.0, 9.0]
        pop = make_pop(genomes, fits)
        clusters = self_organize(pop, fn, params)
        assert len(clusters) == 2
        # seed of the first cluster is the global best (index 5, blob b)
        assert clusters[0].seed_index == 5
        got_b = {id(m) for m in clusters[0].members}
        assert got_b == {id(pop[i]) for i in range(5, 10)}
        got_a = {id(m) for m in clusters[1].members}
        assert got_a == {id(pop[i]) for i in range(5)}

    def test_max_clusters_cap_with_leftover_assignment(self):
        fn = make_function("sphere", dimension=1)
        params = small_params(
            ga=GaParams(pop_size=5, n_elites=1),
            max_clusters=2,
            radius_fraction=0.01,
        )
        # points at 0, 1, 50, 51, 100; radius = 0.01 * 200 = 2
        genomes = np.array([[0.0], [1.0], [50.0], [51.0], [100.0]])
        pop = make_pop(genomes, [0.0, 1.0, 2.0, 3.0, 4.0])
        clusters = self_organize(pop, fn, params)
        assert len(clusters) == 2
        sizes = sorted(len(c.members) for c in clusters)
        # 100 is a leftover and joins its nearest seed (50)
        assert sizes == [2, 3]

    def test_archive_holds_only_sampled_members(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(
            radius_fraction=1.0, ga=GaParams(pop_size=4, n_elites=1), s_min=2
        )
        pop = make_pop(np.zeros((4, 2)), [1.0, 2.0, 3.0, 4.0])
        pop[2].sampled = False
        clusters = self_organize(pop, fn, params)
        assert len(clusters[0].archive) == 3

    def test_sample_pool_assigned_to_nearest_seed(self):
        fn = make_function("sphere", dimension=1)
        params = small_params(
            ga=GaParams(pop_size=4, n_elites=1), radius_fraction=0.05, s_min=2
        )
        genomes = np.array([[-90.0], [-89.0], [90.0], [91.0]])
        pop = make_pop(genomes, [0.0, 1.0, 2.0, 3.0])
        xs = np.array([[-95.0], [85.0], [-80.0]])
        ys = np.array([10.0, 20.0, 30.0])
        clusters = self_organize(pop, fn, params, samples=(xs, ys))
        assert len(clusters) == 2
        left = next(c for c in clusters if c.centroid[0] < 0)
        right = next(c for c in clusters if c.centroid[0] > 0)
        assert sorted(y for _, y in left.archive) == [10.0, 30.0]
        assert [y for _, y in right.archive] == [20.0]

    def test_empty_population_rejected(self):
        fn = make_function("sphere", dimension=2)
        with pytest.raises(ValueError):
            self_organize([], fn, small_params())


class TestEligibility:
    def _clusters(self, fn, params, sizes, bests):
        rng = np.random.default_rng(0)
        pops = []
        for size, best in zip(sizes, bests):
            genomes = rng.uniform(-1, 1, (size, fn.dimension))
            fits = best + np.arange(size, dtype=float)
            pops.append(make_pop(genomes, fits))
        from dpsea.engine import PseudoPopulation

        return [
            PseudoPopulation(p, seed_index=i, centroid=np.zeros(fn.dimension))
            for i, p in enumerate(pops)
        ]

    def test_top_half_and_min_size(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(kappa=0.5, s_min=5)
        # 4 clusters -> top ceil(0.5*4) = 2 by best fitness
        clusters = self._clusters(fn, params, [6, 6, 6, 3], [0.0, 1.0, 2.0, -5.0])
        assess_eligibility(clusters, params)
        flags = [c.eligible for c in clusters]
        # cluster 3 has the best fitness but only 3 < s_min members
        assert flags == [True, False, False, False]

    def test_kappa_one_makes_all_large_clusters_eligible(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(kappa=1.0, s_min=2)
        clusters = self._clusters(fn, params, [3, 3, 3], [0.0, 1.0, 2.0])
        assess_eligibility(clusters, params)
        assert all(c.eligible for c in clusters)

    def test_staleness_counts_and_saturates(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(kappa=0.5, s_min=2, staleness_limit=2)
        clusters = self._clusters(fn, params, [3, 3], [0.0, 1.0])
        for cycle in range(4):
            assess_eligibility(clusters, params)
        assert clusters[0].staleness == 0
        assert clusters[1].staleness == 2  # saturated at the limit

    def test_eligibility_resets_member_counters(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(kappa=0.5, s_min=2)
        clusters = self._clusters(fn, params, [3, 3], [0.0, 1.0])
        assess_eligibility(clusters, params)
        assert all(m.stale_cycles == 1 for m in clusters[1].members)
        # swap fitness so the stale cluster wins the next cycle
        for m in clusters[1].members:
            m.fitness_est -= 10.0
        assess_eligibility(clusters, params)
        assert clusters[1].eligible
        assert all(m.stale_cycles == 0 for m in clusters[1].members)


class TestAdaptiveMutationRate:
    def test_hand_values(self):
        params = small_params(s_min=5)  # ga.p_m = 0.3
        # best member of a cluster of size 5: 0.3 * 0.5 * 1 = 0.15
        assert adaptive_mutation_rate(0.0, 5, params) == pytest.approx(0.15)
        # worst member: 0.3 * 1.5 * 1 = 0.45
        assert adaptive_mutation_rate(1.0, 5, params) == pytest.approx(0.45)
        # size 20: sqrt(5/20) = 0.5 -> 0.3 * 1.5 * 0.5 = 0.225
        assert adaptive_mutation_rate(1.0, 20, params) == pytest.approx(0.225)

    def test_clamped(self):
        params = small_params(s_min=5)
        assert adaptive_mutation_rate(0.0, 500, params) == 0.05
        big = DpseaParams(ga=GaParams(pop_size=20, n_elites=2, p_m=1.0), s_min=5)
        assert adaptive_mutation_rate(1.0, 5, big) == 1.0

    def test_validation(self):
        params = small_params()
        with pytest.raises(ValueError):
            adaptive_mutation_rate(1.5, 5, params)
        with pytest.raises(ValueError):
            adaptive_mutation_rate(0.5, 0, params)


class TestEvolvePseudo:
    def _eligible_cluster(self, fn, params, n=8):
        rng = np.random.default_rng(3)
        genomes = rng.uniform(-2, 2, (n, fn.dimension))
        fits = np.sum(genomes**2, axis=1)
        pop = make_pop(genomes, fits)
        clusters = self_organize(pop, fn, small_params(radius_fraction=1.0))
        c = clusters[0]
        c.eligible = True
        return c

    def test_requires_eligibility(self):
        fn = make_function("sphere", dimension=2)
        c = self._eligible_cluster(fn, small_params())
        c.eligible = False
        with pytest.raises(ValueError):
            evolve_pseudo(c, fn, small_params(), RngState(0))

    def test_zero_true_evaluations(self, monkeypatch):
        fn = make_function("sphere", dimension=2)
        params = small_params()
        c = self._eligible_cluster(fn, params)

        def boom(*args, **kwargs):
            raise AssertionError("pseudo evolution must not touch true fitness")

        import dpsea.benchmarks as bm

        monkeypatch.setattr(bm, "evaluate", boom)
        monkeypatch.setattr(bm, "evaluate_many", boom)
        evolve_pseudo(c, fn, params, RngState(1))

    def test_offspring_scored_by_model(self):
        fn = make_function("sphere", dimension=2)
        params = small_params()
        c = self._eligible_cluster(fn, params)
        evolve_pseudo(c, fn, params, RngState(1))
        from dpsea.regression import predict

        for m in c.members:
            if not m.unchanged:
                assert m.fitness_est == pytest.approx(predict(c.model, m.genome))
                assert not m.sampled

    def test_model_fit_cached_between_generations(self):
        fn = make_function("sphere", dimension=2)
        params = small_params()
        c = self._eligible_cluster(fn, params)
        evolve_pseudo(c, fn, params, RngState(1))
        first = c.model
        evolve_pseudo(c, fn, params, RngState(2))
        assert c.model is first

    def test_quadratic_model_with_ample_archive(self):
        fn = make_function("sphere", dimension=2)
        params = small_params()
        c = self._eligible_cluster(fn, params, n=10)  # 10 >= 2*2 + 2
        evolve_pseudo(c, fn, params, RngState(1))
        assert c.model.kind is ModelKind.DIAG_QUADRATIC

    def test_empty_archive_falls_back_to_constant(self):
        fn = make_function("sphere", dimension=2)
        params = small_params()
        c = self._eligible_cluster(fn, params)
        c.archive = []
        evolve_pseudo(c, fn, params, RngState(1))
        assert c.model.kind is ModelKind.CONSTANT

    def test_singleton_cluster_evolves(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(s_min=1)
        pop = make_pop(np.array([[1.0, 1.0]]), [2.0])
        clusters = self_organize(pop, fn, small_params(radius_fraction=1.0))
        c = clusters[0]
        c.eligible = True
        evolve_pseudo(c, fn, params, RngState(0))
        assert len(c.members) == 1


class TestMergeAndResample:
    def test_hand_counted_budget(self):
        # 100 members, 10 exempt elites, rs = 5:
        # charged (100 - 10) * 5 = 450, skipped 10 * 5 = 50
        fn = make_function("sphere", dimension=2)
        params = DpseaParams(ga=GaParams(pop_size=100, n_elites=10))
        rng = np.random.default_rng(0)
        pop = make_pop(rng.uniform(-50, 50, (100, 2)))
        for m in pop[:10]:
            m.unchanged = True
        clusters = self_organize(pop, fn, small_params(
            ga=GaParams(pop_size=100, n_elites=10), radius_fraction=1.0))
        budget = Budget(pop_size=100, total_it=0, rs=5)
        merged = merge_and_resample(
            clusters, fn, NoiseModel(0.0, 0.0), 5, RngState(1), budget, params
        )
        assert len(merged) == 100
        assert budget.total_eval == 450
        assert budget.total_unchanged == 50

    def test_exempt_members_keep_fitness(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(ga=GaParams(pop_size=4, n_elites=1), s_min=2)
        pop = make_pop(np.zeros((4, 2)), [1.0, 2.0, 3.0, 4.0])
        pop[0].unchanged = True
        clusters = self_organize(pop, fn, params)
        budget = Budget(pop_size=4, total_it=0, rs=1)
        merged = merge_and_resample(
            clusters, fn, NoiseModel(0.0, 0.0), 1, RngState(1), budget, params
        )
        kept = next(m for m in merged if m.unchanged)
        assert kept.fitness_est == 1.0
        for m in merged:
            if not m.unchanged:
                assert m.fitness_est == 0.0  # true sphere value at origin

    def test_stale_cluster_replaced_by_randoms(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(
            ga=GaParams(pop_size=6, n_elites=1), staleness_limit=2
        )
        pop = make_pop(np.zeros((6, 2)))
        clusters = self_organize(pop, fn, small_params(
            ga=GaParams(pop_size=6, n_elites=1), radius_fraction=1.0))
        clusters[0].staleness = 2
        budget = Budget(pop_size=6, total_it=0, rs=1)
        merged = merge_and_resample(
            clusters, fn, NoiseModel(0.0, 0.0), 1, RngState(7), budget, params
        )
        originals = {id(m) for m in pop}
        assert all(id(m) not in originals for m in merged)
        assert any(np.any(m.genome != 0.0) for m in merged)

    def test_refills_to_population_size(self):
        fn = make_function("sphere", dimension=2)
        params = small_params(ga=GaParams(pop_size=8, n_elites=1))
        pop = make_pop(np.zeros((5, 2)))
        clusters = self_organize(pop, fn, small_params(
            ga=GaParams(pop_size=5, n_elites=1), radius_fraction=1.0))
        budget = Budget(pop_size=8, total_it=0, rs=1)
        merged = merge_and_resample(
            clusters, fn, NoiseModel(0.0, 0.0), 1, RngState(1), budget, params
        )
        assert len(merged) == 8
        assert budget.total_eval == 8


class TestRun:
    def test_deterministic_given_seed(self):
        fn = make_function("sphere")
        params = small_params(max_total_eval=3000)
        noise = NoiseModel(0.0, 0.3)
        a = run(fn, noise, params, RngState(5))
        b = run(fn, noise, params, RngState(5))
        assert a.best_fitness == b.best_fitness
        assert np.array_equal(a.best_genome, b.best_genome)
        assert a.budget.total_eval == b.budget.total_eval
        assert len(a.trace) == len(b.trace)

    def test_budget_cap_never_exceeded(self):
        fn = make_function("sphere")
        noise = NoiseModel(0.0, 0.5)
        for cap in (2000, 3001, 5000):
            params = small_params(max_total_eval=cap)
            res = run(fn, noise, params, RngState(1))
            assert res.budget.total_eval <= cap

    def test_cap_zero_only_charges_initialization(self):
        fn = make_function("sphere")
        params = small_params(max_total_eval=0)
        res = run(fn, NoiseModel(0.0, 0.0), params, RngState(1))
        assert res.budget.total_eval == params.ga.pop_size * params.rs_merge
        assert res.trace == []

    def test_best_fitness_is_true_fitness_of_best_genome(self):
        from dpsea.benchmarks import evaluate

        fn = make_function("sphere")
        params = small_params(max_total_eval=4000)
        res = run(fn, NoiseModel(0.0, 0.4), params, RngState(2))
        assert res.best_fitness == pytest.approx(evaluate(fn, res.best_genome))

    def test_trace_monotone_and_progressing(self):
        fn = make_function("sphere")
        params = small_params(max_total_eval=6000)
        res = run(fn, NoiseModel(0.0, 0.2), params, RngState(3))
        assert len(res.trace) >= 2
        bests = [t.best_fitness for t in res.trace]
        assert all(b2 <= b1 + 1e-12 for b1, b2 in zip(bests, bests[1:]))
        evals = [t.total_eval for t in res.trace]
        assert all(e2 >= e1 for e1, e2 in zip(evals, evals[1:]))

    def test_noiseless_sphere_improves_substantially(self):
        fn = make_function("sphere")
        params = DpseaParams(max_total_eval=20_000)
        res = run(fn, NoiseModel(0.0, 0.0), params, RngState(4))
        assert res.best_fitness < 1.0

    def test_rs_merge_scales_consumption(self):
        fn = make_function("sphere")
        p1 = small_params(max_total_eval=4000, rs_merge=1)
        p5 = small_params(max_total_eval=4000, rs_merge=5)
        r1 = run(fn, NoiseModel(0.0, 0.5), p1, RngState(6))
        r5 = run(fn, NoiseModel(0.0, 0.5), p5, RngState(6))
        assert len(r5.trace) < len(r1.trace)
        assert r5.budget.total_eval <= 4000
