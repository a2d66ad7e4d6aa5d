import numpy as np
import pytest

from dpsea.benchmarks import NoiseModel, evaluate, make_function
from dpsea.stochastics import (
    Budget,
    RngState,
    gaussian,
    resample_many,
    resampled_fitness,
)


class TestRngState:
    def test_same_seed_same_stream(self):
        a = RngState(123)
        b = RngState(123)
        assert np.array_equal(a.uniform(size=10), b.uniform(size=10))
        assert np.array_equal(a.normal(size=10), b.normal(size=10))
        assert np.array_equal(a.integers(0, 100, 10), b.integers(0, 100, 10))

    def test_different_seeds_differ(self):
        assert not np.array_equal(
            RngState(1).uniform(size=10), RngState(2).uniform(size=10)
        )

    def test_split_is_deterministic(self):
        a = RngState(7).split("child")
        b = RngState(7).split("child")
        assert a.seed == b.seed
        assert np.array_equal(a.uniform(size=5), b.uniform(size=5))

    def test_split_labels_are_independent(self):
        root = RngState(7)
        assert root.split("x").seed != root.split("y").seed
        assert root.split("x").seed != root.seed

    def test_split_does_not_advance_parent(self):
        a = RngState(7)
        a.split("x")
        b = RngState(7)
        assert np.array_equal(a.uniform(size=5), b.uniform(size=5))

    def test_seed_masked_to_64_bits(self):
        assert RngState(1 << 70).seed == 0


class TestGaussian:
    def test_zero_sigma_returns_mu(self):
        assert gaussian(RngState(0), 3.5, 0.0) == 3.5

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            gaussian(RngState(0), 0.0, -0.5)

    def test_moments(self):
        rng = RngState(3)
        draws = np.array([gaussian(rng, 2.0, 0.5) for _ in range(20_000)])
        assert abs(draws.mean() - 2.0) < 0.02
        assert abs(draws.std() - 0.5) < 0.02


class TestBudget:
    def test_charge_and_skip_accumulate(self):
        b = Budget(pop_size=10, total_it=5, rs=2)
        b.charge(20)
        b.charge(5)
        b.skip(4)
        assert b.total_eval == 25
        assert b.total_unchanged == 4


class TestResampledFitness:
    def test_sigma_zero_is_exact_and_charges_rs(self):
        fn = make_function("sphere")
        x = np.full(5, 2.0)
        budget = Budget(pop_size=1, total_it=1, rs=7)
        got = resampled_fitness(fn, x, 7, NoiseModel(0.0, 0.0), RngState(0), budget)
        assert got == evaluate(fn, x)
        assert budget.total_eval == 7

    def test_invalid_rs(self):
        fn = make_function("sphere")
        budget = Budget(pop_size=1, total_it=1, rs=1)
        with pytest.raises(ValueError):
            resampled_fitness(fn, np.zeros(5), 0, NoiseModel(), RngState(0), budget)

    def test_variance_scales_inverse_rs(self):
        # var of the rs-average of N(0, sigma^2) noise is sigma^2 / rs
        fn = make_function("sphere")
        x = np.zeros(5)
        sigma = 1.0
        noise = NoiseModel(0.0, sigma)
        rng = RngState(17)
        trials = 1000
        for rs in (1, 4, 16):
            budget = Budget(pop_size=1, total_it=1, rs=rs)
            draws = np.array(
                [
                    resampled_fitness(fn, x, rs, noise, rng, budget)
                    for _ in range(trials)
                ]
            )
            expected = sigma**2 / rs
            assert abs(draws.var(ddof=1) - expected) < 0.3 * expected
            assert budget.total_eval == trials * rs

    def test_mu_offset_applied(self):
        fn = make_function("sphere")
        x = np.zeros(5)
        budget = Budget(pop_size=1, total_it=1, rs=1)
        got = resampled_fitness(fn, x, 1, NoiseModel(5.0, 0.0), RngState(0), budget)
        assert got == 5.0


class TestResampleMany:
    def test_matches_scalar_path_at_sigma_zero(self):
        fn = make_function("sphere")
        xs = RngState(1).uniform(-100, 100, (8, 5))
        budget = Budget(pop_size=8, total_it=1, rs=3)
        batch = resample_many(fn, xs, 3, NoiseModel(0.0, 0.0), RngState(0), budget)
        single = [evaluate(fn, x) for x in xs]
        assert np.allclose(batch, single)
        assert budget.total_eval == 24

    def test_batch_noise_statistics(self):
        fn = make_function("sphere")
        xs = np.zeros((2000, 5))
        budget = Budget(pop_size=2000, total_it=1, rs=4)
        vals = resample_many(fn, xs, 4, NoiseModel(0.0, 1.0), RngState(9), budget)
        assert abs(vals.mean()) < 0.05
        assert abs(vals.var(ddof=1) - 0.25) < 0.05
