"""Real-coded GA operators shared by the canonical-GA baseline and the
switching engine: binary tournament, whole-arithmetic crossover, Gaussian
mutation, and a generational step with elitism.

Genomes are treated as immutable arrays; every operator returns fresh
individuals. An individual whose fitness came from an actual (resampled)
evaluation carries ``sampled=True``; elites copied without re-evaluation
carry ``unchanged=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Individual",
    "GaParams",
    "tournament_select",
    "arithmetic_crossover",
    "gaussian_mutate",
    "evolve_generation",
]


@dataclass
class Individual:
    genome: np.ndarray
    fitness_est: float = math.nan
    sampled: bool = False
    unchanged: bool = False
    # consecutive switching cycles this member spent in non-eligible clusters
    stale_cycles: int = 0


@dataclass(frozen=True)
class GaParams:
    pop_size: int = 100
    p_c: float = 1.0
    p_m: float = 0.3
    n_elites: int = 10
    sigma_m: float = 0.01  # mutation variance; draws use std sqrt(sigma_m)

    def __post_init__(self):
        if self.pop_size < 1:
            raise ValueError("pop_size must be positive")
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError("p_c must be in [0, 1]")
        if not 0.0 <= self.p_m <= 1.0:
            raise ValueError("p_m must be in [0, 1]")
        if not 0 <= self.n_elites < self.pop_size:
            raise ValueError("n_elites must satisfy 0 <= n_elites < pop_size")
        if self.sigma_m < 0:
            raise ValueError("sigma_m must be nonnegative")


def tournament_select(pop, k, rng):
    """Best of ``k`` uniform draws with replacement; ties go to the lower index."""
    if not pop:
        raise ValueError("cannot select from an empty population")
    if k < 1:
        raise ValueError("tournament size must be >= 1")
    idx = rng.integers(0, len(pop), k)
    best = min(idx, key=lambda i: (pop[i].fitness_est, i))
    return pop[int(best)]


def arithmetic_crossover(a, b, p_c, rng):
    """Whole-arithmetic crossover with a single alpha per pair.

    With probability ``p_c`` the children are the two convex combinations
    of the parents; otherwise they are plain copies. Children are stale
    (fitness NaN, flags cleared) either way.
    """
    if a.genome.shape != b.genome.shape:
        raise ValueError("parent genomes must have the same length")
    if rng.uniform() < p_c:
        alpha = rng.uniform()
        g1 = alpha * a.genome + (1.0 - alpha) * b.genome
        g2 = (1.0 - alpha) * a.genome + alpha * b.genome
    else:
        g1 = a.genome.copy()
        g2 = b.genome.copy()
    return Individual(g1), Individual(g2)


def gaussian_mutate(ind, p_m, sigma_m, bounds, rng):
    """Per-gene additive N(0, sigma_m) noise with probability ``p_m``, clamped."""
    if sigma_m < 0:
        raise ValueError("sigma_m must be nonnegative")
    d = ind.genome.shape[0]
    mask = rng.uniform(size=d) < p_m
    noise = rng.normal(0.0, math.sqrt(sigma_m), d) if sigma_m > 0 else np.zeros(d)
    genome = np.clip(ind.genome + np.where(mask, noise, 0.0), bounds[0], bounds[1])
    return Individual(genome)


def evolve_generation(
    pop,
    fitness,
    params,
    rng,
    bounds,
    *,
    mutation_rates=None,
    fitness_batch=None,
    sampled=True,
):
    """One generational step: elitism, then tournament -> crossover -> mutation.

    The top ``n_elites`` by fitness are copied verbatim (``unchanged=True``,
    fitness kept); the remaining slots are offspring from binary tournaments,
    whole-arithmetic crossover and Gaussian mutation, each scored by
    ``fitness(genome)`` (or in one call through ``fitness_batch`` when given).
    ``mutation_rates`` optionally gives a per-parent mutation rate aligned
    with ``pop``; offspring inherit their first parent's rate.

    All selection/variation randomness is drawn before fitness is applied,
    so scalar and batched scoring see identical offspring genomes.
    """
    n = len(pop)
    if n != params.pop_size:
        raise ValueError(f"expected population of size {params.pop_size}, got {n}")
    genomes = np.stack([ind.genome for ind in pop])
    fits = np.array([ind.fitness_est for ind in pop])
    order = np.argsort(fits, kind="stable")

    elites = [
        replace(pop[int(i)], unchanged=True) for i in order[: params.n_elites]
    ]

    n_off = n - params.n_elites
    n_pairs = (n_off + 1) // 2

    # binary tournaments: (pair, parent slot, draw)
    draws = rng.integers(0, n, (n_pairs, 2, 2))
    a, b = draws[..., 0], draws[..., 1]
    a_wins = (fits[a] < fits[b]) | ((fits[a] == fits[b]) & (a < b))
    parents = np.where(a_wins, a, b)  # (n_pairs, 2)

    u_cross = rng.uniform(size=n_pairs)
    alphas = rng.uniform(size=n_pairs)
    pa = genomes[parents[:, 0]]
    pb = genomes[parents[:, 1]]
    al = alphas[:, None]
    c1 = np.where(u_cross[:, None] < params.p_c, al * pa + (1 - al) * pb, pa)
    c2 = np.where(u_cross[:, None] < params.p_c, (1 - al) * pa + al * pb, pb)
    children = np.stack([c1, c2], axis=1).reshape(2 * n_pairs, -1)[:n_off]
    child_parents = parents.reshape(-1)[:n_off]

    if mutation_rates is None:
        rates = np.full(n_off, params.p_m)
    else:
        rates = np.asarray(mutation_rates, dtype=np.float64)[child_parents]

    d = genomes.shape[1]
    mask = rng.uniform(size=(n_off, d)) < rates[:, None]
    if params.sigma_m > 0:
        noise = rng.normal(0.0, math.sqrt(params.sigma_m), (n_off, d))
    else:
        noise = np.zeros((n_off, d))
    children = np.clip(children + np.where(mask, noise, 0.0), bounds[0], bounds[1])

    if fitness_batch is not None:
        scores = np.asarray(fitness_batch(children), dtype=np.float64)
    else:
        scores = np.array([fitness(g) for g in children])

    offspring = [
        Individual(children[i], float(scores[i]), sampled=sampled)
        for i in range(n_off)
    ]
    return elites + offspring
